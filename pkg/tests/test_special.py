import math

import mpmath as mp
import numpy as np
import pytest
import scipy.special
from hypothesis import given, strategies as st

import oracles
from fredgap.errors import ConfigurationError, DomainError
from fredgap.special import (AIRY_RANGE, PearceyContourConfig, PearceyFunctionTable, airy_ai,
                             airy_square_tail, airy_values, pearcey_functions, pearcey_phi_left,
                             pearcey_phi_right, pearcey_psi)


@given(st.floats(-8, 8))
def test_airy_against_maclaurin_series(x):
    ai, aip = oracles.airy_maclaurin(x)
    v = airy_ai(x)
    assert v.ai == pytest.approx(ai, rel=1e-11, abs=1e-15)
    assert v.ai_prime == pytest.approx(aip, rel=1e-11, abs=1e-15)


@pytest.mark.parametrize("x", [-30.0, -22.5, -15.0, -9.9, 9.9, 15.0, 22.5, 30.0])
def test_airy_far_field_against_mpmath(x):
    v = airy_ai(x)
    ref_ai = float(mp.airyai(x))
    ref_aip = float(mp.airyai(x, 1))
    scale = max(abs(ref_ai), abs(ref_aip)) if x < 0 else 0.0
    assert v.ai == pytest.approx(ref_ai, rel=1e-10, abs=1e-13 * scale)
    assert v.ai_prime == pytest.approx(ref_aip, rel=1e-10, abs=1e-13 * scale)


def test_airy_vectorized_matches_scipy():
    # scipy only as a cross-check of the vectorized path
    x = np.linspace(-AIRY_RANGE, AIRY_RANGE, 241)
    ai, aip = airy_values(x)
    sai, saip, _, _ = scipy.special.airy(x)
    assert np.max(np.abs(ai - sai)) < 1e-12
    assert np.max(np.abs(aip - saip)) < 1e-11


def test_airy_ode_residual():
    x = np.linspace(-6, 6, 25)
    h = 1e-4
    _, d1 = airy_values(x + h)
    _, d0 = airy_values(x - h)
    ai, _ = airy_values(x)
    assert np.max(np.abs((d1 - d0) / (2 * h) - x * ai)) < 1e-7


def test_airy_values_at_zero():
    v = airy_ai(0.0)
    assert v.ai == pytest.approx(1 / (3 ** (2 / 3) * math.gamma(2 / 3)), rel=1e-14)
    assert v.ai_prime == pytest.approx(-1 / (3 ** (1 / 3) * math.gamma(1 / 3)), rel=1e-14)


@pytest.mark.parametrize("x", [30.5, -31.0, math.inf, math.nan])
def test_airy_domain(x):
    with pytest.raises(DomainError):
        airy_ai(x)


@pytest.mark.parametrize("s", [-6.0, -2.0, 0.0, 1.5, 5.0])
def test_square_tail_against_quadrature(s):
    p, f = airy_square_tail(np.array(s))
    rp, rf = oracles.airy_square_tail(s)
    assert float(p) == pytest.approx(rp, rel=1e-11)
    assert float(f) == pytest.approx(rf, rel=1e-10)


# ---------------------------------------------------------------- Pearcey


PEARCEY_POINTS = [(-3.0, 0.0), (0.0, 0.0), (0.7, 1.0), (2.0, 3.0), (-1.5, 5.0)]


@pytest.mark.parametrize("x,tau", PEARCEY_POINTS)
@pytest.mark.parametrize("moment", [0, 1])
def test_pearcey_functions_against_mpmath(x, tau, moment):
    assert pearcey_phi_right(x, tau, moment) == pytest.approx(oracles.pearcey_phi_right(x, tau, moment), rel=1e-10, abs=1e-13)
    assert pearcey_phi_left(x, tau, moment) == pytest.approx(oracles.pearcey_phi_left(x, tau, moment), rel=1e-10, abs=1e-13)
    assert pearcey_psi(x, tau, moment) == pytest.approx(oracles.pearcey_psi(x, tau, moment), rel=1e-10, abs=1e-13)


def test_pearcey_large_argument():
    # reference wedge through the real part of the complex saddles avoids cancellation
    ref = oracles.pearcey_phi_right(-20.0, 0.0, 0, vertex=mp.cbrt(20) / 2)
    assert pearcey_phi_right(-20.0, 0.0) == pytest.approx(ref, rel=1e-10)


@given(st.floats(-4, 4), st.floats(0, 4))
def test_first_moment_is_a_derivative(x, tau):
    # z exp(-x z) = -d/dx exp(-x z), while psi carries exp(+y z)
    h = 1e-4
    dphi = (pearcey_phi_right(x + h, tau) - pearcey_phi_right(x - h, tau)) / (2 * h)
    dpsi = (pearcey_psi(x + h, tau) - pearcey_psi(x - h, tau)) / (2 * h)
    assert pearcey_phi_right(x, tau, 1) == pytest.approx(-dphi, abs=1e-7)
    assert pearcey_psi(x, tau, 1) == pytest.approx(dpsi, abs=1e-7)


@given(st.floats(-4, 4), st.floats(0, 4))
def test_pearcey_third_order_equation(x, tau):
    # int (z^3 - tau z - x) exp(Theta) = 0 on any contour with decaying ends
    m = [pearcey_phi_right(x, tau, k) for k in range(4)]
    scale = max(1.0, *map(abs, m))
    assert abs(m[3] - tau * m[1] - x * m[0]) < 1e-11 * scale
    s = [pearcey_psi(x, tau, k) for k in range(4)]
    assert abs(s[3] - tau * s[1] - x * s[0]) < 1e-11 * max(1.0, *map(abs, s))


def test_log_scale_representation():
    x = np.array([-6.0, 0.0, 6.0])
    mant, logf = pearcey_phi_right(x, 2.0, log_scale=True)
    np.testing.assert_allclose(mant * np.exp(logf), pearcey_phi_right(x, 2.0), rtol=1e-13)
    mant, logf = pearcey_psi(x, 2.0, log_scale=True)
    np.testing.assert_allclose(mant * np.exp(logf), pearcey_psi(x, 2.0), rtol=1e-13)


def test_panel_table_matches_direct():
    tab = PearceyFunctionTable.on_panels(1.0, -3.0, 3.0, 0.25, 24)
    z = np.linspace(-3, 3, 97) + 0.0013
    z = z[z <= 3]
    for name, fn in [("phi_R", pearcey_phi_right), ("phi_L", pearcey_phi_left), ("psi", pearcey_psi)]:
        np.testing.assert_allclose(tab(name, z), fn(z, 1.0), atol=1e-13, rtol=1e-12)
    with pytest.raises(DomainError):
        tab("psi", 3.5)
    with pytest.raises(ConfigurationError):
        tab("phi_R1", 0.0)


def test_spline_table():
    tab = pearcey_functions(1.0, np.linspace(-3, 3, 601))
    z = np.array([-2.345, 0.1234, 2.9])
    np.testing.assert_allclose(tab("psi", z), pearcey_psi(z, 1.0), atol=1e-8)
    with pytest.raises(ConfigurationError):
        pearcey_functions(1.0, [0.0])


def test_refined_config_agrees():
    cfg = PearceyContourConfig()
    assert pearcey_psi(1.3, 2.0, cfg=cfg.refined()) == pytest.approx(pearcey_psi(1.3, 2.0, cfg=cfg), rel=1e-12)
