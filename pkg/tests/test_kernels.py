import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from fredgap.errors import ConfigurationError, TruncationError
from fredgap.kernels import (ContourKernelConfig, KernelHandle, PearceyKernelConfig, airy_kernel,
                             airy_kernel_contour, airy_kernel_contour_matrix, airy_kernel_matrix,
                             calibrate_t_integral_sign, general_p_kernel, pearcey_kernel,
                             pearcey_kernel_matrix, pearcey_kernel_tau_derivative_matrix)
from fredgap.phases import PhaseSpec
from fredgap.special import airy_values, pearcey_phi_left, pearcey_phi_right, pearcey_psi

xs = st.floats(-6, 6)


@given(xs, xs)
def test_airy_kernel_against_extended_precision(x, y):
    assert airy_kernel(x, y) == pytest.approx(oracles.airy_kernel(x, y), rel=1e-9, abs=1e-12)


@given(xs, xs)
def test_airy_kernel_symmetric(x, y):
    assert airy_kernel(x, y) == airy_kernel(y, x)


@pytest.mark.parametrize("gap", [0.0, 1e-9, 1e-6, 9e-5, 1.1e-4, 1e-3])
def test_airy_kernel_near_diagonal(gap):
    x = 0.37
    assert airy_kernel(x, x + gap) == pytest.approx(oracles.airy_kernel(x, x + gap), rel=1e-11)


def test_airy_kernel_origin():
    # K(0, 0) = Ai'(0)^2
    assert airy_kernel(0.0, 0.0) == pytest.approx(float(mp.airyai(0, 1)) ** 2, rel=1e-14)
    assert airy_kernel(0.0, 0.0) == pytest.approx(0.06698748, abs=5e-9)


def test_airy_kernel_routes_agree():
    x = np.linspace(-5, 5, 6)
    assert np.max(np.abs(airy_kernel_matrix(x) - airy_kernel_contour_matrix(x))) < 1e-10
    assert airy_kernel_contour(1.0, -2.0) == pytest.approx(airy_kernel(1.0, -2.0), abs=1e-12)


@given(st.floats(-4, 4), st.floats(-4, 4))
def test_airy_kernel_translation_identity(x, y):
    # (d/dx + d/dy) K_Ai(x, y) = -Ai(x) Ai(y)
    h = 1e-4
    d = (airy_kernel(x + h, y + h) - airy_kernel(x - h, y - h)) / (2 * h)
    ai, _ = airy_values(np.array([x, y]))
    assert d == pytest.approx(-ai[0] * ai[1], abs=2e-8)


def test_airy_nystrom_matrix_is_a_contraction():
    # K_Ai is a projection; on a subset its Nystrom matrix has spectrum in [0, 1)
    from fredgap.quadrature import IntervalUnion, composite_interval_rule
    rule = composite_interval_rule(IntervalUnion.half_line(-3.0), 30)
    sw = np.sqrt(rule.weights)
    m = sw[:, None] * airy_kernel_matrix(rule.nodes) * sw[None, :]
    ev = np.linalg.eigvalsh(m)
    assert ev.min() > -1e-12 and ev.max() < 1.0


def test_contour_truncation_is_enforced():
    with pytest.raises(TruncationError):
        airy_kernel_contour(0.0, 0.0, ContourKernelConfig(truncation=1.0))


# ---------------------------------------------------------------- Pearcey


@pytest.mark.parametrize("tau", [0.0, 1.0, 5.0])
def test_pearcey_routes_agree(tau):
    x = np.array([-2.0, 0.0, 2.0])
    kt = pearcey_kernel_matrix(x, x, tau)
    kd = pearcey_kernel_matrix(x, x, tau, route="double_contour")
    assert np.max(np.abs(kt - kd)) < 1e-12


def test_pearcey_table_matches_direct_evaluation():
    x = np.array([-1.3, 0.2, 1.7])
    direct = PearceyKernelConfig(use_table=False)
    np.testing.assert_allclose(pearcey_kernel_matrix(x, x, 1.0), pearcey_kernel_matrix(x, x, 1.0, direct),
                               atol=1e-13)


def test_t_integral_sign_calibration():
    assert calibrate_t_integral_sign(1.0) == 1.0


def test_pearcey_kernel_reference_values():
    # cross-route values, recorded once both routes agreed to 1e-15
    assert pearcey_kernel(0.0, 0.0, 0.0) == pytest.approx(0.1556123239, abs=1e-10)
    assert pearcey_kernel(0.0, 0.0, 1.0) == pytest.approx(0.0633256553, abs=1e-10)


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_pearcey_reflection_symmetry(x, y):
    assert pearcey_kernel(-x, -y, 1.0) == pytest.approx(pearcey_kernel(x, y, 1.0), abs=1e-13)


@pytest.mark.parametrize("tau", [0.5, 2.0])
@pytest.mark.parametrize("x,y", [(0.3, -0.7), (1.2, 0.4)])
def test_pearcey_translation_identity(tau, x, y):
    # (d/dx + d/dy) K_P(x, y) = (phi_R + phi_L)(x) psi(y)
    h = 1e-4
    d = (pearcey_kernel(x + h, y + h, tau) - pearcey_kernel(x - h, y - h, tau)) / (2 * h)
    phi = pearcey_phi_right(x, tau) + pearcey_phi_left(x, tau)
    assert d == pytest.approx(phi * pearcey_psi(y, tau), abs=2e-8)


def test_tau_derivative_against_difference():
    x = np.array([-1.0, 0.0, 0.8])
    h = 1e-4
    fd = (pearcey_kernel_matrix(x, x, 1.0 + h) - pearcey_kernel_matrix(x, x, 1.0 - h)) / (2 * h)
    np.testing.assert_allclose(pearcey_kernel_tau_derivative_matrix(x, x, 1.0), fd, atol=1e-8)


def test_empty_arguments():
    assert pearcey_kernel_matrix([], [1.0], 1.0).shape == (0, 1)


# ---------------------------------------------------------------- general family and handle


def test_general_family_reduces_to_airy_and_pearcey():
    assert general_p_kernel(PhaseSpec.airy(), 0.5, -1.0) == pytest.approx(airy_kernel(0.5, -1.0), abs=1e-12)
    assert general_p_kernel(PhaseSpec.pearcey(1.0), 0.5, -1.0) == pytest.approx(
        pearcey_kernel(0.5, -1.0, 1.0), abs=1e-12)
    with pytest.raises(ConfigurationError):
        general_p_kernel(PhaseSpec(4, (1.0, 0.0)), 0.0, 0.0)


def test_kernel_handle():
    h = KernelHandle.airy()
    assert h(0.0, 0.0) == pytest.approx(airy_kernel(0.0, 0.0))
    assert KernelHandle.airy("double_contour")(1.0, 1.0) == pytest.approx(airy_kernel(1.0, 1.0), abs=1e-12)
    p = KernelHandle.pearcey_kernel(1.0)
    assert p.matrix([0.0]).shape == (1, 1)
    with pytest.raises(ConfigurationError):
        KernelHandle("airy", "t_integral")
    with pytest.raises(ConfigurationError):
        KernelHandle("bessel", "closed_form")
    with pytest.raises(ConfigurationError):
        KernelHandle("general", "double_contour")
    with pytest.raises(ConfigurationError):
        PearceyKernelConfig(route="fft")
