import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from fredgap.contours import (ComplexQuadrature, ContourPath, Segment, airy_contours, discretize_contour,
                              doubling_edges, graded_edges, min_distance, pearcey_contours)
from fredgap.errors import ConfigurationError, TruncationError


def airy_integrand(x, k=0):
    return lambda z: z ** k * np.exp(z ** 3 / 3 - x * z)


@pytest.mark.parametrize("x", [-4.0, -1.0, 0.0, 0.5, 3.0])
def test_right_airy_contour_reproduces_airy_function(x):
    # (1/2 pi i) int over the upward wedge of exp(z^3/3 - x z) is Ai(x)
    right, _ = airy_contours()
    q = discretize_contour(right, order=40, panels=6, ray_truncation=10.0)
    val = q.integrate(airy_integrand(x)) / (2j * math.pi)
    assert val.real == pytest.approx(float(mp.airyai(x)), abs=1e-13)
    assert abs(val.imag) < 1e-14
    # first moment gives -Ai'(x)
    d = q.integrate(airy_integrand(x, 1)) / (2j * math.pi)
    assert -d.real == pytest.approx(float(mp.airyai(x, 1)), abs=1e-13)


def test_left_contour_is_pointwise_negative():
    right, left = airy_contours()
    qr = discretize_contour(right)
    ql = discretize_contour(left)
    np.testing.assert_allclose(ql.nodes, -qr.nodes, atol=0)
    np.testing.assert_allclose(ql.weights, -qr.weights, atol=0)
    assert ql.label == "gammaL" and qr.label == "gammaR"


def test_orientation():
    right, left = airy_contours()
    q = discretize_contour(right)
    # upward: the net displacement int dz points from exp(-i pi/3) to exp(i pi/3)
    upper = q.nodes.imag > 0
    assert np.sum(q.weights[upper]).imag > 0
    pr, pl, ax = pearcey_contours(6.0)
    qp = discretize_contour(pr)
    assert np.sum(qp.weights[qp.nodes.imag > 0]).imag < 0  # downward
    qa = discretize_contour(ax, panels=8, ray_truncation=6)
    assert np.sum(qa.weights).imag == pytest.approx(12.0)  # upward, length 2 * 6


def test_reversed_flips_weights():
    q = discretize_contour(airy_contours()[0])
    np.testing.assert_array_equal(q.reversed().weights, -q.weights)
    path = airy_contours()[0]
    assert discretize_contour(path.reversed()).weights == pytest.approx(-q.weights)


@pytest.mark.parametrize("family", ["airy", "pearcey"])
def test_contours_pairwise_disjoint(family):
    if family == "airy":
        qs = [discretize_contour(p) for p in airy_contours()]
    else:
        r, l, a = pearcey_contours(6.0)
        qs = [discretize_contour(r), discretize_contour(l), discretize_contour(a, panels=6, ray_truncation=6.0)]
    for i in range(len(qs)):
        for j in range(i + 1, len(qs)):
            assert min_distance(qs[i], qs[j]) > 0.3


@given(st.floats(-3, 3))
def test_conjugation_symmetry_gives_real_integrals(x):
    # symmetric contour + integrand real on the real axis => (1/2 pi i) int is real
    right, _ = airy_contours()
    assert right.conjugation_symmetric
    q = discretize_contour(right)
    np.testing.assert_allclose(np.sort_complex(q.nodes.conj()), np.sort_complex(q.nodes), atol=1e-15)
    val = q.integrate(airy_integrand(x)) / (2j * math.pi)
    assert abs(val.imag) < 1e-13


def test_truncation_check():
    right, _ = airy_contours()
    q = discretize_contour(right, ray_truncation=1.5)
    logmag = lambda z: np.real(z ** 3 / 3)
    with pytest.raises(TruncationError) as exc:
        q.check_truncation(logmag)
    assert exc.value.residual > 1e-18
    q_long = discretize_contour(right, ray_truncation=8.0)
    assert q_long.check_truncation(logmag) < 1e-18


@given(st.floats(0.5, 50), st.integers(1, 12))
def test_graded_edges(total, panels):
    e = graded_edges(total, panels)
    assert e[0] == 0 and e[-1] == pytest.approx(total)
    np.testing.assert_allclose(np.diff(e)[1:] / np.diff(e)[:-1], 2.0)


@given(st.floats(0.5, 50), st.floats(0.01, 5))
def test_doubling_edges(total, first):
    e = doubling_edges(total, first)
    assert e[0] == 0 and e[-1] == total
    assert np.all(np.diff(e) > 0)
    assert np.diff(e)[0] == pytest.approx(min(first, total))


def test_validation():
    with pytest.raises(ConfigurationError):
        Segment(0, 0)
    with pytest.raises(ConfigurationError):
        Segment(0, 1, sign=2)
    with pytest.raises(ConfigurationError):
        Segment(0, 1, length=0)
    with pytest.raises(ConfigurationError):
        ContourPath((), label="nope")
    with pytest.raises(ConfigurationError):
        airy_contours(angle=2.0)
    with pytest.raises(ConfigurationError):
        pearcey_contours(truncation=-1)
    with pytest.raises(ConfigurationError):
        ComplexQuadrature([1j], [np.inf])
    with pytest.raises(ConfigurationError):
        discretize_contour(airy_contours()[0], ray_truncation=0)
