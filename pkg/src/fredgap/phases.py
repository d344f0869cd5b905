"""Polynomial phase functions of the (1, p) kernel family and their saddle points.

The phase of degree ``p + 1`` is

    Theta(z) = z^(p+1)/(p+1) - sum_k tau_k z^k / k - x z,   k = 2 .. p-1,

which gives ``z^3/3 - x z`` for the Airy case (p = 2, no deformation) and
``z^4/4 - tau z^2/2 - x z`` for the Pearcey case (p = 3, deformation (tau,)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class PhaseSpec:
    degree: int
    deformation: tuple = ()
    shift: float = 0.0

    def __post_init__(self):
        if int(self.degree) != self.degree or self.degree < 2:
            raise ConfigurationError("phase degree p must be an integer >= 2")
        d = tuple(float(t) for t in self.deformation)
        if len(d) != self.degree - 2:
            raise ConfigurationError(f"degree {self.degree} needs {self.degree - 2} deformation parameters, got {len(d)}")
        object.__setattr__(self, "degree", int(self.degree))
        object.__setattr__(self, "deformation", d)
        object.__setattr__(self, "shift", float(self.shift))

    @classmethod
    def airy(cls, x: float = 0.0) -> "PhaseSpec":
        return cls(2, (), x)

    @classmethod
    def pearcey(cls, tau: float, x: float = 0.0) -> "PhaseSpec":
        return cls(3, (tau,), x)

    def with_shift(self, x: float) -> "PhaseSpec":
        return PhaseSpec(self.degree, self.deformation, x)

    def coefficients(self) -> np.ndarray:
        """Coefficients in increasing powers, constant term first."""
        p = self.degree
        c = np.zeros(p + 2)
        c[p + 1] = 1.0 / (p + 1)
        for k, t in enumerate(self.deformation, start=2):
            c[k] = -t / k
        c[1] = -self.shift
        return c

    def derivative_coefficients(self) -> np.ndarray:
        c = self.coefficients()
        return c[1:] * np.arange(1, c.size)


def _horner(coeffs: np.ndarray, z):
    z = np.asarray(z)
    acc = np.zeros(z.shape, dtype=np.result_type(z, float)) + coeffs[-1]
    for c in coeffs[-2::-1]:
        acc = acc * z + c
    return acc


def eval_phase(spec: PhaseSpec, z):
    """Theta(z) by Horner's rule; vectorized over ``z``."""
    out = _horner(spec.coefficients(), z)
    return out if np.ndim(out) else out[()]


def eval_phase_derivative(spec: PhaseSpec, z):
    out = _horner(spec.derivative_coefficients(), z)
    return out if np.ndim(out) else out[()]


def saddle_points(spec: PhaseSpec) -> np.ndarray:
    """All ``p`` roots of Theta', from companion eigenvalues plus Newton polish."""
    d = spec.derivative_coefficients()  # monic, degree p
    p = d.size - 1
    comp = np.zeros((p, p))
    comp[0, :] = -d[-2::-1] / d[-1]
    comp[1:, :-1] += np.eye(p - 1)
    roots = np.linalg.eigvals(comp).astype(complex)
    dd = d[1:] * np.arange(1, d.size)
    for _ in range(2):
        f = _horner(d, roots)
        fp = _horner(dd, roots)
        ok = np.abs(fp) > 1e-300
        step = np.where(ok, f / np.where(ok, fp, 1.0), 0.0)
        trial = roots - step
        better = np.abs(_horner(d, trial)) < np.abs(f)
        roots = np.where(better, trial, roots)
    return np.sort_complex(roots)


def pearcey_saddles(x, tau: float) -> np.ndarray:
    """Roots of z^3 - tau z - x for an array of shifts; shape (n, 3)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    comp = np.zeros((x.size, 3, 3))
    comp[:, 0, 1] = tau
    comp[:, 0, 2] = x
    comp[:, 1, 0] = 1.0
    comp[:, 2, 1] = 1.0
    return np.linalg.eigvals(comp)


def pearcey_discriminant(tau: float, a: float) -> float:
    """Discriminant of z^3 - tau z - a, namely 27 a^2 - 4 tau^3."""
    return -4.0 * tau ** 3 + 27.0 * a ** 2
