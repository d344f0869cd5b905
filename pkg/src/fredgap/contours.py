"""Oriented contours in the complex plane and their discretization.

A :class:`ContourPath` is a list of straight pieces. Each piece starts at an
anchor and runs along a unit direction, either for a finite length or out to
infinity; its ``sign`` says whether the piece is traversed away from the
anchor (+1) or towards it (-1). Discretizing a path yields a
:class:`ComplexQuadrature` whose weights carry both the Jacobian ``dz/dr`` and
the orientation, so ``sum(w * f(z))`` approximates the oriented integral.

The canonical paths used for the Airy and Pearcey kernels have their vertex at
``+vertex`` (right contour) and ``-vertex`` (left contour) so that all contours
are pairwise disjoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigurationError, TruncationError
from .quadrature import affine_map, gauss_legendre_rule

LABELS = ("gammaR", "gammaL", "imagAxis", "custom")


@dataclass(frozen=True)
class Segment:
    """Straight piece ``anchor + r * direction`` for ``0 <= r <= length``."""

    anchor: complex
    direction: complex
    length: float = math.inf
    sign: int = 1

    def __post_init__(self):
        d = complex(self.direction)
        if abs(d) == 0:
            raise ConfigurationError("segment direction must be nonzero")
        object.__setattr__(self, "direction", d / abs(d))
        object.__setattr__(self, "anchor", complex(self.anchor))
        if self.sign not in (1, -1):
            raise ConfigurationError("segment sign must be +1 or -1")
        if not self.length > 0:
            raise ConfigurationError("segment length must be positive")

    @property
    def is_ray(self) -> bool:
        return math.isinf(self.length)

    def point(self, r):
        return self.anchor + np.asarray(r) * self.direction


@dataclass(frozen=True)
class ContourPath:
    segments: tuple
    label: str = "custom"
    conjugation_symmetric: bool = False

    def __post_init__(self):
        if self.label not in LABELS:
            raise ConfigurationError(f"unknown contour label {self.label!r}")
        object.__setattr__(self, "segments", tuple(self.segments))

    def point(self, segment: int, r):
        return self.segments[segment].point(r)

    def reversed(self) -> "ContourPath":
        segs = tuple(replace(s, sign=-s.sign) for s in self.segments)
        return replace(self, segments=segs)

    def negated(self, label: str | None = None) -> "ContourPath":
        """Pointwise image under z -> -z with the same parametrization."""
        segs = tuple(replace(s, anchor=-s.anchor, direction=-s.direction) for s in self.segments)
        return replace(self, segments=segs, label=label or self.label)


@dataclass(frozen=True)
class ComplexQuadrature:
    nodes: np.ndarray
    weights: np.ndarray
    label: str = "custom"
    cut_points: tuple = ()

    def __post_init__(self):
        z = np.array(self.nodes, dtype=complex).ravel()
        w = np.array(self.weights, dtype=complex).ravel()
        if z.shape != w.shape:
            raise ConfigurationError("nodes and weights differ in length")
        if not np.all(np.isfinite(w)):
            raise ConfigurationError("non-finite contour weight")
        z.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "nodes", z)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return self.nodes.size

    def integrate(self, f: Callable) -> complex:
        return complex(np.dot(self.weights, f(self.nodes)))

    def reversed(self) -> "ComplexQuadrature":
        return replace(self, weights=-self.weights)

    def truncation_residual(self, log_magnitude: Callable) -> float:
        """Largest integrand magnitude at the cuts relative to its peak on the nodes.

        ``log_magnitude(z)`` returns ``log|f(z)|``.
        """
        if not self.cut_points:
            return 0.0
        peak = np.max(log_magnitude(self.nodes))
        cut = np.max(log_magnitude(np.array(self.cut_points)))
        return float(np.exp(min(cut - peak, 700.0)))

    def check_truncation(self, log_magnitude: Callable, tol: float = 1e-18) -> float:
        res = self.truncation_residual(log_magnitude)
        if res > tol:
            raise TruncationError(f"contour {self.label} truncated too early (residual {res:.3e})", res)
        return res

    @staticmethod
    def concatenate(parts: Sequence["ComplexQuadrature"], label: str = "custom") -> "ComplexQuadrature":
        return ComplexQuadrature(np.concatenate([p.nodes for p in parts]),
                                 np.concatenate([p.weights for p in parts]),
                                 label, tuple(c for p in parts for c in p.cut_points))


def graded_edges(total: float, panels: int) -> np.ndarray:
    """Panel edges on [0, total] whose lengths double away from 0."""
    if panels < 1:
        raise ConfigurationError("need at least one panel")
    first = total / (2.0 ** panels - 1.0)
    lengths = first * 2.0 ** np.arange(panels)
    return np.concatenate([[0.0], np.cumsum(lengths)])


def doubling_edges(total: float, first: float) -> np.ndarray:
    """Edges 0, first, 3 first, 7 first, ... clipped at ``total``."""
    if not (total > 0 and first > 0):
        raise ConfigurationError("lengths must be positive")
    edges = [0.0]
    step = first
    while edges[-1] < total:
        edges.append(min(edges[-1] + step, total))
        step *= 2.0
    return np.array(edges)


def _radial_rule(edges: np.ndarray, order: int):
    base = gauss_legendre_rule(order)
    rs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        r = affine_map(base, a, b)
        rs.append(r.nodes)
        ws.append(r.weights)
    return np.concatenate(rs), np.concatenate(ws)


def discretize_contour(path: ContourPath, order: int = 40, panels: int = 4,
                       ray_truncation: float = 8.0) -> ComplexQuadrature:
    """Gauss-Legendre discretization of every piece of ``path``.

    Rays are cut at ``ray_truncation`` and split into ``panels`` geometrically
    graded panels; finite pieces use ``panels`` equal panels.
    """
    if not ray_truncation > 0:
        raise ConfigurationError("ray_truncation must be positive")
    nodes, weights, cuts = [], [], []
    for seg in path.segments:
        if seg.is_ray:
            edges = graded_edges(ray_truncation, panels)
            cuts.append(complex(seg.point(ray_truncation)))
        else:
            edges = np.linspace(0.0, seg.length, panels + 1)
        r, wr = _radial_rule(edges, order)
        nodes.append(seg.point(r))
        weights.append(seg.sign * seg.direction * wr)
    return ComplexQuadrature(np.concatenate(nodes), np.concatenate(weights), path.label, tuple(cuts))


def _vee(vertex: complex, angle: float, upward: bool, label: str) -> ContourPath:
    up = Segment(vertex, np.exp(1j * angle), math.inf, 1 if upward else -1)
    down = Segment(vertex, np.exp(-1j * angle), math.inf, -1 if upward else 1)
    return ContourPath((down, up), label, conjugation_symmetric=(complex(vertex).imag == 0))


def airy_contours(vertex: float = 1.0, angle: float = math.pi / 3):
    """Right and left contours for the Airy kernel.

    The right contour comes in from ``inf * exp(-i angle)``, passes through
    ``vertex`` and leaves towards ``inf * exp(i angle)``. The left one is its
    pointwise negative, so it runs downward through ``-vertex``.
    """
    if not 0 < angle < math.pi / 2:
        raise ConfigurationError("Airy ray angle must lie in (0, pi/2)")
    right = _vee(vertex, angle, True, "gammaR")
    return right, right.negated("gammaL")


def pearcey_contours(truncation: float = 8.0, vertex: float = 1.0, angle: float = math.pi / 4):
    """Right, left and imaginary-axis contours for the Pearcey kernel.

    The right contour runs downward, from ``inf * exp(i angle)`` through
    ``vertex`` to ``inf * exp(-i angle)``; the left one is its pointwise
    negative; the imaginary axis runs upward and is cut at ``|Im| = truncation``.
    """
    if not truncation > 0:
        raise ConfigurationError("truncation must be positive")
    if not 0 < angle < math.pi / 2:
        raise ConfigurationError("Pearcey ray angle must lie in (0, pi/2)")
    right = _vee(vertex, angle, False, "gammaR")
    left = right.negated("gammaL")
    axis = ContourPath((Segment(0.0, -1j, truncation, -1), Segment(0.0, 1j, truncation, 1)),
                       "imagAxis", conjugation_symmetric=True)
    return right, left, axis


def min_distance(a: ComplexQuadrature, b: ComplexQuadrature) -> float:
    """Smallest distance between the node sets of two discretizations."""
    return float(np.min(np.abs(a.nodes[:, None] - b.nodes[None, :])))
