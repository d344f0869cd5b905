"""Gauss-Legendre rules, domain maps and composite rules over unions of intervals.

Every integral in the package reduces to one of these rules: real-line
Nystrom discretizations use them directly and the complex contours in
:mod:`fredgap.contours` reuse them panel by panel.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError, DomainError

MAX_GL_ORDER = 512


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class QuadratureRule:
    """Real nodes with strictly positive weights, nodes strictly increasing."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        x = _frozen(self.nodes).ravel()
        w = _frozen(self.weights).ravel()
        if x.shape != w.shape:
            raise ConfigurationError("nodes and weights differ in length")
        if w.size and not np.all(w > 0):
            raise ConfigurationError("quadrature weights must be positive")
        if x.size > 1 and not np.all(np.diff(x) > 0):
            raise ConfigurationError("quadrature nodes must be strictly increasing")
        object.__setattr__(self, "nodes", x)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return self.nodes.size

    def integrate(self, f) -> float:
        """Apply the rule to a vectorized callable."""
        if not len(self):
            return 0.0
        return np.dot(self.weights, f(self.nodes))

    @staticmethod
    def concatenate(rules: Iterable["QuadratureRule"]) -> "QuadratureRule":
        rules = list(rules)
        if not rules:
            return QuadratureRule(np.zeros(0), np.zeros(0))
        return QuadratureRule(np.concatenate([r.nodes for r in rules]),
                              np.concatenate([r.weights for r in rules]))


def _legendre_with_derivative(n: int, x: np.ndarray):
    p0 = np.ones_like(x)
    p1 = x.copy()
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    # derivative from the standard identity (1 - x^2) P_n' = n (P_{n-1} - x P_n)
    dp = n * (p0 - x * p1) / (1.0 - x * x)
    return p1, dp


@functools.lru_cache(maxsize=128)
def _gl_cached(n: int):
    if n == 1:
        return np.array([0.0]), np.array([2.0])
    i = np.arange(1, n + 1)
    # Tricomi-type initial guesses, largest node first
    theta = np.pi * (4 * i - 1) / (4 * n + 2)
    x = (1 - (n - 1) / (8.0 * n ** 3)) * np.cos(theta)
    for _ in range(100):
        p, dp = _legendre_with_derivative(n, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    p, dp = _legendre_with_derivative(n, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    x = x[::-1].copy()
    w = w[::-1].copy()
    # enforce exact antisymmetry of the node set
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    if n % 2:
        x[n // 2] = 0.0
    return x, w


def gauss_legendre_rule(n: int) -> QuadratureRule:
    """The ``n``-point Gauss-Legendre rule on [-1, 1], 1 <= n <= 512."""
    if isinstance(n, bool) or int(n) != n or not 1 <= int(n) <= MAX_GL_ORDER:
        raise ConfigurationError(f"Gauss-Legendre order must be in [1, {MAX_GL_ORDER}], got {n!r}")
    x, w = _gl_cached(int(n))
    return QuadratureRule(x, w)


def affine_map(rule: QuadratureRule, a: float, b: float) -> QuadratureRule:
    """Transplant a rule on [-1, 1] to [a, b]."""
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise DomainError(f"affine_map needs finite a < b, got [{a}, {b}]")
    half = 0.5 * (b - a)
    return QuadratureRule(half * rule.nodes + 0.5 * (a + b), half * rule.weights)


def semi_infinite_map(rule: QuadratureRule, s: float, scale: float = 2.0) -> QuadratureRule:
    """Map a rule on [-1, 1] to [s, inf) via x = s + scale * u / (1 - u), u in [0, 1)."""
    if not scale > 0:
        raise ConfigurationError("scale must be positive")
    u = 0.5 * (rule.nodes + 1.0)
    wu = 0.5 * rule.weights
    one_minus = 1.0 - u
    return QuadratureRule(s + scale * u / one_minus, wu * scale / one_minus ** 2)


@dataclass(frozen=True)
class IntervalUnion:
    """The set [a1, a2] U [a3, a4] U ... with an optional unbounded last piece.

    ``endpoints`` is non-decreasing. Equal neighbours inside a pair describe a
    zero-length interval (its indicator is zero almost everywhere); the last
    endpoint opens ``[a_N, inf)`` when ``unbounded_tail`` is set, which needs an
    odd count.
    """

    endpoints: tuple
    unbounded_tail: bool = False

    def __post_init__(self):
        e = tuple(float(v) for v in np.atleast_1d(np.asarray(self.endpoints, dtype=float)))
        if len(e) == 0:
            raise ConfigurationError("an interval union needs at least one endpoint")
        if not all(math.isfinite(v) for v in e):
            raise DomainError("endpoints must be finite")
        if any(b < a for a, b in zip(e[:-1], e[1:])):
            raise DomainError(f"endpoints must be non-decreasing: {e}")
        # distinct intervals may touch but a pair cannot overlap its neighbour
        if self.unbounded_tail and len(e) % 2 == 0:
            raise ConfigurationError("an unbounded tail requires an odd number of endpoints")
        if not self.unbounded_tail and len(e) % 2 == 1:
            raise ConfigurationError("a bounded union requires an even number of endpoints")
        object.__setattr__(self, "endpoints", e)
        object.__setattr__(self, "unbounded_tail", bool(self.unbounded_tail))

    @classmethod
    def from_intervals(cls, intervals: Sequence[Sequence[float]]) -> "IntervalUnion":
        """Build from (a, b) pairs in any order; ``b = inf`` marks the tail."""
        pairs = sorted((float(a), float(b)) for a, b in intervals)
        if not pairs:
            raise ConfigurationError("no intervals given")
        tail = math.isinf(pairs[-1][1])
        for a, b in pairs:
            if b < a:
                raise DomainError(f"interval [{a}, {b}] is reversed")
        if any(math.isinf(b) for _, b in pairs[:-1]):
            raise DomainError("only the last interval may be unbounded")
        for (a1, b1), (a2, _) in zip(pairs[:-1], pairs[1:]):
            if a2 < b1:
                raise DomainError(f"intervals overlap near {a2}")
        ends = [v for a, b in pairs for v in (a, b)]
        if tail:
            ends = ends[:-1]
        return cls(tuple(ends), tail)

    @classmethod
    def half_line(cls, s: float) -> "IntervalUnion":
        return cls((float(s),), True)

    @classmethod
    def interval(cls, a: float, b: float) -> "IntervalUnion":
        return cls((float(a), float(b)), False)

    @property
    def bounded(self) -> bool:
        return not self.unbounded_tail

    def intervals(self) -> list:
        e = list(self.endpoints)
        if self.unbounded_tail:
            e.append(math.inf)
        return list(zip(e[0::2], e[1::2]))

    def measure(self) -> float:
        return float(sum(b - a for a, b in self.intervals()))

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for a, b in self.intervals():
            out |= (x >= a) & (x <= b) & (b > a)
        return out


def composite_interval_rule(I: IntervalUnion, order: int = 40, panels_per_interval: int | None = None,
                            tail_scale: float = 2.0, panel_length: float = 1.0) -> QuadratureRule:
    """Concatenate Gauss-Legendre panels over every piece of ``I``.

    Without ``panels_per_interval`` each bounded piece gets ``ceil(length /
    panel_length)`` panels (at least one). Zero-length pieces contribute no
    nodes. The unbounded piece uses :func:`semi_infinite_map`.
    """
    if panels_per_interval is not None and panels_per_interval < 1:
        raise ConfigurationError("panels_per_interval must be >= 1")
    if not panel_length > 0:
        raise ConfigurationError("panel_length must be positive")
    base = gauss_legendre_rule(order)
    parts = []
    for a, b in I.intervals():
        if math.isinf(b):
            parts.append(semi_infinite_map(base, a, tail_scale))
            continue
        if b == a:
            continue
        m = panels_per_interval or max(1, math.ceil((b - a) / panel_length - 1e-12))
        edges = np.linspace(a, b, m + 1)
        parts.extend(affine_map(base, p, q) for p, q in zip(edges[:-1], edges[1:]))
    return QuadratureRule.concatenate(parts)
