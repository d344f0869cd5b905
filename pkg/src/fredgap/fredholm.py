"""Fredholm determinants of Airy and Pearcey kernels restricted to interval unions.

Two independent discretizations are provided for each kernel:

* the real-line Nystrom route, ``det(Id - W^1/2 K W^1/2)`` on a composite
  Gauss-Legendre rule over the set ``I``;
* the contour-operator route, where the same determinant is written for an
  integrable kernel ``f(l).g(m) / (l - m)`` acting on the contours
  themselves, the set ``I`` entering only through exponentials ``exp(a_j l)``.

The endpoint and ``tau`` derivatives of ``log det`` are computed from the
discretized resolvent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .contours import ComplexQuadrature
from .errors import (ConfigurationError, ConvergenceError, DomainError,
                     SingularOperatorError)
from .kernels import (ContourKernelConfig, KernelHandle, PearceyKernelConfig,
                      airy_contour_quadratures, airy_kernel_matrix,
                      pearcey_contour_quadratures, pearcey_kernel_matrix,
                      pearcey_kernel_tau_derivative_matrix)
from .quadrature import IntervalUnion, QuadratureRule, composite_interval_rule

TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class DiscretizedOperator:
    """Square matrix approximating an integral operator on a node set."""

    matrix: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    symmetrized: bool = True

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ConfigurationError("operator matrix must be square")
        if not (len(self.nodes) == len(self.weights) == m.shape[0]):
            raise ConfigurationError("nodes, weights and matrix size disagree")

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def nystrom_matrix(kernel, rule: QuadratureRule) -> DiscretizedOperator:
    """``M_ij = sqrt(w_i) K(x_i, x_j) sqrt(w_j)``.

    ``kernel`` is a :class:`KernelHandle` or any callable returning the kernel
    matrix for two node arrays.
    """
    x = rule.nodes
    sw = np.sqrt(rule.weights)
    k = kernel.matrix(x, x) if isinstance(kernel, KernelHandle) else np.asarray(kernel(x, x))
    return DiscretizedOperator(sw[:, None] * k * sw[None, :], x, rule.weights, True)


def _matrix_of(op) -> np.ndarray:
    return op.matrix if isinstance(op, DiscretizedOperator) else np.asarray(op)


def _series_log_det(m: np.ndarray, tol: float = 1e-17, max_terms: int = 400):
    """log det(Id - M) = -sum_k tr(M^k)/k; used when ||M|| is small."""
    total = 0.0
    p = m.copy()
    for k in range(1, max_terms + 1):
        term = np.trace(p) / k
        total -= term
        if abs(term) <= tol * abs(total) or abs(term) < 1e-300:
            return total
        p = p @ m
    raise ConvergenceError("trace series for log det did not converge")


def log_fredholm_det(op, series_threshold: float = 0.5) -> complex | float:
    """log det(Id - M), real for real matrices.

    Small operators (Frobenius norm below ``series_threshold``) use the trace
    series, which keeps relative precision when det is extremely close to 1.
    """
    m = _matrix_of(op)
    if m.shape[0] == 0:
        return 0.0
    if np.linalg.norm(m) < series_threshold:
        val = _series_log_det(m)
        return float(val.real) if np.isrealobj(m) else complex(val)
    a = np.eye(m.shape[0]) - m
    sign, logabs = np.linalg.slogdet(a)
    if sign == 0 or not np.isfinite(logabs):
        raise SingularOperatorError("Id - K is singular", _condition(a))
    if np.isrealobj(m):
        if sign < 0:
            raise DomainError("determinant is negative; its logarithm is not real")
        return float(logabs)
    return complex(logabs + np.log(sign))


def _condition(a: np.ndarray) -> float:
    try:
        return float(np.linalg.cond(a, 1))
    except np.linalg.LinAlgError:
        return math.inf


def fredholm_det(op, imag_tol: float = 1e-8) -> float:
    """det(Id - M) by pivoted LU; real part for complex matrices.

    Raises :class:`SingularOperatorError` when ``Id - M`` is singular to working
    precision and :class:`ConvergenceError` when a complex determinant carries an
    imaginary residue above ``imag_tol`` (relative).
    """
    m = _matrix_of(op)
    n = m.shape[0]
    if n == 0:
        return 1.0
    a = np.eye(n) - m
    if np.linalg.norm(m) < 0.5:
        d = np.exp(_series_log_det(m))
    else:
        d = np.linalg.det(a)
        if abs(d) < 1e-8:
            cond = _condition(a)
            if cond > 1e14:
                raise SingularOperatorError(f"Id - K singular to working precision (cond {cond:.2e})", cond)
    if np.iscomplexobj(d):
        if abs(d.imag) > imag_tol * max(abs(d), 1e-300):
            raise ConvergenceError(f"complex determinant has imaginary residue {abs(d.imag):.3e}", (d,))
        return float(d.real)
    return float(d)


# ---------------------------------------------------------------- configs


@dataclass(frozen=True)
class NystromConfig:
    """Quadrature and refinement settings for the real-line route."""

    order: int = 40
    panel_length: float = 1.0
    tail_scale: float = 2.0
    tol: float = 1e-10
    max_doublings: int = 3
    abs_floor: float = 1.0

    def __post_init__(self):
        if self.order < 1 or self.panel_length <= 0 or self.tail_scale <= 0:
            raise ConfigurationError("order, panel length and tail scale must be positive")
        if self.tol <= 0:
            raise ConfigurationError("tolerance must be positive")
        if not 0 <= self.max_doublings <= 5:
            raise ConfigurationError("max_doublings must be in [0, 5]")

    def rule(self, I: IntervalUnion, order: int | None = None) -> QuadratureRule:
        return composite_interval_rule(I, order or self.order, None, self.tail_scale, self.panel_length)


AIRY_NYSTROM = NystromConfig()
PEARCEY_NYSTROM = NystromConfig(order=20, panel_length=4.0)


@dataclass(frozen=True)
class GapResult:
    """A converged log-determinant with its refinement history."""

    log_det: float
    order: int
    history: tuple

    @property
    def det(self) -> float:
        return math.exp(self.log_det)


def _refine(compute: Callable[[int], float], cfg: NystromConfig) -> GapResult:
    order = cfg.order
    prev = compute(order)
    history = [(order, prev)]
    if cfg.max_doublings == 0:
        return GapResult(prev, order, tuple(history))
    for _ in range(cfg.max_doublings):
        order *= 2
        cur = compute(order)
        history.append((order, cur))
        if abs(cur - prev) <= cfg.tol * max(cfg.abs_floor, abs(cur)):
            return GapResult(cur, order, tuple(history))
        prev = cur
    raise ConvergenceError(f"determinant did not converge to {cfg.tol:g} after {cfg.max_doublings} doublings",
                           [v for _, v in history[-2:]])


def _airy_log_det(I: IntervalUnion, order: int, cfg: NystromConfig) -> float:
    rule = cfg.rule(I, order)
    if not len(rule):
        return 0.0
    return log_fredholm_det(nystrom_matrix(airy_kernel_matrix, rule))


def airy_log_gap(I: IntervalUnion, cfg: NystromConfig = AIRY_NYSTROM) -> GapResult:
    return _refine(lambda n: _airy_log_det(I, n, cfg), cfg)


def airy_gap_probability(I: IntervalUnion, cfg: NystromConfig = AIRY_NYSTROM) -> float:
    """det(Id - K_Ai restricted to I) by Nystrom with order doubling."""
    return airy_log_gap(I, cfg).det


def _require_bounded(I: IntervalUnion):
    if I.unbounded_tail:
        raise DomainError("Pearcey gap probabilities need bounded intervals")


def _pearcey_log_det(I, tau, order, cfg: NystromConfig, kcfg: PearceyKernelConfig) -> float:
    rule = cfg.rule(I, order)
    if not len(rule):
        return 0.0
    op = nystrom_matrix(lambda x, y: pearcey_kernel_matrix(x, y, tau, kcfg), rule)
    return log_fredholm_det(op)


def pearcey_log_gap(I: IntervalUnion, tau: float, cfg: NystromConfig = PEARCEY_NYSTROM,
                    kernel_cfg: PearceyKernelConfig | None = None) -> GapResult:
    _require_bounded(I)
    kcfg = kernel_cfg or PearceyKernelConfig()
    return _refine(lambda n: _pearcey_log_det(I, float(tau), n, cfg, kcfg), cfg)


def pearcey_gap_probability(I: IntervalUnion, tau: float, cfg: NystromConfig = PEARCEY_NYSTROM,
                            kernel_cfg: PearceyKernelConfig | None = None) -> float:
    """det(Id - K_P restricted to I) for a bounded union (t-integral route by default)."""
    return pearcey_log_gap(I, tau, cfg, kernel_cfg).det


# ---------------------------------------------------------------- contour route


def _contour_det(blocks, quads) -> complex:
    """det(Id - K W) for a block kernel on concatenated contour nodes."""
    sizes = [len(q) for q in quads]
    n = sum(sizes)
    k = np.zeros((n, n), dtype=complex)
    offs = np.concatenate([[0], np.cumsum(sizes)])
    for (i, j), block in blocks.items():
        k[offs[i]:offs[i + 1], offs[j]:offs[j + 1]] = block
    w = np.concatenate([q.weights for q in quads])
    return np.linalg.det(np.eye(n) - k * w[None, :])


def _finish(d: complex, imag_tol: float) -> float:
    if abs(d.imag) > imag_tol * max(abs(d), 1e-300):
        raise ConvergenceError(f"contour determinant imaginary residue {abs(d.imag):.3e} exceeds tolerance "
                               "(contour or truncation misconfigured)", (d,))
    return float(d.real)


@dataclass(frozen=True)
class ContourDetConfig:
    kernel: ContourKernelConfig = field(default_factory=ContourKernelConfig)
    imag_tol: float = 1e-6


def _signed_exp_sum(ends, lam, mu):
    """sum_j (-1)^(j+1) exp(a_j (lam - mu)) for the 1-based endpoint index j."""
    s = 0.0
    for j, a in enumerate(ends):
        s = s + (1.0 if j % 2 == 0 else -1.0) * np.exp(a * (lam[:, None] - mu[None, :]))
    return s


def contour_det_airy(I: IntervalUnion, cfg: ContourDetConfig | None = None) -> float:
    """Real part of :func:`contour_det_airy_complex`, after checking the imaginary residue."""
    cfg = cfg or ContourDetConfig()
    return _finish(contour_det_airy_complex(I, cfg), cfg.imag_tol)


def contour_det_airy_complex(I: IntervalUnion, cfg: ContourDetConfig | None = None) -> complex:
    """det(Id - K~) for the Airy integrable kernel on gamma_R U gamma_L.

    Blocks (l, m): l on gamma_R, m on gamma_L gives
    exp(l^3/6 - m^3/6) / (2 pi i (l - m)); l on gamma_L, m on gamma_R gives
    sum_j (-1)^(j+1) exp(-l^3/6 + a_j l + m^3/6 - a_j m) / (2 pi i (l - m)).
    Pairs on the same contour vanish identically.
    """
    cfg = cfg or ContourDetConfig()
    ends = np.array(I.endpoints)
    if I.bounded and np.all(ends[0::2] == ends[1::2]):
        return 1.0 + 0j
    xmax = float(np.max(np.abs(ends)))
    gr, gl = airy_contour_quadratures(cfg.kernel, xmax)
    zr, zl = gr.nodes, gl.nodes
    rl = np.exp(zr[:, None] ** 3 / 6 - zl[None, :] ** 3 / 6) / (zr[:, None] - zl[None, :]) / TWO_PI_I
    half = np.exp(-zl[:, None] ** 3 / 6 + zr[None, :] ** 3 / 6)
    lr = half * _signed_exp_sum(ends, zl, zr) / (zl[:, None] - zr[None, :]) / TWO_PI_I
    return _contour_det({(0, 1): rl, (1, 0): lr}, [gr, gl])


def contour_det_pearcey(I: IntervalUnion, tau: float, cfg: ContourDetConfig | None = None) -> float:
    """Real part of :func:`contour_det_pearcey_complex`, after checking the imaginary residue."""
    cfg = cfg or ContourDetConfig()
    return _finish(contour_det_pearcey_complex(I, tau, cfg), cfg.imag_tol)


def contour_det_pearcey_complex(I: IntervalUnion, tau: float, cfg: ContourDetConfig | None = None) -> complex:
    """det(Id - K~) for the Pearcey integrable kernel on gamma_L U gamma_R U iR.

    With Theta0(z) = z^4/4 - tau z^2/2: l on the rays, m on the axis gives
    exp((Theta0(l) - Theta0(m))/2) / (2 pi i (l - m)); l on the axis, m on the
    rays gives sum_j (-1)^(j+1) exp((Theta0(m) - Theta0(l))/2 + a_j (l - m)) / (2 pi i (l - m)).
    """
    _require_bounded(I)
    cfg = cfg or ContourDetConfig()
    ends = np.array(I.endpoints)
    if np.all(ends[0::2] == ends[1::2]):
        return 1.0 + 0j
    gr, gl, ax = pearcey_contour_quadratures(float(tau), cfg.kernel)
    rays = ComplexQuadrature.concatenate([gl, gr])
    zg, zi = rays.nodes, ax.nodes
    t0 = lambda z: z ** 4 / 4 - tau * z ** 2 / 2
    gi = np.exp((t0(zg)[:, None] - t0(zi)[None, :]) / 2) / (zg[:, None] - zi[None, :]) / TWO_PI_I
    half = np.exp((t0(zg)[None, :] - t0(zi)[:, None]) / 2)
    ig = half * _signed_exp_sum(ends, zi, zg) / (zi[:, None] - zg[None, :]) / TWO_PI_I
    return _contour_det({(0, 1): gi, (1, 0): ig}, [rays, ax])


# ---------------------------------------------------------------- derivatives


def _resolvent_diagonal(kfun, rule: QuadratureRule, point: float) -> float:
    """R(b, b) for R = (Id - K)^-1 K, K restricted to the rule's support."""
    b = np.array([point])
    kbb = kfun(b, b)[0, 0]
    if not len(rule):
        return float(kbb)
    x, w = rule.nodes, rule.weights
    kxx = kfun(x, x)
    kcol = kfun(x, b)[:, 0]
    krow = kfun(b, x)[0]
    a = np.eye(x.size) - kxx * w[None, :]
    cond = _condition(a)
    if cond > 1e12:
        raise SingularOperatorError(f"Id - K nearly singular (cond {cond:.2e})", cond)
    r = np.linalg.solve(a, kcol)
    return float(kbb + np.dot(krow * w, r))


def log_det_param_derivative(route: str, I: IntervalUnion, params: dict | None = None,
                             which_param: str = "a0", cfg: NystromConfig | None = None,
                             kernel_cfg: PearceyKernelConfig | None = None) -> float:
    """Derivative of log det(Id - K chi_I) with respect to one parameter.

    ``route`` is ``"airy"`` or ``"pearcey"``. ``which_param`` is ``"a<k>"`` for
    the k-th endpoint (0-based) or ``"tau"`` (Pearcey only); ``params`` holds
    ``{"tau": ...}`` for Pearcey. Endpoint motion contributes
    ``(-1)^k R(a_k, a_k)``; the ``tau`` derivative is ``-Tr((Id - K)^-1 dK)``.
    """
    params = dict(params or {})
    if route == "airy":
        cfg = cfg or AIRY_NYSTROM
        kfun = airy_kernel_matrix
    elif route == "pearcey":
        _require_bounded(I)
        cfg = cfg or PEARCEY_NYSTROM
        if "tau" not in params:
            raise ConfigurationError("Pearcey derivative needs params['tau']")
        tau = float(params["tau"])
        kcfg = kernel_cfg or PearceyKernelConfig()
        kfun = lambda x, y: pearcey_kernel_matrix(x, y, tau, kcfg)
    else:
        raise ConfigurationError(f"unknown route {route!r}")
    rule = cfg.rule(I)
    if which_param == "tau":
        if route != "pearcey":
            raise ConfigurationError("tau derivative exists only for the Pearcey kernel")
        if not len(rule):
            return 0.0
        sw = np.sqrt(rule.weights)
        m = sw[:, None] * kfun(rule.nodes, rule.nodes) * sw[None, :]
        dk = sw[:, None] * pearcey_kernel_tau_derivative_matrix(rule.nodes, rule.nodes, tau, kcfg) * sw[None, :]
        a = np.eye(m.shape[0]) - m
        cond = _condition(a)
        if cond > 1e12:
            raise SingularOperatorError(f"Id - K nearly singular (cond {cond:.2e})", cond)
        return float(-np.trace(np.linalg.solve(a, dk)))
    if not which_param.startswith("a"):
        raise ConfigurationError(f"unknown parameter {which_param!r}")
    k = int(which_param[1:])
    if not 0 <= k < len(I.endpoints):
        raise ConfigurationError(f"endpoint index {k} out of range")
    sign = 1.0 if k % 2 == 0 else -1.0
    return sign * _resolvent_diagonal(kfun, rule, I.endpoints[k])
