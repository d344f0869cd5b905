"""Point and matrix evaluation of the Airy, Pearcey and general (1, p) kernels.

Routes
------
Airy
    ``closed_form``: (Ai(x)Ai'(y) - Ai(y)Ai'(x)) / (x - y) with a Taylor
    expansion near the diagonal.
    ``double_contour``: tensor quadrature of
    (2 pi i)^-2 int_{gamma_R} dm int_{gamma_L} dl exp(th_x(m) - th_y(l)) / (l - m).
Pearcey
    ``double_contour``: the same with the quartic phase, m on gamma_L U gamma_R
    and l on the imaginary axis.
    ``t_integral``: writing 1/(l - m) as a one-sided Laplace integral (Re(l - m)
    has a fixed sign between the axis and each ray) gives
    K(x, y) = int_0^inf [phi_L(x - t) psi(y - t) - phi_R(x + t) psi(y + t)] dt
    with the single-contour functions of :mod:`fredgap.special`.
"""

from __future__ import annotations

import math
import threading
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from .contours import (ComplexQuadrature, airy_contours, discretize_contour,
                       pearcey_contours)
from .errors import ConfigurationError, DomainError, TruncationError
from .phases import PhaseSpec, eval_phase
from .quadrature import affine_map, gauss_legendre_rule
from .special import (PearceyContourConfig, PearceyFunctionTable, airy_values,
                      pearcey_phi_left, pearcey_phi_right, pearcey_psi)

TWO_PI_I = 2j * math.pi

# Overall sign of the t-integral route. The Laplace representation fixes it at
# +1; ``calibrate_t_integral_sign`` re-derives it against the double contour.
T_INTEGRAL_SIGN = 1.0

# ---------------------------------------------------------------- Airy


def _airy_near_diagonal(x, y):
    m = 0.5 * (x + y)
    d = 0.5 * (x - y)
    a0, a1 = airy_values(m)
    return a1 * a1 - m * a0 * a0 + d * d * (-2 * m * m * a0 * a0 / 3 + a0 * a1 / 3 + 2 * m * a1 * a1 / 3)


def airy_kernel(x, y, diagonal_gap: float = 1e-4):
    """Closed-form Airy kernel, broadcasting over ``x`` and ``y``."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    ax, apx = airy_values(x)
    ay, apy = airy_values(y)
    near = np.abs(x - y) < diagonal_gap
    with np.errstate(divide="ignore", invalid="ignore"):
        k = (ax * apy - ay * apx) / (x - y)
    if np.any(near):
        k = np.where(near, _airy_near_diagonal(x, y), k)
    return k if k.ndim else float(k)


def airy_kernel_matrix(x, y=None, diagonal_gap: float = 1e-4) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    y = x if y is None else np.asarray(y, dtype=float).ravel()
    ax, apx = airy_values(x)
    ay, apy = (ax, apx) if y is x else airy_values(y)
    diff = x[:, None] - y[None, :]
    near = np.abs(diff) < diagonal_gap
    with np.errstate(divide="ignore", invalid="ignore"):
        k = (ax[:, None] * apy[None, :] - ay[None, :] * apx[:, None]) / diff
    if np.any(near):
        i, j = np.nonzero(near)
        k[i, j] = _airy_near_diagonal(x[i], y[j])
    return k


@dataclass(frozen=True)
class ContourKernelConfig:
    """Discretization of the double-contour representations."""

    vertex: float = 1.0
    order: int = 40
    panels: int = 4
    truncation: float | None = None
    truncation_tol: float = 1e-16
    imag_tol: float = 1e-10

    def refined(self) -> "ContourKernelConfig":
        return ContourKernelConfig(self.vertex, 2 * self.order, self.panels, self.truncation,
                                   self.truncation_tol, self.imag_tol)


def _double_contour(mu: ComplexQuadrature, lam: ComplexQuadrature, spec: PhaseSpec, x, y, imag_tol):
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    th_mu = eval_phase(spec.with_shift(0.0), mu.nodes)
    th_lam = eval_phase(spec.with_shift(0.0), lam.nodes)
    e1 = np.exp(th_mu[None, :] - np.outer(x, mu.nodes)) * mu.weights
    e2 = np.exp(-th_lam[None, :] + np.outer(y, lam.nodes)) * lam.weights
    cauchy = 1.0 / (lam.nodes[None, :] - mu.nodes[:, None])
    k = (e1 @ cauchy @ e2.T) / TWO_PI_I ** 2
    bound = (np.abs(e1) @ np.abs(cauchy) @ np.abs(e2).T) / (4 * math.pi ** 2)
    bad = np.abs(k.imag) > imag_tol * np.maximum(np.abs(k), bound)
    if np.any(bad):
        raise TruncationError("double-contour kernel has a large imaginary part",
                              float(np.max(np.abs(k.imag))))
    return k.real


def _check_cut(quad: ComplexQuadrature, logmag, tol):
    if quad.cut_points:
        quad.check_truncation(logmag, tol)


def airy_contour_quadratures(cfg: ContourKernelConfig, xmax: float = 5.0):
    trunc = cfg.truncation or max(8.0, 3.0 * math.sqrt(1.0 + xmax))
    right, left = airy_contours(cfg.vertex)
    return (discretize_contour(right, cfg.order, cfg.panels, trunc),
            discretize_contour(left, cfg.order, cfg.panels, trunc))


def airy_kernel_contour_matrix(x, y=None, cfg: ContourKernelConfig | None = None) -> np.ndarray:
    cfg = cfg or ContourKernelConfig()
    x = np.asarray(x, dtype=float).ravel()
    y = x if y is None else np.asarray(y, dtype=float).ravel()
    xmax = float(max(np.max(np.abs(x), initial=0.0), np.max(np.abs(y), initial=0.0)))
    mu, lam = airy_contour_quadratures(cfg, xmax)
    spec = PhaseSpec.airy()
    _check_cut(mu, lambda z: np.real(z ** 3 / 3) + xmax * np.abs(z.real), cfg.truncation_tol)
    _check_cut(lam, lambda z: -np.real(z ** 3 / 3) + xmax * np.abs(z.real), cfg.truncation_tol)
    return _double_contour(mu, lam, spec, x, y, cfg.imag_tol)


def airy_kernel_contour(x: float, y: float, cfg: ContourKernelConfig | None = None) -> float:
    """Airy kernel from its double-contour integral (real part)."""
    return float(airy_kernel_contour_matrix([x], [y], cfg)[0, 0])


# ---------------------------------------------------------------- Pearcey


@dataclass(frozen=True)
class PearceyKernelConfig:
    """Settings for both Pearcey routes.

    ``t_panel``/``t_order`` discretize the t-integral on ``[0, max|x| + t_extra]``.
    With ``use_table`` the single-contour functions are read from Chebyshev
    panel tables (``table_width``, ``table_order``) built once per ``tau`` and
    argument range; otherwise they are evaluated directly at every t-node.
    """

    route: str = "t_integral"
    t_panel: float = 1.0
    t_order: int = 30
    t_extra: float = 16.0
    use_table: bool = True
    table_width: float = 0.25
    table_order: int = 24
    functions: PearceyContourConfig = field(default_factory=PearceyContourConfig)
    contour: ContourKernelConfig = field(default_factory=ContourKernelConfig)

    def __post_init__(self):
        if self.route not in ("t_integral", "double_contour"):
            raise ConfigurationError(f"unknown Pearcey route {self.route!r}")
        if self.t_panel <= 0 or self.t_extra <= 0:
            raise ConfigurationError("t-integral panel and extent must be positive")


_TABLES: "OrderedDict" = OrderedDict()
_TABLE_CACHE_SIZE = 32
_TABLE_LOCK = threading.Lock()


def _table(tau, lo, hi, cfg: PearceyKernelConfig, names):
    key = (float(tau), lo, hi, cfg.table_width, cfg.table_order, cfg.functions, names)
    with _TABLE_LOCK:
        tab = _TABLES.get(key)
        if tab is not None:
            _TABLES.move_to_end(key)
            return tab
    tab = PearceyFunctionTable.on_panels(tau, lo, hi, cfg.table_width, cfg.table_order, names, cfg.functions)
    with _TABLE_LOCK:
        _TABLES[key] = tab
        while len(_TABLES) > _TABLE_CACHE_SIZE:
            _TABLES.popitem(last=False)
    return tab


def clear_table_cache():
    _TABLES.clear()


def _function_source(tau, lo_arg, hi_arg, cfg: PearceyKernelConfig, names):
    """Callable name -> f(z) for the requested functions on [lo_arg, hi_arg]."""
    if cfg.use_table:
        tab = _table(tau, math.floor(lo_arg) - 1.0, math.ceil(hi_arg) + 1.0, cfg, tuple(names))
        return tab
    direct = {
        "phi_R": lambda z: pearcey_phi_right(z, tau, 0, cfg.functions),
        "phi_L": lambda z: pearcey_phi_left(z, tau, 0, cfg.functions),
        "psi": lambda z: pearcey_psi(z, tau, 0, cfg.functions),
        "phi_R1": lambda z: pearcey_phi_right(z, tau, 1, cfg.functions),
        "phi_L1": lambda z: pearcey_phi_left(z, tau, 1, cfg.functions),
        "psi1": lambda z: pearcey_psi(z, tau, 1, cfg.functions),
    }
    return lambda name, z: direct[name](z)


def _t_rule(extent, cfg: PearceyKernelConfig):
    m = max(1, math.ceil(extent / cfg.t_panel))
    base = gauss_legendre_rule(cfg.t_order)
    edges = np.linspace(0.0, extent, m + 1)
    parts = [affine_map(base, a, b) for a, b in zip(edges[:-1], edges[1:])]
    return np.concatenate([p.nodes for p in parts]), np.concatenate([p.weights for p in parts])


def _pearcey_t_integral(x, y, tau, cfg: PearceyKernelConfig):
    xmax = float(max(np.max(np.abs(x)), np.max(np.abs(y))))
    extent = math.ceil(xmax) + cfg.t_extra
    t, w = _t_rule(extent, cfg)
    f = _function_source(tau, -xmax - extent, xmax + extent, cfg, ("phi_R", "phi_L", "psi"))
    a = f("phi_L", x[:, None] - t[None, :])
    c = f("phi_R", x[:, None] + t[None, :])
    b = f("psi", y[:, None] - t[None, :])
    d = f("psi", y[:, None] + t[None, :])
    return T_INTEGRAL_SIGN * ((a * w) @ b.T - (c * w) @ d.T)


def pearcey_contour_quadratures(tau: float, cfg: ContourKernelConfig):
    trunc = cfg.truncation or max(6.0, 2.0 * math.sqrt(1.0 + abs(tau)))
    right, left, axis = pearcey_contours(trunc, cfg.vertex)
    gr = discretize_contour(right, cfg.order, cfg.panels, trunc)
    gl = discretize_contour(left, cfg.order, cfg.panels, trunc)
    ax = discretize_contour(axis, cfg.order, max(cfg.panels, math.ceil(trunc)), trunc)
    return gr, gl, ax


def _pearcey_double_contour(x, y, tau, cfg: ContourKernelConfig):
    gr, gl, ax = pearcey_contour_quadratures(tau, cfg)
    xmax = float(max(np.max(np.abs(x)), np.max(np.abs(y))))
    _check_cut(gr, lambda z: np.real(z ** 4 / 4 - tau * z ** 2 / 2) + xmax * np.abs(z.real), cfg.truncation_tol)
    # the axis is cut at finite length; its end magnitude is exp(-v^4/4 - tau v^2/2)
    v = np.max(np.abs(ax.nodes.imag))
    if math.exp(min(0.0, -v ** 4 / 4 - tau * v * v / 2 + 0.0)) > cfg.truncation_tol:
        raise TruncationError("imaginary-axis cut too short", math.exp(-v ** 4 / 4 - tau * v * v / 2))
    mu = ComplexQuadrature.concatenate([gl, gr])
    return _double_contour(mu, ax, PhaseSpec.pearcey(tau), x, y, cfg.imag_tol)


def pearcey_kernel_matrix(x, y=None, tau: float = 0.0, cfg: PearceyKernelConfig | None = None,
                          route: str | None = None) -> np.ndarray:
    """Pearcey kernel on the product grid ``x`` by ``y``."""
    cfg = cfg or PearceyKernelConfig()
    route = route or cfg.route
    x = np.asarray(x, dtype=float).ravel()
    y = x if y is None else np.asarray(y, dtype=float).ravel()
    if x.size == 0 or y.size == 0:
        return np.zeros((x.size, y.size))
    if route == "t_integral":
        return _pearcey_t_integral(x, y, float(tau), cfg)
    if route == "double_contour":
        return _pearcey_double_contour(x, y, float(tau), cfg.contour)
    raise ConfigurationError(f"unknown Pearcey route {route!r}")


def pearcey_kernel(x: float, y: float, tau: float, route: str = "t_integral",
                   cfg: PearceyKernelConfig | None = None) -> float:
    return float(pearcey_kernel_matrix([x], [y], tau, cfg, route)[0, 0])


def pearcey_kernel_tau_derivative_matrix(x, y=None, tau: float = 0.0,
                                         cfg: PearceyKernelConfig | None = None) -> np.ndarray:
    """d/dtau of the Pearcey kernel.

    Differentiating the phase under the integral cancels the Cauchy factor,
    leaving the rank-two form (Phi0(x) Psi1(y) + Phi1(x) Psi0(y)) / 2, where
    PhiK sums phi_R^k and phi_L^k and PsiK is psi^k.
    """
    cfg = cfg or PearceyKernelConfig()
    x = np.asarray(x, dtype=float).ravel()
    y = x if y is None else np.asarray(y, dtype=float).ravel()
    fc = cfg.functions
    phi0 = pearcey_phi_right(x, tau, 0, fc) + pearcey_phi_left(x, tau, 0, fc)
    phi1 = pearcey_phi_right(x, tau, 1, fc) + pearcey_phi_left(x, tau, 1, fc)
    psi0 = pearcey_psi(y, tau, 0, fc)
    psi1 = pearcey_psi(y, tau, 1, fc)
    return 0.5 * (np.outer(phi0, psi1) + np.outer(phi1, psi0))


def calibrate_t_integral_sign(tau: float = 1.0, cfg: PearceyKernelConfig | None = None) -> float:
    """Ratio sign of the t-integral route to the double contour at (0, 0, tau).

    Raises if the two routes differ by more than 1e-8 in magnitude.
    """
    cfg = cfg or PearceyKernelConfig()
    global T_INTEGRAL_SIGN
    saved = T_INTEGRAL_SIGN
    try:
        T_INTEGRAL_SIGN = 1.0
        kt = pearcey_kernel(0.0, 0.0, tau, "t_integral", cfg)
    finally:
        T_INTEGRAL_SIGN = saved
    kd = pearcey_kernel(0.0, 0.0, tau, "double_contour", cfg)
    if abs(abs(kt) - abs(kd)) > 1e-8 * abs(kd):
        raise ConfigurationError(f"t-integral and double contour disagree in magnitude: {kt} vs {kd}")
    return math.copysign(1.0, kt * kd)


# ---------------------------------------------------------------- general (1, p)


def general_p_kernel_matrix(spec: PhaseSpec, x, y=None, contours=None,
                            cfg: ContourKernelConfig | None = None) -> np.ndarray:
    """Double-contour kernel for the phase family of degree ``p + 1``.

    ``contours`` is a pair ``(mu_quadrature, lambda_quadrature)``; it may be
    omitted for p = 2 (Airy contours) and p = 3 (Pearcey contours).
    """
    cfg = cfg or ContourKernelConfig()
    x = np.asarray(x, dtype=float).ravel()
    y = x if y is None else np.asarray(y, dtype=float).ravel()
    if contours is None:
        if spec.degree == 2:
            xmax = float(max(np.max(np.abs(x)), np.max(np.abs(y))))
            contours = airy_contour_quadratures(cfg, xmax)
        elif spec.degree == 3:
            gr, gl, ax = pearcey_contour_quadratures(spec.deformation[0], cfg)
            contours = (ComplexQuadrature.concatenate([gl, gr]), ax)
        else:
            raise ConfigurationError(f"degree p={spec.degree} needs explicit contours")
    mu, lam = contours
    if np.min(np.abs(mu.nodes[:, None] - lam.nodes[None, :])) == 0:
        raise DomainError("the two contours intersect")
    return _double_contour(mu, lam, spec, x, y, cfg.imag_tol)


def general_p_kernel(spec: PhaseSpec, x: float, y: float, contours=None,
                     cfg: ContourKernelConfig | None = None) -> float:
    return float(general_p_kernel_matrix(spec, [x], [y], contours, cfg)[0, 0])


# ---------------------------------------------------------------- handle


@dataclass(frozen=True)
class KernelHandle:
    """A kernel family with its parameters and evaluation route."""

    family: str
    route: str
    tau: float = 0.0
    spec: PhaseSpec | None = None
    pearcey: PearceyKernelConfig = field(default_factory=PearceyKernelConfig)
    contour: ContourKernelConfig = field(default_factory=ContourKernelConfig)

    _ROUTES = {"airy": ("closed_form", "double_contour"),
               "pearcey": ("double_contour", "t_integral"),
               "general": ("double_contour",)}

    def __post_init__(self):
        routes = self._ROUTES.get(self.family)
        if routes is None:
            raise ConfigurationError(f"unknown kernel family {self.family!r}")
        if self.route not in routes:
            raise ConfigurationError(f"route {self.route!r} not available for {self.family}")
        if self.family == "general" and self.spec is None:
            raise ConfigurationError("general kernels need a PhaseSpec")

    @classmethod
    def airy(cls, route: str = "closed_form", **kw) -> "KernelHandle":
        return cls("airy", route, **kw)

    @classmethod
    def pearcey_kernel(cls, tau: float, route: str = "t_integral", **kw) -> "KernelHandle":
        return cls("pearcey", route, tau=float(tau), **kw)

    def matrix(self, x, y=None) -> np.ndarray:
        if self.family == "airy":
            if self.route == "closed_form":
                return airy_kernel_matrix(x, y)
            return airy_kernel_contour_matrix(x, y, self.contour)
        if self.family == "pearcey":
            return pearcey_kernel_matrix(x, y, self.tau, self.pearcey, self.route)
        return general_p_kernel_matrix(self.spec, x, y, None, self.contour)

    def __call__(self, x: float, y: float) -> float:
        return float(self.matrix([x], [y])[0, 0])
