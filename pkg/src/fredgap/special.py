"""Airy function and the one-dimensional Pearcey contour integrals.

Both are computed by Gauss-Legendre quadrature along steepest-descent-like
contours. For a real argument the integrands satisfy ``f(conj z) = conj f(z)``
on conjugation-symmetric paths, so only the upper half of each path is summed
and the result is read off as an imaginary part.

Pearcey functions (right contour downward, left contour its negative,
vertical line upward, ``Theta_x(m) = m^4/4 - tau m^2/2 - x m``)::

    phi_R^k(x) = (1/2 pi i) int_{gamma_R} m^k exp(Theta_x(m)) dm
    phi_L^k(x) = (1/2 pi i) int_{gamma_L} m^k exp(Theta_x(m)) dm = -(-1)^k phi_R^k(-x)
    psi^k(y)   = (1/2 pi i) int_{Re l = c} l^k exp(-Theta_y(l)) dl

Each argument gets its own contour vertex: among the real parts of the phase's
saddle points (and 0) the one whose ray keeps the integrand smallest is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .contours import doubling_edges, graded_edges
from .errors import ConfigurationError, DomainError
from .phases import pearcey_saddles
from .quadrature import affine_map, gauss_legendre_rule

AIRY_RANGE = 30.0
_CHUNK = 20000


def _panel_nodes(edges, order):
    base = gauss_legendre_rule(order)
    parts = [affine_map(base, a, b) for a, b in zip(edges[:-1], edges[1:])]
    return np.concatenate([p.nodes for p in parts]), np.concatenate([p.weights for p in parts])


# ---------------------------------------------------------------- Airy

@dataclass(frozen=True)
class AiryValue:
    ai: float
    ai_prime: float
    argument: float


_AIRY_RAY = _panel_nodes(graded_edges(10.0, 5), 40)
_AIRY_SEG = _panel_nodes(np.linspace(0.0, 1.0, 17), 24)
_D3 = np.exp(1j * math.pi / 3)


def _airy_chunk(x):
    ai = np.empty(x.size)
    aip = np.empty(x.size)
    r, wr = _AIRY_RAY
    u = r * _D3
    pos = x >= 0
    if np.any(pos):
        # ray from the saddle sqrt(x); Theta(v + u) - Theta(v) = v u^2 + u^3/3
        xp = x[pos]
        v = np.sqrt(xp)[:, None]
        e = np.exp(v * u ** 2 + u ** 3 / 3) * (_D3 * wr)
        scale = np.exp(-2.0 / 3.0 * xp ** 1.5)
        ai[pos] = scale * np.imag(e.sum(1)) / math.pi
        aip[pos] = -scale * np.imag((e * (v + u)).sum(1)) / math.pi
    neg = ~pos
    if np.any(neg):
        xn = x[neg]
        v = np.sqrt(-xn)[:, None]
        # vertical piece 0 -> i v (unimodular integrand)
        s, ws = _AIRY_SEG
        z = 1j * v * s
        ev = np.exp(1j * v ** 3 * (s - s ** 3 / 3)) * (1j * v * ws)
        # ray from the saddle i v at angle pi/3
        ph = np.exp(1j * 2.0 / 3.0 * v ** 3)
        er = ph * np.exp(1j * v * u ** 2 + u ** 3 / 3) * (_D3 * wr)
        ai[neg] = np.imag(ev.sum(1) + er.sum(1)) / math.pi
        aip[neg] = -np.imag((ev * z).sum(1) + (er * (1j * v + u)).sum(1)) / math.pi
    return ai, aip


def airy_values(x):
    """Vectorized (Ai(x), Ai'(x)) for real ``x``; no range check.

    Accurate on the same range as :func:`airy_ai`; large positive arguments
    underflow gracefully to zero.
    """
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    ai = np.empty(flat.size)
    aip = np.empty(flat.size)
    for i in range(0, flat.size, _CHUNK):
        ai[i:i + _CHUNK], aip[i:i + _CHUNK] = _airy_chunk(flat[i:i + _CHUNK])
    return ai.reshape(x.shape), aip.reshape(x.shape)


def airy_ai(x: float) -> AiryValue:
    """Ai and Ai' at a real point with ``|x| <= 30``."""
    x = float(x)
    if not math.isfinite(x) or abs(x) > AIRY_RANGE:
        raise DomainError(f"airy_ai supports |x| <= {AIRY_RANGE}, got {x}")
    a, ap = _airy_chunk(np.array([x]))
    return AiryValue(float(a[0]), float(ap[0]), x)


def airy_square_tail(s):
    """Exact tails of Ai^2 beyond ``s``.

    Returns ``(int_s^inf Ai^2, int_s^inf (x - s) Ai^2)`` from the closed forms
    ``Ai'^2 - s Ai^2`` and ``(2 s^2 Ai^2 - 2 s Ai'^2 - Ai Ai') / 3``.
    """
    a, ap = airy_values(s)
    s = np.asarray(s, dtype=float)
    return ap * ap - s * a * a, (2 * s * s * a * a - 2 * s * ap * ap - a * ap) / 3.0


# ---------------------------------------------------------------- Pearcey

@dataclass(frozen=True)
class PearceyContourConfig:
    """Quadrature used for the single-contour Pearcey functions."""

    ray_length: float = 10.0
    ray_first_panel: float = 0.5
    ray_order: int = 30
    line_length: float = 10.0
    line_panel: float = 0.5
    line_order: int = 20
    angle: float = math.pi / 4
    probe_samples: int = 41

    def __post_init__(self):
        if min(self.ray_length, self.ray_first_panel, self.line_length, self.line_panel) <= 0:
            raise ConfigurationError("contour lengths must be positive")

    def refined(self) -> "PearceyContourConfig":
        return PearceyContourConfig(self.ray_length, self.ray_first_panel, 2 * self.ray_order,
                                    self.line_length, self.line_panel / 2, self.line_order,
                                    self.angle, self.probe_samples)


class _PearceyQuadrature:
    def __init__(self, cfg: PearceyContourConfig):
        self.cfg = cfg
        self.dir = np.exp(1j * cfg.angle)
        self.r, self.wr = _panel_nodes(doubling_edges(cfg.ray_length, cfg.ray_first_panel), cfg.ray_order)
        m = max(1, math.ceil(cfg.line_length / cfg.line_panel))
        self.v, self.wv = _panel_nodes(np.linspace(0.0, cfg.line_length, m + 1), cfg.line_order)
        self.probe = np.linspace(0.0, cfg.ray_length, cfg.probe_samples)


_QUAD_CACHE: dict = {}


def _quad(cfg):
    q = _QUAD_CACHE.get(cfg)
    if q is None:
        q = _QUAD_CACHE[cfg] = _PearceyQuadrature(cfg)
    return q


def _theta(z, x, tau):
    z2 = z * z
    return z2 * z2 / 4 - tau * z2 / 2 - x * z


def _vertices(x, tau, sign, direction, probe):
    """Per-argument real vertex minimizing the ray's peak of Re(sign * Theta)."""
    cands = np.concatenate([pearcey_saddles(x, tau).real, np.zeros((x.size, 1))], axis=1)
    z = cands[:, :, None] + probe[None, None, :] * direction
    peak = np.max(sign * np.real(_theta(z, x[:, None, None], tau)), axis=2)
    return cands[np.arange(x.size), np.argmin(peak, axis=1)]


def _phi_r_chunk(x, tau, moment, q, log_scale):
    c = _vertices(x, tau, 1.0, q.dir, q.probe)
    z = c[:, None] + q.r[None, :] * q.dir
    e = _theta(z, x[:, None], tau)
    m = np.max(e.real, axis=1)
    f = np.exp(e - m[:, None])
    if moment:
        f = f * z ** moment
    val = -np.imag(f @ (q.dir * q.wr)) / math.pi
    return (val, m) if log_scale else (val * np.exp(m), np.zeros_like(m))


def _psi_chunk(y, tau, moment, q, log_scale):
    c = _vertices(y, tau, -1.0, 1j, q.probe)
    z = c[:, None] + 1j * q.v[None, :]
    e = -_theta(z, y[:, None], tau)
    m = np.max(e.real, axis=1)
    f = np.exp(e - m[:, None])
    if moment:
        f = f * z ** moment
    val = np.imag(f @ (1j * q.wv)) / math.pi
    return (val, m) if log_scale else (val * np.exp(m), np.zeros_like(m))


def _batched(chunk_fn, x, tau, moment, cfg, log_scale):
    cfg = cfg or PearceyContourConfig()
    q = _quad(cfg)
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    vals = np.empty(flat.size)
    logs = np.empty(flat.size)
    for i in range(0, flat.size, _CHUNK):
        vals[i:i + _CHUNK], logs[i:i + _CHUNK] = chunk_fn(flat[i:i + _CHUNK], float(tau), moment, q, log_scale)
    if log_scale:
        return vals.reshape(x.shape), logs.reshape(x.shape)
    return vals.reshape(x.shape)


def pearcey_phi_right(x, tau, moment=0, cfg=None, log_scale=False):
    """phi_R^k on an array of real arguments (see module docstring).

    With ``log_scale`` the pair ``(mantissa, log_factor)`` is returned, the value
    being ``mantissa * exp(log_factor)``.
    """
    return _batched(_phi_r_chunk, x, tau, moment, cfg, log_scale)


def pearcey_phi_left(x, tau, moment=0, cfg=None, log_scale=False):
    sign = -1.0 if moment % 2 == 0 else 1.0
    out = _batched(_phi_r_chunk, -np.asarray(x, dtype=float), tau, moment, cfg, log_scale)
    if log_scale:
        return sign * out[0], out[1]
    return sign * out


def pearcey_psi(y, tau, moment=0, cfg=None, log_scale=False):
    return _batched(_psi_chunk, y, tau, moment, cfg, log_scale)


# ---------------------------------------------------------------- tables

_FUNCS = {
    "phi_R": lambda x, tau, cfg: pearcey_phi_right(x, tau, 0, cfg),
    "phi_L": lambda x, tau, cfg: pearcey_phi_left(x, tau, 0, cfg),
    "psi": lambda x, tau, cfg: pearcey_psi(x, tau, 0, cfg),
    "phi_R1": lambda x, tau, cfg: pearcey_phi_right(x, tau, 1, cfg),
    "phi_L1": lambda x, tau, cfg: pearcey_phi_left(x, tau, 1, cfg),
    "psi1": lambda x, tau, cfg: pearcey_psi(x, tau, 1, cfg),
}


def _cheb_points(n):
    return np.cos(np.pi * np.arange(n) / (n - 1))[::-1]


def _cheb_weights(n):
    w = (-1.0) ** np.arange(n)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


@dataclass(frozen=True)
class PearceyFunctionTable:
    """Tabulated Pearcey functions at fixed ``tau``.

    Two layouts exist. A free grid (from :func:`pearcey_functions`) is
    interpolated with cubic splines. A panel grid (``panel_order`` set) holds
    Chebyshev points on equal panels of ``[lo, hi]`` and is interpolated by the
    barycentric formula on each panel, which keeps near machine accuracy.
    """

    tau: float
    grid: np.ndarray
    values: dict
    lo: float = 0.0
    hi: float = 0.0
    panel_order: int | None = None
    _splines: dict = field(default_factory=dict, compare=False, repr=False)

    def __call__(self, name: str, z):
        if name not in self.values:
            raise ConfigurationError(f"function {name!r} not tabulated")
        z = np.asarray(z, dtype=float)
        if self.panel_order is None:
            return self._spline(name)(z)
        return self._barycentric(name, z)

    def _spline(self, name):
        sp = self._splines.get(name)
        if sp is None:
            sp = self._splines[name] = CubicSpline(self.grid, self.values[name])
        return sp

    def _barycentric(self, name, z):
        n = self.panel_order
        npan = self.grid.size // n
        width = (self.hi - self.lo) / npan
        if np.any(z < self.lo - 1e-12) or np.any(z > self.hi + 1e-12):
            raise DomainError(f"argument outside table range [{self.lo}, {self.hi}]")
        flat = z.ravel()
        k = np.clip(np.floor((flat - self.lo) / width).astype(int), 0, npan - 1)
        s = 2.0 * (flat - (self.lo + k * width)) / width - 1.0
        pts = _cheb_points(n)
        w = _cheb_weights(n)
        vals = self.values[name].reshape(npan, n)[k]
        diff = s[:, None] - pts[None, :]
        hit = diff == 0.0
        diff[hit] = 1.0
        c = w / diff
        out = (c * vals).sum(1) / c.sum(1)
        rows, cols = np.nonzero(hit)
        out[rows] = vals[rows, cols]
        return out.reshape(z.shape)

    @classmethod
    def on_panels(cls, tau, lo, hi, width=0.25, order=24, names=("phi_R", "phi_L", "psi"), cfg=None):
        npan = max(1, math.ceil((hi - lo) / width))
        width = (hi - lo) / npan
        pts = _cheb_points(order)
        grid = (lo + width * (np.arange(npan)[:, None] + 0.5 * (pts[None, :] + 1.0))).ravel()
        values = {n: _FUNCS[n](grid, tau, cfg) for n in names}
        return cls(float(tau), grid, values, float(lo), float(hi), int(order))


def pearcey_functions(tau, x_grid, cfg=None, names=("phi_R", "phi_L", "psi")) -> PearceyFunctionTable:
    """Tabulate the Pearcey functions on an increasing grid (spline interpolation)."""
    g = np.asarray(x_grid, dtype=float)
    if g.ndim != 1 or g.size < 2 or not np.all(np.diff(g) > 0):
        raise ConfigurationError("x_grid must be a strictly increasing 1-d array with >= 2 points")
    values = {n: _FUNCS[n](g, tau, cfg) for n in names}
    return PearceyFunctionTable(float(tau), g, values, float(g[0]), float(g[-1]), None)
