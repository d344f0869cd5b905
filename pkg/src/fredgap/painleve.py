"""Hastings-McLeod solution of q'' = 2 q^3 + s q and the Tracy-Widom log gap.

The state (q, q', p, F) is integrated downward from ``s_max`` with

    p' = -q^2,   F' = -p,

seeded by the Airy function, for which the tails are known in closed form:
p(s_max) = int_{s_max}^inf Ai^2 and F(s_max) = int_{s_max}^inf (x - s_max) Ai^2.
Then p(s) = int_s^inf q^2 and F(s) = int_s^inf (x - s) q^2, so the Airy gap
probability on [s, inf) is exp(-F(s)) and its log-derivative is p(s).

A Chebyshev collocation solver with Newton iteration is included as an
independent oracle for the shooting result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ConfigurationError, ConvergenceError, DomainError
from .special import AIRY_RANGE, airy_square_tail, airy_values

BLOWUP = 1e3


@dataclass(frozen=True)
class PainleveConfig:
    rtol: float = 1e-13
    atol: float = 1e-30
    grid_step: float = 0.01

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0 or self.grid_step <= 0:
            raise ConfigurationError("tolerances and grid step must be positive")


@dataclass(frozen=True)
class HastingsMcLeodSolution:
    """Grids of q, q', p, F on [s_min, s_max] plus the integrator's dense output."""

    s_grid: np.ndarray
    q: np.ndarray
    q_prime: np.ndarray
    p: np.ndarray
    F: np.ndarray
    dense: object

    @property
    def s_min(self) -> float:
        return float(self.s_grid[0])

    @property
    def s_max(self) -> float:
        return float(self.s_grid[-1])

    def _check(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(s < self.s_min - 1e-12) or np.any(s > self.s_max + 1e-12):
            raise DomainError(f"s outside the solution grid [{self.s_min}, {self.s_max}]")
        return np.clip(s, self.s_min, self.s_max)

    def state(self, s):
        """(q, q', p, F) at ``s`` from the dense output (order-7 interpolant)."""
        return self.dense(self._check(s))

    def ode_residual(self, s, h: float = 1e-3) -> np.ndarray:
        """|q'' - 2 q^3 - s q| with q'' from a fourth-order difference of q'."""
        s = self._check(s)
        if np.any(s - 2 * h < self.s_min) or np.any(s + 2 * h > self.s_max):
            raise DomainError("residual points must be interior")
        qp = lambda t: self.dense(t)[1]
        q2 = (qp(s - 2 * h) - 8 * qp(s - h) + 8 * qp(s + h) - qp(s + 2 * h)) / (12 * h)
        q = self.dense(s)[0]
        return np.abs(q2 - 2 * q ** 3 - s * q)


def _rhs(s, u):
    q, qp, p, _ = u
    return [qp, 2 * q ** 3 + s * q, -q * q, -p]


def hastings_mcleod_solve(s_min: float = -8.0, s_max: float = 8.0,
                          cfg: PainleveConfig | None = None) -> HastingsMcLeodSolution:
    """Shoot downward from ``s_max`` with Airy initial data (DOP853).

    The branch is unstable to the left: a relative error e in the seed grows
    roughly like e exp((2 sqrt(2)/3) |s|^(3/2)). In double precision q is good
    to about 1e-12 for s >= -4 and 1e-7 near s = -8; the relaxation solver is
    the better tool further left.
    """
    cfg = cfg or PainleveConfig()
    if s_max < 8.0 or s_max > AIRY_RANGE:
        raise DomainError(f"s_max must lie in [8, {AIRY_RANGE}]")
    if s_min < -8.0:
        raise DomainError("s_min below -8 is outside the certified shooting range")
    if not s_min < s_max:
        raise DomainError("need s_min < s_max")
    ai, aip = airy_values(np.array(s_max))
    p0, f0 = airy_square_tail(np.array(s_max))
    u0 = [float(ai), float(aip), float(p0), float(f0)]

    def blowup(s, u):
        return BLOWUP - abs(u[0])
    blowup.terminal = True

    sol = solve_ivp(_rhs, (s_max, s_min), u0, method="DOP853", rtol=cfg.rtol, atol=cfg.atol,
                    dense_output=True, events=blowup)
    if sol.status == 1:
        raise ConvergenceError(f"|q| exceeded {BLOWUP:g} at s = {sol.t_events[0][0]:.6f}; "
                               "left the Hastings-McLeod branch")
    if sol.status != 0:
        raise ConvergenceError(f"integration failed: {sol.message}")
    n = max(2, int(round((s_max - s_min) / cfg.grid_step)) + 1)
    grid = np.linspace(s_min, s_max, n)
    q, qp, p, f = sol.sol(grid)
    return HastingsMcLeodSolution(grid, q, qp, p, f, sol.sol)


def tw_log_gap(s, hm: HastingsMcLeodSolution):
    """log det(Id - K_Ai on [s, inf)) = -int_s^inf (x - s) q(x)^2 dx.

    Beyond ``s_max`` the Airy tail formula is used (q and Ai differ there by
    terms of order Ai^3).
    """
    s = np.asarray(s, dtype=float)
    beyond = s > hm.s_max
    inside = np.where(beyond, hm.s_max, s)
    val = -hm.state(inside)[3]
    if np.any(beyond):
        val = np.where(beyond, -airy_square_tail(np.minimum(s, AIRY_RANGE))[1], val)
    return float(val) if val.ndim == 0 else val


def p_of_s(s, hm: HastingsMcLeodSolution):
    """p(s) = int_s^inf q^2, the s-derivative of :func:`tw_log_gap`."""
    val = hm.state(s)[2]
    return float(val) if np.ndim(val) == 0 else val


# ---------------------------------------------------------------- relaxation oracle


def chebyshev_differentiation(n: int):
    """Chebyshev points x_j = cos(pi j / n) and the first-derivative matrix."""
    j = np.arange(n + 1)
    x = np.cos(np.pi * j / n)
    c = np.where((j == 0) | (j == n), 2.0, 1.0) * (-1.0) ** j
    dx = x[:, None] - x[None, :]
    d = np.outer(c, 1.0 / c) / (dx + np.eye(n + 1))
    d -= np.diag(d.sum(axis=1))
    return x, d


def _left_asymptotic(s):
    return math.sqrt(-s / 2) * (1 + 1 / (8 * s ** 3) - 73 / (128 * s ** 6))


@dataclass(frozen=True)
class RelaxationResult:
    s: np.ndarray
    q: np.ndarray
    newton_steps: int

    def __call__(self, t: float) -> float:
        """Barycentric interpolation on the Chebyshev points."""
        n = self.s.size - 1
        w = (-1.0) ** np.arange(n + 1)
        w[0] *= 0.5
        w[-1] *= 0.5
        diff = t - self.s
        hit = np.nonzero(diff == 0)[0]
        if hit.size:
            return float(self.q[hit[0]])
        c = w / diff
        return float(np.dot(c, self.q) / c.sum())


def hastings_mcleod_relaxation(s_min: float = -8.0, s_max: float = 8.0, n: int = 160,
                               tol: float = 1e-13, max_iter: int = 50) -> RelaxationResult:
    """Boundary-value solve by collocation at Chebyshev points plus Newton.

    Boundary data: the Airy value at ``s_max`` and the three-term asymptotic
    expansion of q at ``s_min``. The initial guess is a smooth blend of the two
    asymptotic regimes, independent of the shooting solution.
    """
    if s_min >= -2 or s_max <= 2:
        raise DomainError("relaxation interval must straddle the transition region")
    x, d = chebyshev_differentiation(n)
    half = 0.5 * (s_max - s_min)
    s = s_min + half * (x + 1.0)
    d1 = d / half
    d2 = d1 @ d1
    q = np.sqrt(np.log1p(np.exp(-s)) / 2)
    right = float(airy_values(np.array(s_max))[0])
    left = _left_asymptotic(s_min)
    ib = [int(np.argmax(s)), int(np.argmin(s))]
    for it in range(1, max_iter + 1):
        f = d2 @ q - 2 * q ** 3 - s * q
        jac = d2 - np.diag(6 * q ** 2 + s)
        f[ib[0]] = q[ib[0]] - right
        f[ib[1]] = q[ib[1]] - left
        for i in ib:
            jac[i] = 0.0
            jac[i, i] = 1.0
        step = np.linalg.solve(jac, f)
        q = q - step
        if np.max(np.abs(step)) < tol:
            order = np.argsort(s)
            return RelaxationResult(s[order], q[order], it)
    raise ConvergenceError("Newton iteration for the relaxation oracle did not converge")
