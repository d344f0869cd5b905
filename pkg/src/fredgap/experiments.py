"""Numerical probes of the Pearcey gap probability.

* PDE residuals: g = log det(Id - K_P on [a, b]) is tabulated on a grid in
  E = (a+b)/2, W = (a-b)/2 and tau; central differences give every derivative
  appearing in three nonlinear PDEs, whose residuals should shrink like h^2.
* Factorization: on the scaling a_-+ = -+(2 L^9 - L s 3^(1/3)), tau = 3 L^6, the
  Pearcey gap splits into a product of two Tracy-Widom factors as L grows.
* Large tau: on a fixed interval log det decays like tau^(-1/2) exp(-tau^2/4).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ConvergenceError, DomainError, FredgapError
from .fredholm import PEARCEY_NYSTROM, NystromConfig, pearcey_log_gap
from .kernels import PearceyKernelConfig
from .painleve import HastingsMcLeodSolution, hastings_mcleod_solve, tw_log_gap
from .quadrature import IntervalUnion

CBRT3 = 3.0 ** (1.0 / 3.0)


# ---------------------------------------------------------------- stencils


def fornberg_weights(offsets, order: int) -> np.ndarray:
    """Finite-difference weights for the ``order``-th derivative at 0 (unit spacing)."""
    z = np.asarray(offsets, dtype=float)
    n = z.size
    if order >= n:
        raise ConfigurationError(f"{n} points cannot resolve derivative order {order}")
    c = np.zeros((n, order + 1))
    c[0, 0] = 1.0
    c1 = 1.0
    c4 = z[0]
    for i in range(1, n):
        mn = min(i, order)
        c2 = 1.0
        c5 = c4
        c4 = z[i]
        for j in range(i):
            c3 = z[i] - z[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order]


def central_stencil(order: int):
    """Smallest symmetric stencil of second-order accuracy for a derivative.

    Returns ``(offsets, weights)`` for unit spacing.
    """
    if order == 0:
        return np.array([0]), np.array([1.0])
    half = (order + 1) // 2
    offsets = np.arange(-half, half + 1)
    return offsets, fornberg_weights(offsets, order)


# ---------------------------------------------------------------- grid


@dataclass(frozen=True)
class PearceyGapGrid:
    """Values of g on a centred (E, W, tau) lattice, indexed [iE, iW, itau]."""

    center: tuple
    spacings: tuple
    counts: tuple
    values: np.ndarray

    @property
    def E0(self) -> float:
        return 0.5 * (self.center[0] + self.center[1])

    @property
    def W0(self) -> float:
        return 0.5 * (self.center[0] - self.center[1])

    @property
    def tau0(self) -> float:
        return float(self.center[2])

    def point(self, i: int, j: int, k: int):
        """(a, b, tau) of a lattice index."""
        return lattice_point(self.center, self.spacings, self.counts, i, j, k)


def lattice_point(center, spacings, counts, i, j, k):
    a0, b0, t0 = center
    hE, hW, ht = spacings
    E = 0.5 * (a0 + b0) + (i - (counts[0] - 1) // 2) * hE
    W = 0.5 * (a0 - b0) + (j - (counts[1] - 1) // 2) * hW
    tau = t0 + (k - (counts[2] - 1) // 2) * ht
    return E + W, E - W, tau


@dataclass(frozen=True)
class GridConfig:
    nystrom: NystromConfig = PEARCEY_NYSTROM
    kernel: PearceyKernelConfig = field(default_factory=PearceyKernelConfig)
    threads: int = 1

    def __post_init__(self):
        if self.threads < 1:
            raise ConfigurationError("thread count must be >= 1")


def pearcey_gap_grid(center, spacings, counts=(9, 5, 7), cfg: GridConfig | None = None) -> PearceyGapGrid:
    """Tabulate g(a, b, tau) = log det(Id - K_P on [a, b]) on a full lattice."""
    cfg = cfg or GridConfig()
    counts = tuple(int(c) for c in counts)
    if any(c < 1 or c % 2 == 0 for c in counts):
        raise ConfigurationError("grid counts must be odd and positive")
    if any(h <= 0 for h in spacings):
        raise ConfigurationError("grid spacings must be positive")
    nE, nW, nt = counts
    for j in range(nW):
        for i in (0, nE - 1):
            a, b, _ = lattice_point(center, spacings, counts, i, j, 0)
            if not a < b:
                raise DomainError(f"grid point with a >= b: ({a}, {b})")
    for k in range(nt):
        if lattice_point(center, spacings, counts, 0, 0, k)[2] <= 0:
            raise DomainError("tau must stay positive across the grid")

    def slice_values(k):
        out = np.empty((nE, nW))
        for i in range(nE):
            for j in range(nW):
                a, b, tau = lattice_point(center, spacings, counts, i, j, k)
                try:
                    out[i, j] = pearcey_log_gap(IntervalUnion.interval(a, b), tau, cfg.nystrom, cfg.kernel).log_det
                except FredgapError as exc:
                    raise ConvergenceError(f"grid point (a, b, tau) = ({a}, {b}, {tau}) failed: {exc}") from exc
        return out

    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            slices = list(pool.map(slice_values, range(nt)))
    else:
        slices = [slice_values(k) for k in range(nt)]
    values = np.stack(slices, axis=2)
    values.setflags(write=False)
    return PearceyGapGrid(tuple(float(c) for c in center), tuple(float(h) for h in spacings), counts, values)


# ---------------------------------------------------------------- residuals

# derivative orders (E, W, tau) used by the three equations and the shorter combination
DERIVATIVES = {
    "gE": (1, 0, 0), "gEE": (2, 0, 0), "gEEE": (3, 0, 0), "gE4": (4, 0, 0), "gE6": (6, 0, 0),
    "gt": (0, 0, 1), "gtt": (0, 0, 2), "gttt": (0, 0, 3),
    "gEt": (1, 0, 1), "gEEt": (2, 0, 1), "gEEEt": (3, 0, 1), "gEEtt": (2, 0, 2),
    "gW": (0, 1, 0), "gEW": (1, 1, 0), "gWt": (0, 1, 1), "gEEW": (2, 1, 0),
}


def stencil_derivative(values: np.ndarray, orders, spacings) -> float:
    """Mixed central difference at the centre of a 3-d tensor."""
    out = np.asarray(values, dtype=float)
    for axis, (k, h) in enumerate(zip(orders, spacings)):
        n = out.shape[0]
        c = (n - 1) // 2
        offsets, w = central_stencil(k)
        if c + offsets[-1] >= n or c + offsets[0] < 0:
            name = "EWt"[axis]
            raise ConfigurationError(f"derivative of order {k} in {name} needs {offsets.size} points, grid has {n}")
        vec = np.zeros(n)
        vec[c + offsets] = w / h ** k
        out = np.tensordot(vec, out, axes=(0, 0))
    return float(out)


def stencil_derivatives(grid: PearceyGapGrid) -> dict:
    return {name: stencil_derivative(grid.values, o, grid.spacings) for name, o in DERIVATIVES.items()}


@dataclass(frozen=True)
class PdeResiduals:
    r1: float
    r2: float
    r3: float
    r4: float
    derivatives: dict

    def as_tuple(self):
        return self.r1, self.r2, self.r3


def residuals_from_derivatives(d: dict, E: float, W: float, tau: float) -> PdeResiduals:
    """Evaluate the three PDEs and their shorter combination from derivative values."""
    g = d
    eps_gE = E * g["gEE"] + W * g["gEW"]
    eps_gt = E * g["gEt"] + W * g["gWt"]
    eps_gEE = E * g["gEEE"] + W * g["gEEW"]
    r1 = g["gE4"] + 6 * g["gEE"] ** 2 - 4 * tau * g["gEE"] + 12 * g["gtt"]
    r2 = (-3 * eps_gE - 2 * tau * g["gEt"] + 2 * g["gEEEt"] + g["gE"]
          + 12 * g["gEE"] * g["gEt"])
    r3 = (12 * eps_gt - 2 * eps_gEE
          + (8 * g["gtt"] + 4 * g["gEEt"] - 4 * g["gE4"] - 8 * g["gEE"] ** 2) * tau
          + 4 * g["gEE"] + 16 * g["gEE"] ** 3 + 8 * g["gEt"] * g["gEEE"] + 10 * g["gEEE"] ** 2
          + 16 * g["gE4"] * g["gEE"]
          + g["gE6"] - 16 * g["gttt"] + 4 * g["gEEtt"] - 24 * g["gEt"] ** 2
          - 8 * g["gEEt"] * g["gEE"] - 8 * g["gt"])
    r4 = (g["gE6"] - 8 * g["gt"]
          + 4 * tau * (2 * g["gttt"] - g["gE4"] - 2 * g["gEE"] ** 2)
          + 12 * eps_gt
          + 16 * g["gEE"] ** 3 + 4 * g["gEEtt"] - 24 * g["gEt"] ** 2
          + 16 * g["gE4"] * g["gEE"] + 10 * g["gEEE"] ** 2)
    return PdeResiduals(float(r1), float(r2), float(r3), float(r4), dict(d))


def pde_residuals(grid: PearceyGapGrid) -> PdeResiduals:
    """Residuals at the grid centre using second-order central differences."""
    return residuals_from_derivatives(stencil_derivatives(grid), grid.E0, grid.W0, grid.tau0)


@dataclass(frozen=True)
class RichardsonCheck:
    coarse: PdeResiduals
    fine: PdeResiduals
    h_coarse: float
    h_fine: float

    def ratios(self) -> dict:
        out = {}
        for name in ("r1", "r2", "r3", "r4"):
            c, f = getattr(self.coarse, name), getattr(self.fine, name)
            out[name] = abs(c) / abs(f) if f != 0 else math.inf
        return out

    def passed(self, name: str, window=(3.0, 5.0)) -> bool:
        r = self.ratios()[name]
        return window[0] <= r <= window[1]


def pde_richardson(center=(-1.0, 1.0, 1.0), h_coarse: float = 0.04, counts=(9, 5, 7),
                   cfg: GridConfig | None = None) -> RichardsonCheck:
    """Residuals at spacing h and h/2 around the same centre."""
    h_fine = h_coarse / 2
    coarse = pde_residuals(pearcey_gap_grid(center, (h_coarse,) * 3, counts, cfg))
    fine = pde_residuals(pearcey_gap_grid(center, (h_fine,) * 3, counts, cfg))
    return RichardsonCheck(coarse, fine, h_coarse, h_fine)


# ---------------------------------------------------------------- synthetic oracle


def synthetic_polynomial(degrees=(8, 3, 4)) -> np.ndarray:
    """Fixed coefficient tensor c[i, j, k] of a polynomial in (E, W, tau).

    Coefficients decay factorially so every derivative stays of order one.
    """
    i, j, k = np.indices(tuple(d + 1 for d in degrees))
    c = ((-1.0) ** (i + 2 * j + k) * (1 + (i * 7 + j * 3 + k * 5) % 11) / 11.0
         / np.vectorize(math.factorial)(np.maximum(i - 2, 0)))
    return c


def polynomial_grid(coeffs, center, spacings, counts=(9, 5, 7)) -> PearceyGapGrid:
    """Lattice of a polynomial in (E, W, tau) laid out like :func:`pearcey_gap_grid`."""
    counts = tuple(int(c) for c in counts)
    values = np.empty(counts)
    for idx in np.ndindex(*counts):
        a, b, tau = lattice_point(center, spacings, counts, *idx)
        values[idx] = np.polynomial.polynomial.polyval3d(0.5 * (a + b), 0.5 * (a - b), tau, coeffs)
    values.setflags(write=False)
    return PearceyGapGrid(tuple(float(c) for c in center), tuple(float(h) for h in spacings), counts, values)


def polynomial_derivatives(coeffs, E: float, W: float, tau: float) -> dict:
    """Exact values of every entry of :data:`DERIVATIVES` for a polynomial."""
    P = np.polynomial.polynomial
    out = {}
    for name, orders in DERIVATIVES.items():
        c = np.asarray(coeffs, dtype=float)
        for axis, k in enumerate(orders):
            if k:
                c = P.polyder(c, k, axis=axis)
        out[name] = float(P.polyval3d(E, W, tau, c))
    return out


@dataclass(frozen=True)
class StencilCheckRow:
    name: str
    exact: float
    err_coarse: float
    err_fine: float
    passed: bool


def stencil_self_check(center=(-1.0, 1.0, 1.0), h_coarse: float = 0.04, counts=(9, 5, 7),
                       coeffs=None, exact_tol: float = 1e-8) -> list:
    """Stencil errors on a polynomial at h and h/2.

    A derivative passes if it is exact to ``exact_tol`` (relative) at both
    spacings or its error shrinks by a factor in [3, 5].
    """
    coeffs = synthetic_polynomial() if coeffs is None else coeffs
    rows = []
    grids = [polynomial_grid(coeffs, center, (h,) * 3, counts) for h in (h_coarse, h_coarse / 2)]
    exact = polynomial_derivatives(coeffs, grids[0].E0, grids[0].W0, grids[0].tau0)
    est = [stencil_derivatives(g) for g in grids]
    for name, value in exact.items():
        ec, ef = abs(est[0][name] - value), abs(est[1][name] - value)
        scale = exact_tol * (1.0 + abs(value))
        ok = (ec <= scale and ef <= scale) or (ef > 0 and 3.0 <= ec / ef <= 5.0)
        rows.append(StencilCheckRow(name, value, ec, ef, bool(ok)))
    return rows


# ---------------------------------------------------------------- factorization


@dataclass(frozen=True)
class FactorizationScaling:
    """a_- = -2 L^9 + L rho 3^(1/3), a_+ = 2 L^9 - L sigma 3^(1/3), tau = 3 L^6.

    ``k1`` and ``k2`` bound the window k1 <= rho, sigma <= k2 3^(-1/3) L^8 in
    which uniform convergence is expected; ``k2 < 2`` keeps the interval open.
    """

    lam: float
    rho: float = 0.0
    sigma: float = 0.0
    k1: float = -10.0
    k2: float = 1.9

    def __post_init__(self):
        if not self.lam > 0:
            raise ConfigurationError("Lambda must be positive")
        if self.a_minus > self.a_plus + 1e-12 * max(1.0, abs(self.a_plus)):
            raise DomainError("rho + sigma too large: a_- exceeds a_+")

    @property
    def a_minus(self) -> float:
        return -2 * self.lam ** 9 + self.lam * self.rho * CBRT3

    @property
    def a_plus(self) -> float:
        return 2 * self.lam ** 9 - self.lam * self.sigma * CBRT3

    @property
    def tau(self) -> float:
        return 3 * self.lam ** 6

    def in_window(self) -> bool:
        top = self.k2 * self.lam ** 8 / CBRT3
        return self.k1 <= self.rho <= top and self.k1 <= self.sigma <= top


@dataclass(frozen=True)
class FactorizationRow:
    lam: float
    tau: float
    a_minus: float
    a_plus: float
    logdet_pearcey: float
    logdet_airy_rho: float
    logdet_airy_sigma: float
    delta: float
    flagged: bool = False
    note: str = ""


FACTOR_NYSTROM = NystromConfig(order=20, panel_length=4.0, tol=1e-10, max_doublings=2)


def factorization_table(lambdas, rho: float = 0.0, sigma: float = 0.0,
                        cfg: NystromConfig = FACTOR_NYSTROM,
                        kernel_cfg: PearceyKernelConfig | None = None,
                        hm: HastingsMcLeodSolution | None = None) -> list:
    """Rows (Lambda, log det Pearcey, two Tracy-Widom logs, Delta)."""
    hm = hm or hastings_mcleod_solve(-8.0, 8.0)
    rows = []
    for lam in lambdas:
        sc = FactorizationScaling(float(lam), rho, sigma)
        lr = float(tw_log_gap(rho, hm))
        ls = float(tw_log_gap(sigma, hm))
        a, b = sc.a_minus, sc.a_plus
        try:
            if b <= a:
                lp = 0.0
            else:
                lp = pearcey_log_gap(IntervalUnion.interval(a, b), sc.tau, cfg, kernel_cfg).log_det
            rows.append(FactorizationRow(sc.lam, sc.tau, a, b, lp, lr, ls, abs(lp - lr - ls)))
        except FredgapError as exc:
            rows.append(FactorizationRow(sc.lam, sc.tau, a, b, math.nan, lr, ls, math.nan, True, str(exc)))
    return rows


# ---------------------------------------------------------------- decay


@dataclass(frozen=True)
class DecayRow:
    tau: float
    abs_log_det: float
    bound_ratio: float
    underflow: bool = False


DECAY_NYSTROM = NystromConfig(order=20, panel_length=4.0, tol=1e-8, max_doublings=2, abs_floor=0.0)


def large_tau_decay(interval=(-1.0, 1.0), taus=(4.0, 5.0, 6.0), cfg: NystromConfig = DECAY_NYSTROM,
                    kernel_cfg: PearceyKernelConfig | None = None) -> list:
    """|log det| and |log det| tau^(1/2) exp(tau^2/4) for increasing tau."""
    a, b = interval
    rows = []
    for tau in taus:
        if tau < 2:
            raise DomainError("large-tau probe expects tau >= 2")
        ld = abs(pearcey_log_gap(IntervalUnion.interval(a, b), tau, cfg, kernel_cfg).log_det)
        if ld < 1e-300:
            rows.append(DecayRow(float(tau), 0.0, 0.0, True))
            continue
        ratio = math.exp(math.log(ld) + 0.5 * math.log(tau) + tau * tau / 4)
        rows.append(DecayRow(float(tau), ld, ratio))
    return rows
