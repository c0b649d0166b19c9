"""Hamiltonian models, Legendre duality, and the minimal front speed.

All models satisfy H(0) = 0 and H(p) = H(-p).  The kinetic (bounded-velocity)
Hamiltonians are globally Lipschitz with |H'| <= v_max; the quadratic, VFP
and nonlocal kinds have unbounded slope, so for the HJ scheme they expose an
effective Lipschitz constant over the momentum range a run will actually
visit (``lipschitz_on``).

The minimal front speed of the growth-constrained equation is

    c* = inf_{p > 0} (H(p) + r) / p,

and the Lagrangian dual to H + r,

    L(q) = sup_p (p q - H(p) - r),

vanishes exactly at |q| = c*.  Both are computed by golden-section searches;
grid scans only bracket them.  When H is not convex the Hopf-Lax formula
built from L is a formal object: equality with the PDE solution is only
guaranteed for convex H depending on |p|.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import spectral
from .operators import DiscreteOperator

__all__ = [
    "Hamiltonian",
    "QuadraticHamiltonian",
    "BGKHamiltonian",
    "VFPHamiltonian",
    "GaussianKernelHamiltonian",
    "LaplaceKernelHamiltonian",
    "TabulatedHamiltonian",
    "tabulate",
    "SpeedResult",
    "min_wave_speed",
    "LegendreResult",
    "legendre",
    "hopf_lax_solution",
    "convexity_diagnostic",
]

GOLDEN_TOL = 1e-10
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class Hamiltonian:
    """Shared interface: value, derivative, momentum domain, slope bounds."""

    #: open interval of admissible momenta
    p_min: float = -math.inf
    p_max: float = math.inf

    def value(self, p):
        raise NotImplementedError

    def deriv(self, p):
        raise NotImplementedError

    def lipschitz_on(self, p_abs: float) -> float:
        """Bound for sup |H'| over |p| <= p_abs (all kinds have |H'| increasing in |p|)."""
        return float(abs(self.deriv(p_abs)))

    def __call__(self, p):
        return self.value(p)

    def _check_domain(self, p) -> None:
        p = np.asarray(p)
        if np.any(p <= self.p_min) or np.any(p >= self.p_max):
            raise ValueError(
                f"momentum outside the open domain ({self.p_min}, {self.p_max})"
            )


@dataclass(frozen=True)
class QuadraticHamiltonian(Hamiltonian):
    """KPP case H(p) = D p^2; minimal speed c* = 2 sqrt(r D)."""

    diffusivity: float = 1.0

    def value(self, p):
        return self.diffusivity * np.square(p)

    def deriv(self, p):
        return 2.0 * self.diffusivity * np.asarray(p, dtype=float)


@dataclass(frozen=True)
class BGKHamiltonian(Hamiltonian):
    """Closed-form BGK Hamiltonian for uniform M on [-v_max, v_max]:

    H(p) = v_max p / tanh(v_max p / (1+r)) - (1+r).

    Globally Lipschitz with constant v_max.
    """

    v_max: float = 1.0
    r: float = 0.0

    def value(self, p):
        s = 1.0 + self.r
        u = self.v_max * np.asarray(p, dtype=float) / s
        small = np.abs(u) < 1e-4
        # u coth u - 1 = u^2/3 - u^4/45 + ... near zero
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            series = u * u / 3.0 - u**4 / 45.0
            direct = u / np.tanh(u) - 1.0
        return s * np.where(small, series, direct)

    def deriv(self, p):
        s = 1.0 + self.r
        u = self.v_max * np.asarray(p, dtype=float) / s
        small = np.abs(u) < 1e-4
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            series = 2.0 * u / 3.0 - 4.0 * u**3 / 45.0
            direct = 1.0 / np.tanh(u) - u / np.sinh(u) ** 2
        return self.v_max * np.where(small, series, direct)

    def lipschitz_on(self, p_abs: float) -> float:
        return self.v_max


@dataclass(frozen=True)
class VFPHamiltonian(Hamiltonian):
    """Vlasov-Fokker-Planck Hamiltonian H(p) = sigma^4 p^2."""

    sigma: float = 1.0

    def value(self, p):
        return self.sigma**4 * np.square(p)

    def deriv(self, p):
        return 2.0 * self.sigma**4 * np.asarray(p, dtype=float)


@dataclass(frozen=True)
class GaussianKernelHamiltonian(Hamiltonian):
    """Nonlocal convolution Hamiltonian of the Gaussian kernel: H(p) = e^{p^2/2} - 1."""

    def value(self, p):
        return np.expm1(0.5 * np.square(p))

    def deriv(self, p):
        p = np.asarray(p, dtype=float)
        return p * np.exp(0.5 * p * p)


@dataclass(frozen=True)
class LaplaceKernelHamiltonian(Hamiltonian):
    """Nonlocal convolution Hamiltonian of the Laplace kernel: H(p) = p^2/(1-p^2) on (-1, 1)."""

    p_min: float = -1.0
    p_max: float = 1.0

    def value(self, p):
        self._check_domain(p)
        p2 = np.square(p)
        return p2 / (1.0 - p2)

    def deriv(self, p):
        self._check_domain(p)
        p = np.asarray(p, dtype=float)
        return 2.0 * p / np.square(1.0 - p * p)


class TabulatedHamiltonian(Hamiltonian):
    """Spectrally tabulated H on a symmetric momentum grid.

    Interpolation is monotone cubic (PCHIP), so the interpolant never
    overshoots the table and the HJ scheme's slope bound stays in control.
    Momenta outside the table are an error, not an extrapolation.
    """

    def __init__(self, p_grid: np.ndarray, h_values: np.ndarray,
                 lipschitz_bound: float, measured_lipschitz: float):
        p_grid = np.asarray(p_grid, dtype=float)
        h_values = np.asarray(h_values, dtype=float)
        if p_grid.ndim != 1 or p_grid.size < 4:
            raise ValueError("tabulation needs at least 4 momenta")
        if np.any(np.diff(p_grid) <= 0):
            raise ValueError("momentum grid must be strictly increasing")
        if np.max(np.abs(p_grid + p_grid[::-1])) > 1e-12 * max(1.0, p_grid[-1]):
            raise ValueError("momentum grid must be symmetric about 0")
        self.p_grid = p_grid
        self.h_values = h_values
        self.lipschitz_bound = float(lipschitz_bound)
        self.measured_lipschitz = float(measured_lipschitz)
        self._interp = PchipInterpolator(p_grid, h_values)
        self._dinterp = self._interp.derivative()

    @property
    def p_lo(self) -> float:
        return float(self.p_grid[0])

    @property
    def p_hi(self) -> float:
        return float(self.p_grid[-1])

    def _check_range(self, p) -> None:
        p = np.asarray(p)
        if np.any(p < self.p_grid[0]) or np.any(p > self.p_grid[-1]):
            raise ValueError(
                f"momentum outside tabulated range [{self.p_grid[0]:g}, {self.p_grid[-1]:g}]"
            )

    def value(self, p):
        self._check_range(p)
        return self._interp(p)

    def deriv(self, p):
        self._check_range(p)
        return self._dinterp(p)

    def lipschitz_on(self, p_abs: float) -> float:
        return self.lipschitz_bound


def tabulate(op: DiscreteOperator, p_grid: np.ndarray) -> TabulatedHamiltonian:
    """Tabulate H(p) over a symmetric grid with the direct spectral solver.

    The stored Lipschitz bound is the global kinetic bound v_max; the maximal
    tabulated slope max |dH/dp| is kept alongside as a measured check.
    """
    p_grid = np.asarray(p_grid, dtype=float)
    h_values = np.empty_like(p_grid)
    for i, p in enumerate(p_grid):
        try:
            h_values[i] = spectral.solve_direct(op, float(p)).h_value
        except Exception as exc:
            raise RuntimeError(f"spectral solve failed at p = {p:g}") from exc
    measured = float(np.max(np.abs(np.diff(h_values) / np.diff(p_grid))))
    return TabulatedHamiltonian(p_grid, h_values, op.grid.v_max, measured)


@dataclass(frozen=True)
class SpeedResult:
    """Minimal speed c* = (H(p*) + r)/p* and the minimizing momentum."""

    c_star: float
    p_star: float
    iterations: int
    at_horizon: bool = False


def _golden_min(fun, lo: float, hi: float, tol: float = GOLDEN_TOL):
    """Deterministic golden-section minimizer; returns (x, fun(x), evaluations).

    The tolerance is absolute for order-one brackets and widens with the
    bracket magnitude so termination survives float spacing far from 0.
    """
    a, b = lo, hi
    h = b - a
    c = b - _INVPHI * h
    d = a + _INVPHI * h
    fc, fd = fun(c), fun(d)
    n = 2
    while h > tol * max(1.0, abs(a), abs(b)) and n < 300:
        if fc < fd:
            b, d, fd = d, c, fc
            h = b - a
            c = b - _INVPHI * h
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + _INVPHI * h
            fd = fun(d)
        n += 1
    x = c if fc < fd else d
    return x, fun(x), n + 1


def min_wave_speed(model: Hamiltonian, r: float, p_lo: float = 1e-6,
                   p_hi: float | None = None) -> SpeedResult:
    """Golden-section minimization of g(p) = (H(p) + r)/p over p > 0.

    For tabulated models the search stops at the table edge; if g is still
    decreasing there the result is flagged ``at_horizon`` instead of being
    passed off as a true minimum.  Closed-form models expand the bracket by
    doubling until g starts increasing.
    """
    if r <= 0:
        raise ValueError("minimal-speed computation requires r > 0")

    def g(p: float) -> float:
        return (float(model.value(p)) + r) / p

    at_horizon = False
    if p_hi is None:
        if isinstance(model, TabulatedHamiltonian):
            p_hi = model.p_hi
        else:
            limit = model.p_max
            p_hi = 1.0 if limit == math.inf else 0.5 * (p_lo + limit)
            while p_hi < 1e12:
                nxt = 2.0 * p_hi if limit == math.inf else min(2.0 * p_hi, 0.5 * (p_hi + limit))
                grew = g(nxt) >= g(p_hi)
                p_hi = nxt
                if grew:  # minimum now bracketed strictly inside (p_lo, p_hi)
                    break
                if limit - p_hi < 1e-12:
                    break
    p_star, c_star, n = _golden_min(g, p_lo, p_hi)
    if p_hi - p_star <= 10.0 * GOLDEN_TOL * max(1.0, p_hi):
        # interior minimum not reached before the horizon
        at_horizon = True
    return SpeedResult(float(c_star), float(p_star), n, at_horizon)


@dataclass(frozen=True)
class LegendreResult:
    """Lagrangian values on the requested grid and the zero crossing q0 (= c*)."""

    q_grid: np.ndarray
    values: np.ndarray
    q_zero: float


def _conjugate_at(model: Hamiltonian, q: float, p_grid: np.ndarray) -> float:
    """sup_p (p q - H(p) - r-free part): coarse grid scan + golden refinement."""
    scores = p_grid * q - model.value(p_grid)
    k = int(np.argmax(scores))
    lo = p_grid[max(k - 1, 0)]
    hi = p_grid[min(k + 1, p_grid.size - 1)]
    if hi <= lo:
        return float(scores[k])
    p_best, neg, _ = _golden_min(lambda p: -(p * q - float(model.value(p))), lo, hi)
    return max(float(scores[k]), -neg)


def _model_p_grid(model: Hamiltonian, q_scale: float) -> np.ndarray:
    if isinstance(model, TabulatedHamiltonian):
        return model.p_grid
    # expand until the conjugate score decreases at the edge for the largest |q|
    limit = model.p_max
    hi = 1.0 if limit == math.inf else 0.5 * limit
    q = max(q_scale, 1.0)
    while hi < 1e6:
        nxt = 2.0 * hi if limit == math.inf else min(2.0 * hi, 0.5 * (hi + limit))
        if nxt * q - float(model.value(nxt)) < hi * q - float(model.value(hi)):
            hi = nxt
            break
        if limit - nxt < 1e-9:
            break
        hi = nxt
    return np.linspace(-hi, hi, 801)


def legendre(model: Hamiltonian, r: float, q_grid: np.ndarray) -> LegendreResult:
    """Lagrangian L(q) = sup_p (p q - H(p) - r) and its zero crossing on q >= 0.

    L(0) >= -r (take p = 0), L is nondecreasing for q >= 0, and L(c*) = 0.
    For tabulated H the supremum is restricted to the table range, i.e. this
    is the conjugate of the truncated Hamiltonian.
    """
    q_grid = np.asarray(q_grid, dtype=float)
    p_grid = _model_p_grid(model, float(np.max(np.abs(q_grid), initial=1.0)))

    def lag(q: float) -> float:
        return _conjugate_at(model, q, p_grid) - r

    values = np.array([lag(q) for q in q_grid])

    # zero crossing of the continuous L on q >= 0, refined by bisection
    q_zero = math.nan
    pos = q_grid[q_grid > 0]
    lo_q, hi_q = None, None
    for q in pos:
        if lag(q) > 0:
            hi_q = q
            break
        lo_q = q
    if hi_q is not None:
        lo_q = lo_q if lo_q is not None else min(1e-9, hi_q * 1e-3)
        f_lo = lag(lo_q)
        if f_lo <= 0:
            for _ in range(200):
                mid = 0.5 * (lo_q + hi_q)
                if lag(mid) <= 0:
                    lo_q = mid
                else:
                    hi_q = mid
                if hi_q - lo_q <= 1e-12 * max(1.0, hi_q):
                    break
            q_zero = 0.5 * (lo_q + hi_q)
    return LegendreResult(q_grid, values, float(q_zero))


def hopf_lax_solution(model: Hamiltonian, r: float, t: float,
                      x_grid: np.ndarray) -> np.ndarray:
    """Variational solution phi(x, t) = max(t L(x/t), 0) for point-mass data.

    Valid as the PDE solution when H is convex and a function of |p|
    (Freidlin condition); used as an independent oracle for the HJ scheme.
    """
    if t <= 0:
        raise ValueError("hopf_lax_solution requires t > 0")
    x_grid = np.asarray(x_grid, dtype=float)
    lag = legendre(model, r, x_grid / t)
    return np.maximum(t * lag.values, 0.0)


def convexity_diagnostic(model: Hamiltonian, p_grid: np.ndarray) -> float:
    """Smallest centered second difference of H on the grid (report only).

    Convexity of kinetic Hamiltonians is an open question; a negative value
    flags numerically observed non-convexity, nothing is asserted.
    """
    p_grid = np.asarray(p_grid, dtype=float)
    h = model.value(p_grid)
    dp = np.diff(p_grid)
    second = (h[2:] - 2.0 * h[1:-1] + h[:-2]) / (dp[1:] * dp[:-1])
    return float(np.min(second))
