"""Monotone finite-difference solver for the limit Hamilton-Jacobi dynamics.

Two equations share one scheme:

    standard:     d_t phi + H(d_x phi) + r = 0
    constrained:  min{ d_t phi + H(d_x phi) + r, phi } = 0

The scheme is explicit Euler with the Lax-Friedrichs numerical Hamiltonian

    Hhat(a, b) = H((a + b)/2) - alpha (b - a)/2,

where a and b are the backward and forward one-sided slopes and alpha bounds
|H'| over the slopes the run visits.  Under dt <= cfl dx / alpha (cfl <= 0.9)
the update is monotone, hence converges to the viscosity solution.  The
constrained form applies the obstacle projection phi <- max(phi, 0) after
each step, which keeps the interior of the nullset exactly zero; the front
position is then the boundary between exact zeros and positive values.

Boundaries are outflow (one-sided copies).  First order only; accuracy comes
from refinement.
"""

import math
from dataclasses import dataclass

import numpy as np

from .hamiltonian import Hamiltonian, SpeedResult, min_wave_speed

__all__ = [
    "HJField",
    "FrontReport",
    "step",
    "run",
    "compare_hopf_lax",
    "point_cone",
    "run_2d",
]

ZERO_TOL = 1e-6
MAX_CFL = 0.9
CONE_SLOPE_FACTOR = 4.0
CONE_CAP = 50.0


@dataclass
class HJField:
    """State of one HJ run: grid, values, time step, model and constraint flag."""

    x_grid: np.ndarray
    phi: np.ndarray
    time: float
    dt: float
    model: Hamiltonian
    r: float
    constrained: bool
    alpha: float

    def __post_init__(self):
        dx = self.dx
        if self.dt > MAX_CFL * dx / self.alpha * (1.0 + 1e-12):
            raise ValueError(
                f"dt = {self.dt:g} violates the CFL bound {MAX_CFL:g}*dx/alpha = "
                f"{MAX_CFL * dx / self.alpha:g}"
            )

    @property
    def dx(self) -> float:
        return float(self.x_grid[1] - self.x_grid[0])


@dataclass
class FrontReport:
    """Front trajectory, fitted speed, and the spectral prediction."""

    times: np.ndarray
    front_positions: np.ndarray
    fitted_speed: float
    predicted_c_star: float = math.nan
    relative_error: float = math.nan


def _lf_update(phi: np.ndarray, dx: float, model: Hamiltonian, alpha: float,
               r: float, dt: float, constrained: bool) -> np.ndarray:
    a = np.empty_like(phi)
    b = np.empty_like(phi)
    a[1:] = (phi[1:] - phi[:-1]) / dx
    a[0] = 0.0  # outflow: ghost copies the edge value
    b[:-1] = a[1:]
    b[-1] = 0.0
    h_hat = np.asarray(model.value(0.5 * (a + b))) - 0.5 * alpha * (b - a)
    out = phi - dt * (h_hat + r)
    if constrained:
        np.maximum(out, 0.0, out=out)
    return out


def step(fld: HJField) -> HJField:
    """Advance one time step; the CFL bound was checked at construction."""
    fld.phi = _lf_update(fld.phi, fld.dx, fld.model, fld.alpha, fld.r,
                         fld.dt, fld.constrained)
    fld.time += fld.dt
    return fld


def _front_position(x: np.ndarray, phi: np.ndarray, zero_tol: float = ZERO_TOL) -> float:
    """Rightmost x with phi below zero_tol, linearly interpolated to the crossing."""
    below = phi < zero_tol
    if not below.any():
        return math.nan
    i = int(np.nonzero(below)[0][-1])
    if i == phi.size - 1:
        return float(x[-1])
    denom = phi[i + 1] - phi[i]
    frac = (zero_tol - phi[i]) / denom if denom > 0 else 0.0
    return float(x[i] + frac * (x[i + 1] - x[i]))


def point_cone(model: Hamiltonian, r: float, slope: float | None = None,
               cap: float = CONE_CAP):
    """Point-mass surrogate phi0(x) = min(K |x|, cap), K = 4 p*.

    Any K above the minimizing slope gives the same Hopf-Lax solution near
    the front, so the factor 4 is safety, not tuning.  Returns (phi0, K).
    """
    if slope is None:
        slope = CONE_SLOPE_FACTOR * min_wave_speed(model, r).p_star

    def phi0(x):
        return np.minimum(slope * np.abs(x), cap)

    return phi0, float(slope)


def run(model: Hamiltonian, r: float, phi0, T: float, dx: float, *,
        constrained: bool = True, cfl: float = MAX_CFL, x_max: float,
        sample_dt: float | None = None, predicted: SpeedResult | None = None):
    """Integrate to time T and track the front.

    ``phi0`` is a callable evaluated on the uniform grid covering
    [-x_max, x_max].  The front position is sampled every ``sample_dt``
    (default T/64) and the speed is a least-squares slope over the second
    half of the samples, where the transient from the initial data has died
    out.  Returns (HJField, FrontReport).
    """
    if cfl > MAX_CFL:
        raise ValueError(f"cfl must be <= {MAX_CFL}")
    n = int(round(2.0 * x_max / dx)) + 1
    x = np.linspace(-x_max, x_max, n)
    phi = np.asarray(phi0(x), dtype=float)
    if np.any(phi < 0):
        raise ValueError("initial profile must be nonnegative")

    slope0 = float(np.max(np.abs(np.diff(phi)))) / dx
    alpha = max(model.lipschitz_on(2.0 * max(slope0, 1e-3)), 1e-3)
    dt_max = cfl * dx / alpha
    n_steps = max(int(math.ceil(T / dt_max)), 1)
    dt = T / n_steps
    fld = HJField(x, phi, 0.0, dt, model, r, constrained, alpha)

    if sample_dt is None:
        sample_dt = T / 64.0
    stride = max(int(round(sample_dt / dt)), 1)

    times = [0.0]
    fronts = [_front_position(x, phi)]
    for k in range(1, n_steps + 1):
        step(fld)
        if k % stride == 0 or k == n_steps:
            times.append(fld.time)
            fronts.append(_front_position(x, fld.phi))

    times = np.array(times)
    fronts = np.array(fronts)
    tail = times >= 0.5 * T
    valid = tail & np.isfinite(fronts)
    if valid.sum() >= 2:
        coeffs = np.polyfit(times[valid], fronts[valid], 1)
        speed = float(coeffs[0])
    else:
        speed = math.nan

    report = FrontReport(times, fronts, speed)
    if predicted is None and r > 0:
        try:
            predicted = min_wave_speed(model, r)
        except ValueError:
            predicted = None
    if predicted is not None:
        report.predicted_c_star = predicted.c_star
        report.relative_error = abs(speed - predicted.c_star) / predicted.c_star
    return fld, report


def compare_hopf_lax(fld: HJField, model: Hamiltonian, r: float,
                     window: float = 0.8) -> float:
    """Sup-norm gap to the Hopf-Lax solution on |x| <= window * x_max.

    Meaningful for runs started from point-cone data; the two solutions are
    computed by entirely independent routes (monotone scheme vs Legendre
    duality).
    """
    from .hamiltonian import hopf_lax_solution

    x = fld.x_grid
    mask = np.abs(x) <= window * float(x[-1])
    reference = hopf_lax_solution(model, r, fld.time, x[mask])
    return float(np.max(np.abs(fld.phi[mask] - reference)))


def run_2d(model: Hamiltonian, r: float, phi0, T: float, dx: float, *,
           x_max: float, cfl: float = MAX_CFL):
    """Constrained 2-D variant with dimension-by-dimension differences.

    H acts on |grad phi| (radially symmetric use of the 1-D profile); each
    dimension contributes its own Lax-Friedrichs dissipation.  Exercises the
    ball-shaped nullset; the acceptance suite itself is 1-D.
    """
    n = int(round(2.0 * x_max / dx)) + 1
    x = np.linspace(-x_max, x_max, n)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    phi = np.asarray(phi0(xx, yy), dtype=float)

    slope0 = max(float(np.max(np.abs(np.diff(phi, axis=0)))),
                 float(np.max(np.abs(np.diff(phi, axis=1))))) / dx
    alpha = max(model.lipschitz_on(2.0 * max(slope0, 1e-3)), 1e-3)
    dt = cfl * dx / (2.0 * alpha)  # two dissipation terms share the budget
    n_steps = max(int(math.ceil(T / dt)), 1)
    dt = T / n_steps

    for _ in range(n_steps):
        ax = np.empty_like(phi)
        bx = np.empty_like(phi)
        ax[1:, :] = (phi[1:, :] - phi[:-1, :]) / dx
        ax[0, :] = 0.0
        bx[:-1, :] = ax[1:, :]
        bx[-1, :] = 0.0
        ay = np.empty_like(phi)
        by = np.empty_like(phi)
        ay[:, 1:] = (phi[:, 1:] - phi[:, :-1]) / dx
        ay[:, 0] = 0.0
        by[:, :-1] = ay[:, 1:]
        by[:, -1] = 0.0
        grad = np.hypot(0.5 * (ax + bx), 0.5 * (ay + by))
        h_hat = np.asarray(model.value(grad)) \
            - 0.5 * alpha * (bx - ax) - 0.5 * alpha * (by - ay)
        phi = np.maximum(phi - dt * (h_hat + r), 0.0)
    return x, phi
