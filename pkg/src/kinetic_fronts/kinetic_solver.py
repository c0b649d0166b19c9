"""Finite-epsilon kinetic solver and the WKB phase it carries.

The hyperbolically rescaled equation is

    d_t f + v d_x f = (1/eps) [ L(f) + r rho (M - f) ],

solved in the f variables (the phase equation is exponentially stiff) by
first-order splitting:

1. transport: upwind per velocity node, direction by sign(v), CFL
   dt <= cfl * dx / v_max;
2. relaxation: implicit Euler in the stiff part with the density lagged,

       (I - (dt/eps)(L - r rho_old I)) f_new = f_old + (dt/eps) r rho_old M,

   then one Picard refresh of rho.  The matrix is an M-matrix (nonnegative
   off-diagonals of L), so the solve preserves 0 <= f <= M exactly: both the
   sandwich bounds and rho <= 1 are inherited, not enforced.

The phase is extracted afterwards as phi = -eps log(f / M), floored at
f = 1e-300; floored nodes are flagged and excluded from sup-norm gaps.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError
from .operators import DiscreteOperator

__all__ = [
    "KineticField",
    "PhaseField",
    "KineticRun",
    "kinetic_step",
    "run_kinetic",
    "convergence_study",
    "region_diagnostics",
    "ConvergenceRecord",
    "RegionDiagnostics",
]

BOUND_TOL = 1e-10
PHASE_FLOOR = 1e-300
MAX_CFL = 0.9
WINDOW_FRACTION = 0.7
POS_TOL = 0.1
NULLSET_TOL = 1e-6
INTERIOR_FRACTION = 0.75


@dataclass
class KineticField:
    """Distribution f(x_i, v_j) with its operator, scaling and clock."""

    x_grid: np.ndarray
    op: DiscreteOperator
    f: np.ndarray  # shape (n_x, n_v)
    epsilon: float
    time: float
    dt: float
    bc: str = "outflow"  # or "periodic"
    max_bound_violation: float = 0.0

    @property
    def dx(self) -> float:
        return float(self.x_grid[1] - self.x_grid[0])

    def density(self) -> np.ndarray:
        return self.f @ self.op.grid.weights


@dataclass
class PhaseField:
    """phi(x, v) = -eps log(f/M); ``clamped`` marks nodes floored at underflow."""

    phi: np.ndarray
    clamped: np.ndarray


def _extract_phase(field: KineticField) -> PhaseField:
    m = field.op.equilibrium.values[None, :]
    clamped = field.f < PHASE_FLOOR
    ratio = np.maximum(field.f, PHASE_FLOOR) / m
    phi = -field.epsilon * np.log(ratio)
    return PhaseField(phi, clamped)


def _transport(f: np.ndarray, nu: np.ndarray, bc: str) -> np.ndarray:
    """Upwind advection by one step; nu_j = v_j dt / (eps dx) Courant numbers."""
    if bc == "periodic":
        left = np.roll(f, 1, axis=0)
        right = np.roll(f, -1, axis=0)
    else:  # outflow: one-sided copies
        left = np.vstack([f[:1], f[:-1]])
        right = np.vstack([f[1:], f[-1:]])
    pos = nu > 0
    out = f.copy()
    out[:, pos] -= nu[pos][None, :] * (f[:, pos] - left[:, pos])
    out[:, ~pos] -= nu[~pos][None, :] * (right[:, ~pos] - f[:, ~pos])
    return out


def _relax(f: np.ndarray, op: DiscreteOperator, a: float, r: float) -> np.ndarray:
    """Implicit relaxation with lagged density plus one Picard refresh.

    a = dt/eps.  The system matrix per x node is I - a L + a r rho I; only
    the scalar a r rho(x) varies across nodes, solved as one batched LU.
    """
    w = op.grid.weights
    m = op.equilibrium.values
    n = op.grid.count
    eye = np.eye(n)
    base = eye - a * op.matrix_L
    if r == 0.0:
        return np.linalg.solve(base, f.T).T
    rho = f @ w
    for _ in range(2):  # lagged solve, then one Picard refresh of rho
        mats = base[None, :, :] + (a * r * rho)[:, None, None] * eye[None, :, :]
        rhs = f + (a * r * rho)[:, None] * m[None, :]
        f_new = np.linalg.solve(mats, rhs[..., None])[..., 0]
        rho = f_new @ w
    return f_new


def kinetic_step(field: KineticField) -> KineticField:
    """One split step: upwind transport, then stiff implicit relaxation.

    Tracks the worst violation of 0 <= f <= M and raises past 1e-10.
    """
    op = field.op
    nu = op.grid.nodes * field.dt / field.dx
    if np.max(np.abs(nu)) > 1.0 + 1e-12:
        raise ValueError("transport CFL violated: decrease dt")
    f = _transport(field.f, nu, field.bc)
    f = _relax(f, op, field.dt / field.epsilon, op.growth_rate)

    m = op.equilibrium.values[None, :]
    violation = max(float(np.max(f - m)), float(np.max(-f)), 0.0)
    field.max_bound_violation = max(field.max_bound_violation, violation)
    if violation > BOUND_TOL:
        raise ConsistencyError(
            f"sandwich bound 0 <= f <= M violated by {violation:.3e}"
        )
    field.f = f
    field.time += field.dt
    return field


@dataclass
class KineticRun:
    """Result of run_kinetic: final field, phase, and sampled phase history."""

    field: KineticField
    phase: PhaseField
    times: np.ndarray
    phase_history: list  # PhaseField per sample time, including t=0 and t=T


def run_kinetic(op: DiscreteOperator, epsilon: float, phi0, T: float, dx: float, *,
                x_max: float, cfl: float = MAX_CFL, bc: str = "outflow",
                n_samples: int = 16) -> KineticRun:
    """Advance well-prepared data f(0) = M exp(-phi0(x)/eps) to time T.

    ``phi0`` is a callable of x only (velocity-independent, which avoids the
    initial boundary layer).  Phase snapshots are kept at ~n_samples times
    for the time-derivative estimate.
    """
    if cfl > MAX_CFL:
        raise ValueError(f"cfl must be <= {MAX_CFL}")
    n = int(round(2.0 * x_max / dx)) + 1
    x = np.linspace(-x_max, x_max, n)
    profile = np.asarray(phi0(x), dtype=float)
    if np.any(profile < 0):
        raise ValueError("initial phase must be nonnegative")
    f0 = op.equilibrium.values[None, :] * np.exp(-profile[:, None] / epsilon)

    dt_max = cfl * dx / op.grid.v_max
    n_steps = max(int(math.ceil(T / dt_max)), 1)
    dt = T / n_steps
    field = KineticField(x, op, f0, epsilon, 0.0, dt, bc)

    stride = max(n_steps // max(n_samples, 1), 1)
    times = [0.0]
    history = [_extract_phase(field)]
    for k in range(1, n_steps + 1):
        kinetic_step(field)
        if k % stride == 0 or k == n_steps:
            times.append(field.time)
            history.append(_extract_phase(field))
    return KineticRun(field, history[-1], np.array(times), history)


@dataclass
class RegionDiagnostics:
    """Convergence indicators on the two limit regions of the HJ solution."""

    min_rho_nullset: float
    max_f_over_m_positive: float
    nullset_nodes: int
    positive_nodes: int


def region_diagnostics(field: KineticField, phase: PhaseField,
                       hj_phi: np.ndarray, *, window: float = WINDOW_FRACTION,
                       pos_tol: float = POS_TOL) -> RegionDiagnostics:
    """Partition x nodes by the HJ limit phase and report the limit indicators.

    On (a compact subset of the interior of) the nullset {phi0 = 0} the
    density should approach 1; on {phi0 > pos_tol} the distribution should be
    exponentially small against M.  The nullset interval is shrunk by
    INTERIOR_FRACTION about its center, matching the locally-uniform scope of
    both limits; an empty region reports nan, not an error.
    """
    x = field.x_grid
    inside = np.abs(x) <= window * float(x[-1])
    nullset = (hj_phi < NULLSET_TOL) & inside
    if nullset.any():
        xs = x[nullset]
        center, radius = 0.5 * (xs[0] + xs[-1]), 0.5 * (xs[-1] - xs[0])
        interior = nullset & (np.abs(x - center) <= INTERIOR_FRACTION * radius)
    else:
        interior = nullset
    positive = (hj_phi > pos_tol) & inside

    rho = field.density()
    m = field.op.equilibrium.values[None, :]
    min_rho = float(np.min(rho[interior])) if interior.any() else math.nan
    max_ratio = (
        float(np.max(field.f[positive, :] / m)) if positive.any() else math.nan
    )
    return RegionDiagnostics(min_rho, max_ratio, int(interior.sum()), int(positive.sum()))


@dataclass
class ConvergenceRecord:
    """Per-epsilon summary row of a convergence study."""

    epsilon: float
    gap: float
    min_rho_nullset: float
    max_f_over_m_positive: float
    max_bound_violation: float
    run: KineticRun


def phase_gap(run: KineticRun, hj_phi: np.ndarray, *,
              window: float = WINDOW_FRACTION) -> float:
    """sup over the compact window and all v of |phi_eps - phi0|, skipping clamps."""
    field = run.field
    inside = np.abs(field.x_grid) <= window * float(field.x_grid[-1])
    diff = np.abs(run.phase.phi - hj_phi[:, None])
    diff[run.phase.clamped] = 0.0
    return float(np.max(diff[inside, :]))


def convergence_study(op: DiscreteOperator, eps_list, phi0, T: float, dx: float,
                      hj_phi: np.ndarray, *, x_max: float,
                      window: float = WINDOW_FRACTION) -> list:
    """Run the kinetic solver per epsilon and measure the gap to the HJ limit.

    ``hj_phi`` must live on the same grid the kinetic runs use (same dx and
    x_max).  No convergence rate is asserted anywhere: the records carry the
    raw gaps, whose monotone decrease is the observable form of the limit.
    """
    records = []
    for eps in eps_list:
        run = run_kinetic(op, float(eps), phi0, T, dx, x_max=x_max)
        if run.field.x_grid.size != hj_phi.size:
            raise ValueError("HJ reference grid does not match the kinetic grid")
        gap = phase_gap(run, hj_phi, window=window)
        if op.growth_rate > 0:
            diag = region_diagnostics(run.field, run.phase, hj_phi, window=window)
        else:  # the saturated-region limit needs r > 0
            diag = RegionDiagnostics(math.nan, math.nan, 0, 0)
        records.append(ConvergenceRecord(
            float(eps), gap, diag.min_rho_nullset, diag.max_f_over_m_positive,
            run.field.max_bound_violation, run,
        ))
    return records


def phase_rate_estimate(run: KineticRun) -> float:
    """sup |d_t phi| from finite differences of successive phase snapshots."""
    best = 0.0
    for k in range(1, len(run.times)):
        dt = run.times[k] - run.times[k - 1]
        if dt <= 0:
            continue
        a, b = run.phase_history[k - 1], run.phase_history[k]
        ok = ~(a.clamped | b.clamped)
        if ok.any():
            best = max(best, float(np.max(np.abs(b.phi[ok] - a.phi[ok]))) / dt)
    return best
