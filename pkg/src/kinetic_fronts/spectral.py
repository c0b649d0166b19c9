"""Principal eigenvalue of ext + v.p: the effective Hamiltonian H(p).

The discrete problem is

    ext(Q) + (v_i p) Q_i = H(p) Q_i,          Q > 0,  sum_i w_i Q_i = 1,

solved two independent ways:

* solve_direct: Perron pair of the shifted matrix A_p + cI by power iteration.
  Universal (works for all three operator families).
* solve_krein_rutman: the constructive fixed-point route.  For lambda above
  lambda* = max(v_i p - sigma_i), the operator T_lambda(f) = gain(f) / (sigma
  + lambda - v p) has a spectral radius mu_lambda that decreases in lambda;
  H(p) is the unique root of mu_lambda = 1, found by bisection.  Requires a
  strictly positive gain matrix (BGK / positive kernels).

Both solvers start power iterations from the equilibrium M, so results are
deterministic.  Vectors are normalized by the weighted l1 norm, which keeps
iterates positive and makes sum w_i Q_i = 1 exact.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConsistencyError, ConvergenceError
from .operators import DiscreteOperator

__all__ = [
    "SpectralSolution",
    "solve_direct",
    "solve_krein_rutman",
    "solve_adjoint",
    "dispersion_bgk",
    "group_velocity",
    "krein_rutman_mu",
]

EIG_INCREMENT_TOL = 1e-12
MAX_POWER_ITERATIONS = 100_000
RESIDUAL_TOL = 1e-8
KR_BISECTION_TOL = 1e-10
KR_MAX_DOUBLINGS = 60


@dataclass(frozen=True)
class SpectralSolution:
    """One momentum's eigen-data: H(p), the positive eigenvector, residual.

    ``w_adj`` is filled by solve_adjoint and normalized so that
    sum_i w_i W_i Q_i = 1.
    """

    p: float
    h_value: float
    q: np.ndarray
    residual: float
    method: str
    iterations: int
    w_adj: np.ndarray | None = None


def _weighted_normalize(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    return x / np.dot(w, x)


def _power_iteration(matrix, w, start, *, tol=EIG_INCREMENT_TOL,
                     max_iter=MAX_POWER_ITERATIONS, residual_tol=None):
    """Perron pair of a nonnegative irreducible matrix.

    Iterates x <- Ax / <w, Ax> with the weighted-l1 normalization; the
    eigenvalue estimate is <w, Ax>.  Stops when the eigenvalue increment is
    below ``tol`` and (if given) the infinity-norm residual is below
    ``residual_tol``; raises ConvergenceError past ``max_iter``.
    """
    x = _weighted_normalize(np.asarray(start, dtype=float), w)
    lam = np.inf
    for it in range(1, max_iter + 1):
        y = matrix @ x
        lam_new = np.dot(w, y)
        if lam_new <= 0:
            raise ConsistencyError("power iteration lost positivity of the eigenvalue")
        increment = abs(lam_new - lam)
        residual = float(np.max(np.abs(y - lam_new * x)))
        x = y / lam_new
        lam = lam_new
        if increment <= tol and (residual_tol is None or residual <= residual_tol):
            return lam, x, it, residual
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} iterations "
        f"(last increment {increment:.3e}, residual {residual:.3e})"
    )


def _perron_shift(op: DiscreteOperator, a_p: np.ndarray, p: float) -> float:
    """Shift making A_p + cI entrywise nonnegative.

    max(sigma + |v p|) covers BGK and kernel operators; the elliptic stencil
    carries an O(D/dv^2) negative diagonal on top of sigma, so the diagonal
    itself is inspected as well.
    """
    c_sigma = float(np.max(op.sigma + np.abs(op.grid.nodes * p)))
    c_diag = float(np.max(-np.diag(a_p)))
    return max(c_sigma, c_diag) + 1.0


def solve_direct(op: DiscreteOperator, p: float) -> SpectralSolution:
    """Perron route: power iteration on ext + diag(v p) + cI.

    The shift c makes the matrix nonnegative and irreducible, so the positive
    eigenvector is the Perron vector; H(p) is the Perron value minus c.
    """
    a_p = op.matrix_ext + np.diag(op.grid.nodes * p)
    c = _perron_shift(op, a_p, p)
    shifted = a_p + c * np.eye(op.grid.count)
    # residual of the shifted problem equals the residual of the original one;
    # RESIDUAL_TOL absolute is at least as strict as the per-solution invariant
    lam, q, iterations, residual = _power_iteration(
        shifted, op.grid.weights, op.equilibrium.values, residual_tol=RESIDUAL_TOL
    )
    h = lam - c
    if np.min(q) < -1e-12:
        raise ConsistencyError(f"eigenvector has negative entry {np.min(q):.3e}")
    return SpectralSolution(float(p), float(h), q, residual, "direct", iterations)


def krein_rutman_mu(op: DiscreteOperator, p: float, lam: float,
                    start: np.ndarray | None = None):
    """Spectral radius mu_lambda of T_lambda(f) = gain(f) / (sigma + lambda - v p).

    Only defined for lambda > lambda* = max(v p - sigma); decreasing in lambda.
    Returns (mu, fixed vector).
    """
    denom = op.sigma + lam - op.grid.nodes * p
    if np.any(denom <= 0):
        raise ValueError("lambda must exceed lambda* = max(v p - sigma)")
    t_matrix = op.matrix_gain / denom[:, None]
    if start is None:
        start = op.equilibrium.values
    mu, phi, _, _ = _power_iteration(t_matrix, op.grid.weights, start)
    return mu, phi


def solve_krein_rutman(op: DiscreteOperator, p: float) -> SpectralSolution:
    """Constructive route: bisect mu_lambda = 1 on (lambda*, lambda_hi].

    Validates the construction behind the direct solver on compact, strongly
    positive operators; not applicable to the elliptic family.
    """
    if op.kind not in ("bgk", "kernel"):
        raise ValueError(f"Krein-Rutman route needs a BGK or kernel operator, got {op.kind!r}")
    if np.min(op.matrix_gain) <= 0:
        raise ValueError("Krein-Rutman route requires a strictly positive gain matrix")

    w = op.grid.weights
    lam_star = float(np.max(op.grid.nodes * p - op.sigma))
    phi = op.equilibrium.values
    lam_hi = lam_star + 1.0
    for _ in range(KR_MAX_DOUBLINGS):
        mu_hi, phi = krein_rutman_mu(op, p, lam_hi, phi)
        if mu_hi < 1.0:
            break
        lam_hi = lam_star + 2.0 * (lam_hi - lam_star)
    else:
        raise ConvergenceError(
            f"mu_lambda stayed above 1 out to lambda = {lam_hi:.3e}; no dispersion root"
        )

    lo, hi = lam_star, lam_hi
    iterations = 0
    while hi - lo > KR_BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        mu_mid, phi = krein_rutman_mu(op, p, mid, phi)
        if mu_mid >= 1.0:
            lo = mid
        else:
            hi = mid
        iterations += 1

    h = 0.5 * (lo + hi)
    q = _weighted_normalize(phi, w)
    residual = float(np.max(np.abs(op.matrix_ext @ q + op.grid.nodes * p * q - h * q)))
    if np.min(q) < -1e-12:
        raise ConsistencyError(f"eigenvector has negative entry {np.min(q):.3e}")
    return SpectralSolution(float(p), float(h), q, residual, "krein-rutman", iterations)


def solve_adjoint(op: DiscreteOperator, p: float, sol: SpectralSolution) -> SpectralSolution:
    """Adjoint eigenvector under the weighted inner product <a|b> = sum w a b.

    The adjoint matrix is diag(1/w) A^T diag(w); the Perron value must match
    the direct eigenvalue, and W is normalized so <W|Q> = 1.
    """
    w = op.grid.weights
    a_p = op.matrix_ext + np.diag(op.grid.nodes * p)
    adj = (a_p.T * w[None, :]) / w[:, None]
    c = _perron_shift(op, a_p, p)
    lam, w_vec, _, _ = _power_iteration(
        adj + c * np.eye(op.grid.count), w, np.ones(op.grid.count),
        residual_tol=RESIDUAL_TOL,
    )
    h_adj = lam - c
    if abs(h_adj - sol.h_value) > 1e-6 * max(1.0, abs(sol.h_value)):
        raise ConsistencyError(
            f"adjoint eigenvalue {h_adj:.12g} does not match direct value {sol.h_value:.12g}"
        )
    w_vec = w_vec / np.dot(w, w_vec * sol.q)
    return replace(sol, w_adj=w_vec)


def dispersion_bgk(v_max: float, r: float, p: float) -> float:
    """Root H of the BGK dispersion relation for uniform M on [-v_max, v_max].

    The relation is int (1+r) M / ((1+r) + H - v p) dv = 1, written with the
    eigenvector-consistent sign convention; for uniform M the integral has
    the closed log form used here.  Monotonicity of the left side in H makes
    bisection safe.  Reproduces H = v_max p / tanh(v_max p / (1+r)) - (1+r).
    """
    if p == 0.0:
        return 0.0
    s = 1.0 + r
    q = abs(p) * v_max  # even in p for symmetric M and V

    def mu(h: float) -> float:
        # (s / (2 v_max q/v_max)) * log((s+h+q)/(s+h-q)), monotone decreasing in h
        return 0.5 * s / q * np.log((s + h + q) / (s + h - q))

    lo = q - s  # integrand singular here; mu -> +inf
    hi = q + s + 10.0
    if mu(hi) >= 1.0:  # cannot happen: mu(hi) <= s/(2s+10) < 1
        raise ConvergenceError("dispersion bracket failed")
    # never evaluate at the singular endpoint: bisect knowing mu(lo+) = +inf
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mu(mid) >= 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def group_velocity(op: DiscreteOperator, p: float, sol: SpectralSolution) -> float:
    """dH/dp from the eigen-pair: <W | v Q> / <W | Q>.

    Bounded by v_max in absolute value, since Q and W are positive.
    """
    if sol.w_adj is None:
        raise ValueError("group_velocity needs an adjoint-completed solution")
    w = op.grid.weights
    num = float(np.dot(w, sol.w_adj * op.grid.nodes * sol.q))
    den = float(np.dot(w, sol.w_adj * sol.q))
    return num / den
