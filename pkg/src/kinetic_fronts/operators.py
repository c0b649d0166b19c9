"""Discrete scattering operators and their growth extensions.

A scattering operator has the form L = P - Sigma with Ker(L) = Span(M) and
discrete mass conservation sum_i w_i (L f)_i = 0.  The growth extension is

    ext(f) = L(f) + r (M rho - f),     rho = sum_j w_j f_j,

which is the operator whose principal eigenvalue problem defines the
effective Hamiltonian.  Three families are supported:

* BGK:        (L f)_i = M_i rho - f_i
* kernel:     (L f)_i = sum_j w_j K_ij f_j - (sum_j w_j K_ji) f_i
* elliptic:   (L f)_i = conservative flux form of (D f')' with zero-flux ends

Kernel operators must satisfy the discrete detailed-balance condition
sum_j w_j K_ij M_j = M_i sum_j w_j K_ji, the simplest verifiable sufficient
condition for L M = 0 on a grid.
"""

from dataclasses import dataclass

import numpy as np

from .velocity_space import Equilibrium, VelocityGrid

__all__ = [
    "DiscreteOperator",
    "build_bgk",
    "build_kernel",
    "build_elliptic",
    "apply_ext",
    "scale_operator",
    "barycentric_operator",
]

_BALANCE_TOL = 1e-8


@dataclass(frozen=True)
class DiscreteOperator:
    """Matrix form of L and of its growth extension, plus the loss rates.

    ``sigma`` holds Sigma(v_i) + r, the total per-node loss rate (Sigma = 1
    for BGK, weighted kernel column sums for kernel operators, 0 for the
    Neumann elliptic family).  Immutable; apply_ext is reentrant.
    """

    kind: str
    grid: VelocityGrid
    equilibrium: Equilibrium
    growth_rate: float
    matrix_L: np.ndarray
    matrix_ext: np.ndarray
    sigma: np.ndarray

    @property
    def matrix_gain(self) -> np.ndarray:
        """Gain part of the extension: ext(f) = gain(f) - sigma * f."""
        return self.matrix_ext + np.diag(self.sigma)


def _check_growth(r: float) -> float:
    if r < 0:
        raise ValueError(f"growth rate must be >= 0, got {r}")
    return float(r)


def build_bgk(grid: VelocityGrid, equilibrium: Equilibrium, r: float) -> DiscreteOperator:
    """BGK relaxation operator L(f) = M rho - f with growth rate r.

    The extension collapses to (1+r)(M rho - f), so matrix_ext = (1+r) matrix_L.
    """
    r = _check_growth(r)
    m = equilibrium.values
    matrix_L = np.outer(m, grid.weights) - np.eye(grid.count)
    matrix_ext = (1.0 + r) * matrix_L
    sigma = np.full(grid.count, 1.0 + r)
    return DiscreteOperator("bgk", grid, equilibrium, r, matrix_L, matrix_ext, sigma)


def build_kernel(
    grid: VelocityGrid,
    kernel_values: np.ndarray,
    r: float,
    equilibrium: Equilibrium,
) -> DiscreteOperator:
    """Kernel operator (L f)_i = sum_j w_j K_ij f_j - Sigma_i f_i.

    Rejects kernels that fail the discrete detailed-balance condition, since
    the equilibrium would then not lie in Ker(L).
    """
    r = _check_growth(r)
    k = np.asarray(kernel_values, dtype=float)
    n = grid.count
    if k.shape != (n, n):
        raise ValueError(f"kernel must be {n}x{n}, got {k.shape}")
    if np.any(k < 0):
        raise ValueError("kernel entries must be nonnegative")

    m = equilibrium.values
    w = grid.weights
    gain_on_m = k @ (w * m)          # sum_j w_j K_ij M_j
    loss = k.T @ w                   # Sigma_i = sum_j w_j K_ji
    balance = gain_on_m - m * loss
    scale = max(np.max(np.abs(gain_on_m)), 1e-300)
    worst = int(np.argmax(np.abs(balance)))
    if np.abs(balance[worst]) > _BALANCE_TOL * scale:
        raise ValueError(
            "kernel violates discrete detailed balance: node "
            f"{worst} (v = {grid.nodes[worst]:.6g}) has residual "
            f"{balance[worst]:.3e} against scale {scale:.3e}"
        )

    matrix_L = k * w[None, :] - np.diag(loss)
    matrix_ext = matrix_L + r * (np.outer(m, w) - np.eye(n))
    sigma = loss + r
    return DiscreteOperator("kernel", grid, equilibrium, r, matrix_L, matrix_ext, sigma)


def build_elliptic(
    grid: VelocityGrid,
    diffusivity: np.ndarray,
    r: float,
    equilibrium: Equilibrium,
) -> DiscreteOperator:
    """Neumann elliptic operator L(f) = (D f')' in conservative flux form.

    Interface diffusivities are arithmetic means; the end fluxes are zero, so
    weighted column sums telescope to zero exactly.  The Neumann equilibrium
    is the constant density, which the constructor enforces.
    """
    r = _check_growth(r)
    d = np.asarray(diffusivity, dtype=float)
    n = grid.count
    if d.shape == ():
        d = np.full(n, float(d))
    if d.shape != (n,):
        raise ValueError(f"diffusivity must have {n} entries, got shape {d.shape}")
    if np.any(d <= 0):
        raise ValueError("diffusivity must be strictly positive")
    m = equilibrium.values
    if np.max(np.abs(m - m[0])) > 1e-12 * max(abs(m[0]), 1e-300):
        raise ValueError("elliptic operator requires a uniform equilibrium")

    dv = grid.dv
    d_half = 0.5 * (d[:-1] + d[1:])  # interface values D_{i+1/2}
    matrix_L = np.zeros((n, n))
    idx = np.arange(n - 1)
    matrix_L[idx, idx + 1] += d_half / dv**2
    matrix_L[idx + 1, idx] += d_half / dv**2
    matrix_L[idx, idx] -= d_half / dv**2
    matrix_L[idx + 1, idx + 1] -= d_half / dv**2

    matrix_ext = matrix_L + r * (np.outer(m, grid.weights) - np.eye(n))
    sigma = np.full(n, r)  # Sigma = 0 for the Neumann family
    return DiscreteOperator("elliptic", grid, equilibrium, r, matrix_L, matrix_ext, sigma)


def apply_ext(op: DiscreteOperator, f: np.ndarray) -> np.ndarray:
    """Apply the growth extension ext(f) = L(f) + r(M rho - f)."""
    f = np.asarray(f)
    if f.shape != (op.grid.count,):
        raise ValueError(f"expected {op.grid.count} values, got shape {f.shape}")
    return op.matrix_ext @ f


def scale_operator(op: DiscreteOperator, mu: float) -> DiscreteOperator:
    """Operator with scattering part mu * L.  Only defined for r = 0.

    Used to exercise the scaling identity H_{mu L}(p) = mu H_L(p / mu).
    """
    if mu <= 0:
        raise ValueError("scale factor must be positive")
    if op.growth_rate != 0:
        raise ValueError("scale_operator requires a growth-free operator (r = 0)")
    return DiscreteOperator(
        op.kind,
        op.grid,
        op.equilibrium,
        0.0,
        mu * op.matrix_L,
        mu * op.matrix_ext,
        mu * op.sigma,
    )


def barycentric_operator(op: DiscreteOperator) -> DiscreteOperator:
    """The normalized operator (L + r(M rho - .)) / (1+r), with growth turned off.

    Its Hamiltonian relates to the original one by
    H(p) = (1+r) H_bar(p / (1+r)).
    """
    s = 1.0 + op.growth_rate
    return DiscreteOperator(
        op.kind,
        op.grid,
        op.equilibrium,
        0.0,
        op.matrix_ext / s,
        op.matrix_ext / s,
        op.sigma / s,
    )
