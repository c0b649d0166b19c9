"""Velocity-space discretization.

The velocity set is the symmetric interval V = [-v_max, v_max], discretized
with the midpoint rule on N equal cells.  Midpoints keep the grid exactly
symmetric for every N, keep all weights positive, and make the discrete
conservation identities of the scattering operators exact, which the spectral
and kinetic modules rely on.  The price is second-order accuracy, which is
enough here.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["VelocityGrid", "Equilibrium", "make_grid", "uniform_equilibrium", "integrate"]


@dataclass(frozen=True)
class VelocityGrid:
    """Midpoint grid on [-v_max, v_max]: nodes v_i, quadrature weights w_i.

    Treated as immutable after construction; safe to share between solves.
    """

    nodes: np.ndarray
    weights: np.ndarray
    v_max: float

    @property
    def count(self) -> int:
        return self.nodes.size

    @property
    def dv(self) -> float:
        return 2.0 * self.v_max / self.count


@dataclass(frozen=True)
class Equilibrium:
    """Per-node values of the equilibrium density M(v_i)."""

    values: np.ndarray


def make_grid(v_max: float, n: int) -> VelocityGrid:
    """Build the midpoint grid with ``n`` cells on [-v_max, v_max].

    Nodes are cell midpoints, so v_i = -v_{N-1-i} holds exactly and
    sum(w_i) = 2 v_max up to round-off.
    """
    if n < 3:
        raise ValueError(f"need at least 3 velocity nodes, got {n}")
    if v_max <= 0:
        raise ValueError(f"v_max must be positive, got {v_max}")
    dv = 2.0 * v_max / n
    nodes = -v_max + dv * (np.arange(n) + 0.5)
    weights = np.full(n, dv)
    return VelocityGrid(nodes=nodes, weights=weights, v_max=float(v_max))


def uniform_equilibrium(grid: VelocityGrid) -> Equilibrium:
    """Uniform density M = 1/(2 v_max); normalized exactly under midpoint weights."""
    return Equilibrium(values=np.full(grid.count, 1.0 / (2.0 * grid.v_max)))


def integrate(grid: VelocityGrid, values: np.ndarray) -> float:
    """Quadrature sum(w_i * values_i), the discrete version of the velocity integral."""
    values = np.asarray(values)
    if values.shape != (grid.count,):
        raise ValueError(f"expected {grid.count} values, got shape {values.shape}")
    return float(np.dot(grid.weights, values))
