"""Walk through the spectral machinery on the BGK operator.

Builds the discrete scattering operator on V = [-1, 1], solves the
principal-eigenvalue problem three independent ways (power iteration,
Krein-Rutman fixed point, dispersion-relation root), and compares all of
them against the closed form H(p) = p / tanh(p / (1+r)) - (1+r).

Run:  python demos/bgk_hamiltonian.py
"""

import numpy as np

from kinetic_fronts.operators import build_bgk
from kinetic_fronts.spectral import (
    dispersion_bgk,
    group_velocity,
    solve_adjoint,
    solve_direct,
    solve_krein_rutman,
)
from kinetic_fronts.velocity_space import make_grid, uniform_equilibrium

R = 1.0
N = 201

grid = make_grid(1.0, N)
op = build_bgk(grid, uniform_equilibrium(grid), R)

print(f"BGK operator on [-1, 1], N = {N}, r = {R}")
print(f"{'p':>5} {'power it.':>12} {'Krein-Rutman':>13} {'dispersion':>12} "
      f"{'closed form':>12} {'dH/dp':>9}")
for p in (0.25, 0.5, 1.0, 2.0, 3.0):
    direct = solve_direct(op, p)
    kr = solve_krein_rutman(op, p)
    disp = dispersion_bgk(1.0, R, p)
    closed = p / np.tanh(p / (1.0 + R)) - (1.0 + R)
    gv = group_velocity(op, p, solve_adjoint(op, p, direct))
    print(f"{p:5.2f} {direct.h_value:12.8f} {kr.h_value:13.8f} "
          f"{disp:12.8f} {closed:12.8f} {gv:9.5f}")

print("\nThe two matrix solvers agree to ~1e-9 (same discrete problem);")
print("the dispersion root is quadrature-free and matches the closed form")
print("to machine precision.  The discrete eigenvalue carries the O(N^-2)")
print("midpoint-rule offset, visible in the last digits.")
