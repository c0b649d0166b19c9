"""Effective Hamiltonians of kinetic reaction-transport equations and front dynamics.

Subpackage map:

* velocity_space   -- midpoint quadrature on the symmetric velocity interval
* operators        -- BGK / kernel / elliptic scattering matrices and growth extension
* spectral         -- principal-eigenvalue solvers for the effective Hamiltonian H(p)
* hamiltonian      -- Hamiltonian models, Legendre transform, minimal front speed
* hj_solver        -- monotone (Lax-Friedrichs) solver for the limit Hamilton-Jacobi
                      equation and its obstacle-constrained variant
* kinetic_solver   -- finite-epsilon kinetic solver, phase extraction, convergence study
* unbounded_models -- closed-form and Fourier models on unbounded velocity domains
* cli              -- batch front end emitting CSV artifacts
"""

__version__ = "0.1.0"
