"""Unbounded velocity domains: what survives and what breaks.

Three vignettes:

* pure kinetic diffusion has no velocity eigenproblem at all -- the
  truncated principal eigenvalue diverges with the box, and the fundamental
  solution's phase spreads super-linearly (x ~ t^{3/2} at fixed level);
* the Vlasov-Fokker-Planck confinement restores a Gaussian eigenpair with
  H(p) = sigma^4 p^2;
* the confined nonlocal operator has H(p) = Khat(ip) - 1 and an eigenvector
  reconstructed from Fourier data that comes out numerically positive.

Run:  python demos/unbounded_velocity.py      (~15 s)
"""

import numpy as np

from kinetic_fronts.unbounded_models import (
    KolmogorovParams,
    NonlocalKernel,
    convolution_hamiltonian,
    kolmogorov_density,
    kolmogorov_phase_min,
    nonlocal_eigvec,
    spectral_nonexistence_probe,
    vfp_spectral,
)

print("1. kinetic diffusion (no spectral problem)")
rows = spectral_nonexistence_probe(1.0, 1.0)
for half, h in rows:
    print(f"   box half-width {half:5.1f}: principal eigenvalue {h:8.4f}")
print("   no plateau: the whole-space problem has no positive eigenvector")
for t in (1.0, 2.0, 4.0):
    x = 1.3 * t**1.5
    print(f"   phase minimum at x = 1.3 t^(3/2), t = {t}: "
          f"{kolmogorov_phase_min(1.0, t, x):.6f} (constant level set)")
par = KolmogorovParams(1.0)
print(f"   density at (t,x,v) = (1, 0.3, -0.2): "
      f"{float(kolmogorov_density(par, 1.0, 0.3, -0.2)):.6f}\n")

print("2. Vlasov-Fokker-Planck eigenpair")
for sigma, p in ((1.0, 2.0), (1.5, 2.0)):
    sol = vfp_spectral(sigma, p)
    print(f"   sigma = {sigma}, p = {p}: H = {sol.h_value:.4f} "
          f"(= sigma^4 p^2), eigen-residual {sol.residual_rel:.1e}")
print()

print("3. confined nonlocal convolution operator")
for kind, p in (("gaussian", 1.0), ("laplace", 0.5)):
    h = convolution_hamiltonian(NonlocalKernel(kind), p)
    print(f"   {kind} kernel, p = {p}: H = {h:.8f}")
res = nonlocal_eigvec(NonlocalKernel("laplace"), 0.0)
print(f"   Laplace eigenvector at p = 0: min Q = {res.min_q:.2e} "
      f"(numerically positive), Im sup = {res.max_imag:.1e}")
