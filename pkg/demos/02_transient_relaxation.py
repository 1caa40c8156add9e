"""
From the bare vacuum to the dressed steady state
================================================

Start in |0,0>. The counter-rotating coupling is not stationary there, so
the moments ring at the optical frequency scale and relax at zeta / 2.
Units are scaled: omega = 10, g = kappa = gamma = 1.
"""

import numpy as np

from cavity_leak import build_generator, evolve, exact_evolution, scaled_regime, steady_state
from cavity_leak.model import VACUUM

p = scaled_regime()
gen = build_generator(p)
ss = steady_state(gen, p).steady

traj = evolve(gen, t_end=20.0, n_samples=401)
mu1 = traj.column("mu1")

# eigenvalues of the generator: every real part equals -zeta/2 at resonance
lam = np.linalg.eigvals(gen.A)
print("Re(lambda):", np.unique(np.round(lam.real, 12)))
print("Im(lambda):", np.sort(np.round(lam.imag, 4)))

for t in (0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0):
    k = np.searchsorted(traj.times, t)
    print(f"t = {t:5.1f}   mu1 = {mu1[k]: .6e}")
print(f"steady      mu1 = {ss.mu1: .6e}")

ref = exact_evolution(gen, VACUUM, traj.times)
print("max |adaptive - expm| =", np.abs(traj.states - ref).max())
print("steps accepted/rejected:", traj.stats.accepted, traj.stats.rejected)
