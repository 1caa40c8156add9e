"""
Counting photons one trajectory at a time
=========================================

Quantum-jump trajectories unravel the master equation. Averaged over
trajectories, the click rate of each channel should match the stationary
fluxes kappa mu1 and N gamma mu2 from the moment equations.
"""

import numpy as np

from cavity_leak import build_generator, scaled_regime, steady_state
from cavity_leak.fock import FockConfig
from cavity_leak.jumps import ATOMIC, CAVITY, mcwf_trajectories

p = scaled_regime()
report = steady_state(build_generator(p), p)

run = mcwf_trajectories(p, FockConfig(8, 8), t_end=60.0, n_traj=2000, seed=2, workers=2)

for name, channel, expected in (("cavity", CAVITY, report.i_kappa),
                                ("atomic", ATOMIC, report.i_gamma)):
    r = run.click_rate(channel, t_start=10.0)
    print(f"{name}: {r.rate:.5f} +- {r.stderr:.5f}   expected {expected:.5f}")

counts = run.counts()
print("trajectories with no click at all:", int(np.sum(counts == 0)), "of", run.n_traj)
print("most clicks in one trajectory:", int(counts.max()))

# ensemble photon number approaches the stationary value
mu1 = run.mean_moments[:, 0]
for k in (0, 6, 12, 30, 60):
    print(f"t = {run.times[k]:5.1f}  <n> = {mu1[k]:.5f} +- {run.moment_stderr[k, 0]:.5f}")
print(f"stationary        {report.steady.mu1:.5f}")
