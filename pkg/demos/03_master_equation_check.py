"""
Cross-check against the full master equation
============================================

The moment equations are exact for this quadratic model, so the second
moments of a truncated Fock-space density matrix must reproduce them as
long as the truncation is not felt.
"""

import numpy as np

from cavity_leak import build_generator, evolve, scaled_regime
from cavity_leak.fock import (FockConfig, check_density_matrix, convergence_check,
                              lindblad_evolve, lindblad_moments, trace_distance,
                              vacuum_density)

p = scaled_regime()
cfg = FockConfig(8, 8)
times = np.linspace(0.0, 20.0, 101)

_, oracle = lindblad_moments(p, cfg, times=times)
moments = evolve(build_generator(p), times=times).states
print("max moment difference:", np.abs(moments - oracle).max())

diff, ok = convergence_check(p, cfg, times[:26])
print(f"8x8 vs 10x10 truncation: {diff:.2e} ({'converged' if ok else 'NOT converged'})")

series = lindblad_evolve(p, cfg, times=times[::20])
for t, rho in series:
    print(f"t = {t:5.1f}  invariants ok: {check_density_matrix(rho) == []}")

# In the rotating-wave model the vacuum is dark and nothing happens
q = scaled_regime(rotating_wave=True)
vac = vacuum_density(cfg)
worst = max(trace_distance(rho, vac) for _, rho in lindblad_evolve(q, cfg, vac, t_end=20.0))
print("rotating-wave trace distance from vacuum:", worst)
