"""
How far the ground state is from the empty vacuum
=================================================

With counter-rotating terms the lowest eigenstate is a squeezed,
entangled state. Its weight outside |0,0> grows as (sqrt(N) g / omega)^2.
"""

import numpy as np

from cavity_leak.fock import FockConfig, ground_state
from cavity_leak.validation import ground_state_sweep
from cavity_leak import scaled_regime

couplings = np.logspace(-1, 0.5, 9)
x, deficit, entropy = ground_state_sweep(couplings, cfg=FockConfig(10, 10))

print("   x=G/w     1-|<00|E0>|^2     entropy")
for xi, d, s in zip(x, deficit, entropy):
    print(f"{xi:9.4f}  {d:14.4e}  {s:12.4e}")

slope = np.polyfit(np.log(x[:6]), np.log(deficit[:6]), 1)[0]
print("log-log slope at weak coupling:", round(slope, 4))

gs = ground_state(scaled_regime(), FockConfig(10, 10))
print("energy shift", gs.energy, " gap", gs.gap)
print("largest amplitudes:", np.round(np.sort(np.abs(gs.state))[::-1][:4], 5))
