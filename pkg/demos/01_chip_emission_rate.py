"""
Photon leakage from an undriven atom-chip cavity
================================================

Ten second-order moments obey a closed linear system. Its fixed point
gives the mean intracavity photon number, and kappa times that number is
the rate at which photons leave the cavity with no drive at all.
"""

import numpy as np

from cavity_leak import (analytic_emission_rate, build_generator, rb_chip_cavity,
                         steady_state)

# Fiber-gap cavity on an atom chip, 10^4 rubidium atoms, D2 line
p = rb_chip_cavity(10_000)
print(p)

gen = build_generator(p)
report = steady_state(gen, p)
formula = analytic_emission_rate(p)

print(f"mean photon number     {report.steady.mu1:.4e}")
print(f"cavity emission rate   {report.i_kappa:.4f} photons/s")
print(f"closed form            {formula.value:.4f} photons/s")
print(f"validity indicator     {formula.validity:.2e}")
print(f"generator condition    {report.condition:.2e}")
print(f"exact residual         {report.residual:.2e}")

# Rate against atom number: close to linear while N gamma < kappa
# (N below ~700 here), steeper once collective atomic decay dominates.
print("\n     N    exact [1/s]   closed form")
for n in np.unique(np.round(np.geomspace(1, 1e5, 11)).astype(int)):
    q = rb_chip_cavity(int(n))
    r = steady_state(build_generator(q), q).i_kappa
    print(f"{n:6d}  {r:12.5g}  {analytic_emission_rate(q).value:12.5g}")
