"""
Mass of a Schwarzschild slice from finite spheres
=================================================

The surface integral for the mass evaluated on a coordinate sphere of
radius r is not yet the mass: it carries the conformal factor, and on
the Schwarzschild slice it equals m (1 + m/2r)**3 exactly.
"""

import numpy as np

from comlab import adm_mass_at, adm_com_at, schwarzschild
from comlab.limits import classify, extrapolate

fam = schwarzschild(1.0)

# Finite-radius values against the closed form
for r in [10.0, 50.0, 1e2, 1e3, 1e4]:
    val = adm_mass_at(fam, r)
    print(f"r={r:8.0f}  m_adm={val:.15f}  closed form={(1 + 0.5 / r) ** 3:.15f}")

# A doubling ladder and a polynomial fit in 1/r recover the limit
radii = 10.0 * 2.0 ** np.arange(10)
seq = [(r, [adm_mass_at(fam, r)]) for r in radii]
verdict = classify(seq)
ext = extrapolate(seq, verdict)
print("verdict:", verdict.kind, " limit:", ext.value[0], "+/-", ext.error[0])

# The sphere is centred on the symmetry center, so the center integral cancels
print("center at r=1e3:", adm_com_at(fam, 1e3))
