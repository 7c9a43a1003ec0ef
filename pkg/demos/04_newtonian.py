"""
Newtonian analogues
===================

A matter density with an r**-4 tail has finite mass, but its center of
mass only converges when the odd part decays faster.  With the odd part
u.x/r**5 the center drifts like ln R.
"""

import math

import numpy as np

from comlab.newtonian import (
    NewtonianDensity,
    cutoff_constant,
    newton_com,
    newton_mass,
    newton_moment,
    quasilocal_com,
    quasilocal_mass,
)
from comlab.limits import RadiusLadder, classify

a = cutoff_constant()
print("cut-off constant a =", a)

# Prescribed mass and center
z = np.array([1.0, -2.0, 0.5])
d = NewtonianDensity.prescribed(1.0, z)
for R in [4.0, 1e2, 1e6]:
    print(f"R={R:8.0e} mass={newton_mass(d, R):.12f} law={1 - 1 / ((a + 0.5) * R):.12f} center={newton_com(d, R)}")

# Green's identities turn the volume integrals into flux integrals of U
print("quasi-local mass/center on R=100:", quasilocal_mass(d, z, 100.0), quasilocal_com(d, z, 100.0))

# The divergent density: each factor e of radius adds (4 pi/3) u to the moment
u = np.array([1.0, 0.0, 0.0])
d = NewtonianDensity.divergent_u(u)
R = RadiusLadder.default().radii
num = np.array([newton_moment(d, x) for x in R])
print("moment increment per ln R:", (num[-1, 0] - num[0, 0]) / math.log(R[-1] / R[0]), " 4 pi/3 =", 4 * math.pi / 3)
v = classify([(x, newton_com(d, x)) for x in R])
print("center verdict:", v.kind, " slope", v.slope[0])
