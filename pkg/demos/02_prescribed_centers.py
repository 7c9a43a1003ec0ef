"""
Families with a prescribed center
=================================

Three ways to move the center of mass of a slice with mass m: translate
the Schwarzschild data, add a York tensor with constant weight, or tilt
the slice by a graph function.  Each center is read off a radius ladder.
"""

import numpy as np

from comlab import adm_com_at, adm_momentum_at, prescribed_graph_slice, prescribed_york, translated_schwarzschild
from comlab.limits import RadiusLadder, classify, extrapolate

ladder = RadiusLadder.default()


def limit(fam, label):
    seq = [(r, adm_com_at(fam, r)) for r in ladder.radii]
    v = classify(seq)
    value = extrapolate(seq, v).value if v.converged else None
    print(f"{label:40s} {v.kind:12s} {value}")


limit(translated_schwarzschild(1.0, (2.0, -1.0, 3.0)), "translated, z=(2,-1,3)")
limit(prescribed_york(1.0, (0.0, 1.0, 0.0)), "York, f=m, P=(0,1,0)")

# The graph slice with lam**3 = 15m/(8|z|^2) settles at -z/2
z = np.array([1.0, 0.0, 0.0])
limit(prescribed_graph_slice(1.0, z), "graph slice, stated amplitude")

# Solving the l=1 balance for lam gives lam**3 = -15m/(4|z|^2), which lands on z
fam = prescribed_graph_slice(1.0, z, corrected=True)
limit(fam, "graph slice, corrected amplitude")

# The momentum of a graph slice decays like 1/r
for r in [1e2, 1e4, 1e6]:
    print(f"  momentum at r={r:.0e}: {adm_momentum_at(fam, r)}")
