"""
Slices whose center of mass has no limit
========================================

A graph function with a sin(ln r) term, or a York tensor with a weight
that does not settle, makes the finite-radius center wander forever.
The classifier names the behaviour and reports its parameters.
"""

import math

import numpy as np

from comlab import (
    YorkWeight,
    adm_com_at,
    adm_com_deviation_form,
    com_volume_form,
    divergent_graph_slice,
    sweep,
    york_perturbed,
)
from comlab.limits import RadiusLadder, classify

radii = RadiusLadder.default().radii

# Graph slice T = sin ln r + u.x/r: the center oscillates with amplitude |u|/3m
fam = divergent_graph_slice(1.0, (1.0, 0.0, 0.0))
recs = sweep(fam, radii, workers=4)
v = classify([(r.r, r.z_adm) for r in recs])
print("graph slice:", v.kind, " cos coefficient", v.cos_coef[0], " sin coefficient", v.sin_coef[0])

# The same increment as a volume integral of (|Hess T|^2 - (Lap T)^2) x
R0 = radii[0]
z0 = adm_com_deviation_form(fam, R0, simplified=True)
for r in [1e3, 1e5, 1e7]:
    vol = com_volume_form(fam, R0, r) + z0
    print(f"  r={r:.0e}  volume form {vol[0]: .6f}  surface {adm_com_at(fam, r)[0]: .6f}")

# York weights: sin ln r oscillates, r^(1-eps) grows like a power
for w in (YorkWeight("sin_log"), YorkWeight("power", eps=0.75)):
    fam = york_perturbed(1.0, (1.0, 0.0, 0.0), w)
    v = classify([(r, adm_com_at(fam, r)) for r in radii])
    extra = f"exponent {v.exponent:.4f}" if v.kind == "power_divergent" else f"amplitude {v.amplitude[0]:.4f}"
    print(f"York f={w.kind}: {v.kind}, {extra}")

# Closed form for any weight: (f - r f'/2) P / m
r = 1e4
f, df = YorkWeight("sin_log")(r)
print("sin_log law at r=1e4:", f - r * df / 2, " measured:",
      adm_com_at(york_perturbed(1.0, (1, 0, 0), YorkWeight("sin_log")), r)[0])
