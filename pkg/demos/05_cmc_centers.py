"""
Centers of round CMC spheres
============================

Round coordinate spheres whose mean curvature is as close as possible to
the leaf value 2/sigma - 4m/sigma**2 locate the center of the CMC leaf.
"""

import math

import numpy as np

from comlab import CmcFit, YorkWeight, fit_cmc_sphere, schwarzschild, sphere_mean_curvature, york_perturbed
from comlab.cmc import cmc_center_sweep
from comlab.quadrature import sphere_grid

# Round spheres about the origin are exact CMC surfaces in Schwarzschild
H = sphere_mean_curvature(schwarzschild(1.0), np.zeros(3), 10.0, sphere_grid().nodes)
print("H on r=10:", H.mean(), " spread", np.ptp(H), " closed form", 2 * 0.95 / (10 * 1.05**3))

# Start the fit off-center and watch it come back
init = CmcFit(center=np.array([0.5, 0, 0]), radius=20.0, mean_H=np.nan, residual=np.nan)
fit = fit_cmc_sphere(schwarzschild(1.0), 20.0, init=init)
print("fitted center:", fit.center, " radius", fit.radius, " residual", fit.residual)

# York f = sin ln r: the fitted centers oscillate over one period of ln sigma
fam = york_perturbed(1.0, (1.0, 0.0, 0.0), YorkWeight("sin_log"))
sig = 200.0 * np.exp(np.arange(9) * math.pi / 4)
for s, f in cmc_center_sweep(fam, sig):
    ls = math.log(s)
    print(f"sigma={s:9.1f} center_x={f.center[0]: .5f}  (2 sin - cos)/2={math.sin(ls) - math.cos(ls) / 2: .5f}")
