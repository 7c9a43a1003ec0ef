import math

import numpy as np
import pytest

from comlab.cmc import (
    CmcFit,
    cmc_center_sweep,
    cmc_residual,
    fit_cmc_sphere,
    leaf_mean_curvature,
    sphere_mean_curvature,
)
from comlab.metric import YorkWeight, prescribed_york, schwarzschild, translated_schwarzschild, york_perturbed
from comlab.quadrature import sphere_grid


def _closed(m, r):
    return 2 * (1 - m / (2 * r)) / (r * (1 + m / (2 * r)) ** 3)


@pytest.mark.parametrize("m,r", [(1.0, 10.0), (1.0, 3.0), (2.0, 100.0), (0.5, 1e4)])
def test_schwarzschild_sphere_mean_curvature(m, r):
    H = sphere_mean_curvature(schwarzschild(m), np.zeros(3), r, sphere_grid().nodes)
    assert np.max(np.abs(H - _closed(m, r))) <= 1e-9 * _closed(m, r) * r
    assert np.ptp(H) <= 1e-12


@pytest.mark.xfail(strict=True, reason="0.1641131 is a misprint of 2(1-1/20)/(10*1.05^3) = 0.1641291")
def test_mean_curvature_printed_decimal():
    H = sphere_mean_curvature(schwarzschild(1.0), np.zeros(3), 10.0, sphere_grid().nodes)
    assert abs(H[0] - 0.1641131) <= 1e-7


def test_flat_limit_and_off_center_spheres_are_not_cmc():
    fam = schwarzschild(1e-12)
    H = sphere_mean_curvature(fam, np.array([1.0, 2.0, 3.0]), 7.0, sphere_grid().nodes)
    assert np.allclose(H, 2 / 7.0, rtol=1e-10)
    fam = schwarzschild(1.0)
    assert cmc_residual(fam, np.array([2.0, 0, 0]), 20.0) > 1e-6
    assert cmc_residual(fam, np.zeros(3), 20.0) <= 1e-25


def test_leaf_mean_curvature():
    assert leaf_mean_curvature(1.0, 20.0) == pytest.approx(2 / 20 - 4 / 400)


def test_fit_recovers_schwarzschild_center():
    sigma = 20.0
    init = CmcFit(center=np.array([0.5, 0.0, 0.0]), radius=sigma, mean_H=np.nan, residual=np.nan)
    fit = fit_cmc_sphere(schwarzschild(1.0), sigma, init=init)
    assert np.linalg.norm(fit.center) <= 1e-6 * sigma
    assert fit.residual <= 1e-10
    assert fit.mean_H == pytest.approx(leaf_mean_curvature(1.0, sigma), rel=1e-6)


def test_fit_tracks_translated_center():
    z = np.array([0.0, 0.0, 1.0])
    fit = fit_cmc_sphere(translated_schwarzschild(1.0, z), 400.0)
    assert np.linalg.norm(fit.center - z) <= 0.05


def test_prescribed_york_centers():
    fam = prescribed_york(1.0, (0, 0, 1))
    fits = cmc_center_sweep(fam, [200.0, 400.0, 800.0])
    for _, f in fits:
        assert np.linalg.norm(f.center - [0, 0, 1]) <= 0.1


def test_york_sin_centers_follow_center_integral_law():
    # centers follow (f - sigma f'/2) P / m, the finite-radius ADM law
    fam = york_perturbed(1.0, (1, 0, 0), YorkWeight("sin_log"))
    sig = [300.0, 300.0 * math.exp(math.pi / 2)]
    fits = cmc_center_sweep(fam, sig)
    for s, f in fits:
        law = math.sin(math.log(s)) - math.cos(math.log(s)) / 2
        assert f.center[0] == pytest.approx(law, abs=0.02)


def test_sweep_records_failures_and_continues():
    fam = schwarzschild(1.0)
    fits = cmc_center_sweep(fam, [0.2, 30.0])
    assert fits[0][1] is None
    assert fits[1][1] is not None and np.linalg.norm(fits[1][1].center) < 1e-6
