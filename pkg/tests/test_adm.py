import math

import numpy as np
import pytest

from comlab.adm import (
    MAX_RADIUS_FACTOR,
    adm_com_at,
    adm_com_deviation_form,
    adm_mass_at,
    adm_momentum_at,
    com_volume_form,
    sweep,
)
from comlab.errors import ContractError, DomainError
from comlab.metric import (
    GraphFunction,
    YorkWeight,
    divergent_graph_slice,
    graph_slice,
    prescribed_graph_slice,
    prescribed_york,
    schwarzschild,
    translated_schwarzschild,
    york_perturbed,
)


@pytest.mark.parametrize("m", [0.5, 1.0, 3.0])
@pytest.mark.parametrize("r", [10.0, 50.0, 1e2, 1e3, 1e4])
def test_schwarzschild_mass_law(m, r):
    r = r * m
    assert adm_mass_at(schwarzschild(m), r) == pytest.approx(m * (1 + m / (2 * r)) ** 3, rel=1e-10)


def test_schwarzschild_center_vanishes():
    for r in [3.0, 1e2, 1e6]:
        assert np.max(np.abs(adm_com_at(schwarzschild(1.0), r))) <= 1e-12


@pytest.mark.parametrize("r", [10.0, 1e3, 1e6])
def test_translated_schwarzschild_center_is_z(r):
    z = np.array([2.0, -1.0, 3.0])
    assert np.allclose(adm_com_at(translated_schwarzschild(1.0, z), r), z, rtol=0, atol=1e-12)


@pytest.mark.parametrize("kind", ["const", "sin_log", "power"])
def test_york_center_law(kind):
    # center (f - r f'/2) P / m at every radius
    w = YorkWeight(kind, value=1.0)
    P = np.array([0.0, 1.0, 0.0])
    fam = york_perturbed(2.0, P, w)
    for r in [50.0, 1e3, 1e5]:
        f, df = w(r)
        assert np.allclose(adm_com_at(fam, r), (f - r * df / 2) * P / 2.0, rtol=1e-12, atol=1e-13)


def test_prescribed_york_center():
    assert np.allclose(adm_com_at(prescribed_york(1.0, (0, 1, 0)), 1e4), [0, 1, 0], atol=1e-12)


@pytest.mark.parametrize(
    "fam",
    [
        translated_schwarzschild(1.0, (2, -1, 3)),
        york_perturbed(1.0, (1, 0, 0), YorkWeight("sin_log")),
        divergent_graph_slice(1.0, (1, 0, 0)),
        prescribed_graph_slice(1.0, (1, 0, 0)),
    ],
)
def test_deviation_form_equals_full_integral(fam):
    for r in [20.0, 1e3]:
        assert np.allclose(adm_com_deviation_form(fam, r), adm_com_at(fam, r), rtol=1e-12, atol=1e-14)


def test_simplified_deviation_gap_decays_like_inverse_radius():
    fam = divergent_graph_slice(1.0, (1, 0, 0))
    rs = np.geomspace(1e2, 1e6, 6)
    gaps = [np.linalg.norm(adm_com_deviation_form(fam, r, simplified=True) - adm_com_at(fam, r)) for r in rs]
    assert np.polyfit(np.log(rs), np.log(gaps), 1)[0] <= -0.9


def test_volume_form_matches_simplified_surface_difference():
    fam = divergent_graph_slice(1.0, (1, 0.5, 0))
    R0, r = 100.0, 5e4
    vol = com_volume_form(fam, R0, r)
    surf = adm_com_deviation_form(fam, r, simplified=True) - adm_com_deviation_form(fam, R0, simplified=True)
    assert np.allclose(vol, surf, rtol=1e-10, atol=1e-12)


@pytest.mark.xfail(strict=True, reason="volume integrand with ((Lap T)^2 - |Hess T|^2) has the opposite sign "
                                       "to the surface difference; see decisions ledger")
def test_volume_form_with_lap_minus_hess_sign():
    fam = divergent_graph_slice(1.0, (1, 0, 0))
    R0, r = 100.0, 5e4
    surf = adm_com_deviation_form(fam, r, simplified=True) - adm_com_deviation_form(fam, R0, simplified=True)
    assert np.allclose(-com_volume_form(fam, R0, r), surf, rtol=1e-6)


def test_divergent_slice_increment_amplitude():
    fam = divergent_graph_slice(1.0, (1, 0, 0))
    R0 = 100.0
    z0 = adm_com_at(fam, R0)[0]
    for r in np.geomspace(1e3, 1e9, 7):
        law = (math.cos(math.log(r)) - math.cos(math.log(R0))) / 3
        assert abs(adm_com_at(fam, r)[0] - z0 - law) <= 5e-3


@pytest.mark.xfail(strict=True, reason="measured increment is +(1/3m)(cos ln r - cos ln R0)u; "
                                       "the stated law carries the opposite sign")
def test_divergent_slice_increment_stated_sign():
    fam = divergent_graph_slice(1.0, (1, 0, 0))
    R0, r = 100.0, 100.0 * math.exp(math.pi)
    law = -(math.cos(math.log(r)) - math.cos(math.log(R0))) / 3
    assert abs(adm_com_at(fam, r)[0] - adm_com_at(fam, R0)[0] - law) <= 0.05 / 3


@pytest.mark.xfail(strict=True, reason="with lam^3 = 15m/(8|z|^2) the center tends to -z/2")
def test_prescribed_slice_center_is_z():
    z = np.array([1.0, 0.0, 0.0])
    assert np.linalg.norm(adm_com_at(prescribed_graph_slice(1.0, z), 1e4) - z) <= 0.01


def test_prescribed_slice_center_values():
    z = np.array([1.0, -2.0, 0.5])
    c = adm_com_at(prescribed_graph_slice(1.0, z), 1e6)
    assert np.allclose(c, -z / 2, atol=1e-5)
    c = adm_com_at(prescribed_graph_slice(1.0, z, corrected=True), 1e6)
    assert np.allclose(c, z, atol=1e-5)


def test_graph_slice_mass_is_m():
    for fam in (divergent_graph_slice(1.0, (1, 0, 0)), prescribed_graph_slice(1.0, (1, 0, 0))):
        assert adm_mass_at(fam, 1e5) == pytest.approx(1.0, abs=1e-3)


def test_momentum_decays():
    fam = divergent_graph_slice(1.0, (1, 0, 0))
    rs = np.geomspace(1e2, 1e6, 5)
    p = [np.linalg.norm(adm_momentum_at(fam, r)) for r in rs]
    assert np.polyfit(np.log(rs), np.log(p), 1)[0] <= -0.8
    assert np.allclose(adm_momentum_at(graph_slice(1.0, GraphFunction.zero()), 50.0), 0, atol=1e-15)


def test_momentum_per_mass():
    fam = divergent_graph_slice(2.0, (1, 0, 0))
    assert np.allclose(adm_momentum_at(fam, 300.0, per_mass=True), adm_momentum_at(fam, 300.0) / 2.0)


def test_radius_checks():
    with pytest.raises(DomainError):
        adm_mass_at(schwarzschild(1.0), 0.4)
    with pytest.raises(DomainError):
        adm_mass_at(schwarzschild(1.0), 2 * MAX_RADIUS_FACTOR)
    with pytest.raises(ContractError):
        com_volume_form(divergent_graph_slice(1.0, (1, 0, 0)), 10.0, 5.0)
    with pytest.raises(ValueError):
        adm_momentum_at(schwarzschild(1.0), 10.0)


def test_sweep_is_deterministic_across_workers():
    fam = divergent_graph_slice(1.0, (1, 0, 0))
    radii = np.geomspace(1e2, 1e5, 8)
    a = [r.row() for r in sweep(fam, radii, workers=1)]
    b = [r.row() for r in sweep(fam, radii, workers=4)]
    assert a == b


def test_sweep_requires_increasing_radii():
    with pytest.raises(ContractError):
        sweep(schwarzschild(1.0), [10.0, 5.0])
