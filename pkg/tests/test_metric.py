import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from comlab import metric
from comlab.errors import ConfigError, ConsistencyError, DomainError
from comlab.metric import (
    GraphFunction,
    YorkWeight,
    christoffel,
    divergent_graph_slice,
    eval_jet,
    extrinsic_data,
    family_from_json,
    family_to_json,
    prescribed_graph_slice,
    prescribed_york,
    scalar_curvature,
    schwarzschild,
    translated_schwarzschild,
    york_perturbed,
)
from comlab.verify import FAMILIES, derivative_error, gauss_residual

ALL = sorted(FAMILIES)


def _points(n, lo, hi, seed=0):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    return v * np.exp(rng.uniform(math.log(lo), math.log(hi), n))[:, None]


@pytest.mark.parametrize("name", ALL)
def test_first_derivatives_match_finite_differences(name):
    assert derivative_error(FAMILIES[name](), n=200, seed=3) <= 1e-6


def test_schwarzschild_is_conformally_flat():
    x = _points(50, 1.0, 1e3)
    g = eval_jet(schwarzschild(2.0), x).g
    r = np.linalg.norm(x, axis=1)
    phi4 = (1 + 1.0 / r) ** 4
    assert np.allclose(g, phi4[:, None, None] * np.eye(3), rtol=1e-15, atol=0)


def test_translated_schwarzschild_deviation():
    z = np.array([2.0, -1.0, 3.0])
    fam = translated_schwarzschild(1.0, z)
    x = np.array([[30.0, 4.0, -7.0]])
    r = np.linalg.norm(x)
    h = metric.deviation(fam, x)[0]
    assert np.allclose(h, 2 * (z @ x[0]) / r**3 * np.eye(3), rtol=1e-14)


def test_york_tensor_is_transverse_traceless_in_flat_space():
    fam = york_perturbed(1.0, (0.3, -1.0, 2.0), YorkWeight("const", value=1.0))
    x = _points(40, 3.0, 1e3, seed=5)
    jet = metric.deviation_jet(fam, x)
    h, dh = jet.g, jet.dg
    scale = np.max(np.abs(dh), axis=(1, 2, 3))
    assert np.max(np.abs(np.einsum("...ii->...", h))) <= 1e-15 * np.max(np.abs(h))
    div = np.einsum("...iij->...j", dh)
    assert np.max(np.abs(div) / scale[:, None]) <= 1e-13


def _sym_T(kind):
    X = sp.symbols("x0:3", real=True)
    r = sp.sqrt(sum(c**2 for c in X))
    if kind == "divergent":
        u = (sp.Rational(1), sp.Rational(-1, 2), sp.Rational(1, 3))
        T = sp.sin(sp.log(r)) + sum(a * b for a, b in zip(u, X)) / r
        g = GraphFunction.divergent([float(c) for c in u])
    else:
        z = (sp.Rational(1), sp.Rational(2), sp.Rational(-1, 2))
        g = GraphFunction.prescribed(1.0, [float(c) for c in z])
        lam = sp.Float(g.lam, 30)
        s = sum(a * b for a, b in zip(z, X)) / r
        T = lam * s + (lam * s) ** 2
    return X, T, g


@pytest.mark.parametrize("kind", ["divergent", "prescribed"])
def test_graph_function_derivatives_against_symbolic(kind):
    X, T, g = _sym_T(kind)
    grad = [sp.diff(T, c) for c in X]
    hess = [[sp.diff(d, c) for c in X] for d in grad]
    f = sp.lambdify(X, [T, grad, hess], "numpy")
    for p in ([3.0, -1.0, 2.0], [0.4, 0.2, -0.7], [120.0, 35.0, -60.0]):
        T0, dT, ddT = g.derivs(np.array(p))
        Te, dTe, ddTe = f(*p)
        assert T0 == pytest.approx(float(Te), rel=1e-12, abs=1e-14)
        assert np.allclose(dT, np.array(dTe, float), rtol=1e-11, atol=1e-15)
        assert np.allclose(ddT, np.array(ddTe, float), rtol=1e-10, atol=1e-15)


def test_domain_error_names_the_point():
    fam = schwarzschild(1.0)
    with pytest.raises(DomainError, match=r"r=0\.3"):
        eval_jet(fam, np.array([[10.0, 0, 0], [0.3, 0, 0]]))


def test_non_positive_metric_is_reported():
    fam = translated_schwarzschild(1.0, (50.0, 0, 0), r_min=0.6)
    with pytest.raises(ConsistencyError):
        eval_jet(fam, np.array([-0.7, 0.0, 0.0]))


def test_power_weight_range_is_enforced():
    with pytest.raises(ConfigError):
        YorkWeight("power", eps=0.3)


def test_scalar_curvature_vanishes_for_schwarzschild():
    x = _points(30, 2.0, 100.0)
    R = scalar_curvature(schwarzschild(1.0), x)
    # R is a sum of O(m/r^3) Christoffel products that cancel
    assert np.max(np.abs(R) * np.linalg.norm(x, axis=1) ** 3) <= 1e-6


def test_gauss_equation_on_graph_slices():
    for name in ("divergent_slice", "prescribed_slice"):
        assert gauss_residual(FAMILIES[name](), n=100) <= 1e-6


def _k_oracle(fam, x, h=1e-4):
    # K_ij = e_i^mu e_j^nu nabla_mu n_nu for t = T(x) in -N^2 dt^2 + g_m, from 4D Christoffels
    m = fam.m

    def n_lower(y):
        ry = np.linalg.norm(y)
        gm, _ = metric._background(m, y, ry)
        N, _ = metric.lapse(m, ry)
        _, dT, _ = fam.graph.derivs(y)
        a = 1 / np.sqrt(1 / N**2 - dT @ np.linalg.inv(gm) @ dT)
        return np.concatenate([[-a], a * dT])

    r = np.linalg.norm(x)
    gm, dgm = metric._background(m, x, r)
    gi = np.linalg.inv(gm)
    N, dNr = metric.lapse(m, r)
    dN = dNr * x / r
    G = np.zeros((4, 4, 4))
    G[1:, 1:, 1:] = christoffel(gi, dgm)
    G[0, 0, 1:] = G[0, 1:, 0] = dN / N
    G[1:, 0, 0] = N * gi @ dN
    dn = np.zeros((4, 4))
    for k in range(3):
        e = np.zeros(3)
        e[k] = h * r
        dn[k + 1] = (n_lower(x + e) - n_lower(x - e)) / (2 * h * r)
    nab = dn - np.einsum("lmn,l->mn", G, n_lower(x))
    _, dT, _ = fam.graph.derivs(x)
    E = np.zeros((3, 4))
    E[:, 0] = dT
    E[:, 1:] = np.eye(3)
    return E @ nab @ E.T


@pytest.mark.parametrize("fam", [divergent_graph_slice(1.0, (1, 0, 0)), prescribed_graph_slice(1.0, (1, -2, 0.5))])
def test_extrinsic_curvature_against_spacetime_oracle(fam):
    for x in ([3.0, 1.0, -2.0], [20.0, -7.0, 5.0], [1.2, 0.1, 0.3]):
        x = np.array(x)
        K = extrinsic_data(fam, x).K
        assert np.max(np.abs(K - _k_oracle(fam, x))) <= 1e-6 * np.max(np.abs(K))


def test_momentum_tensor_definition():
    fam = divergent_graph_slice(2.0, (0.5, 0.5, 0))
    x = _points(20, 5.0, 500.0)
    ex = extrinsic_data(fam, x)
    assert np.allclose(ex.Pi, ex.trK[:, None, None] * ex.g - ex.K, rtol=0, atol=1e-18)
    assert np.allclose(ex.K, np.swapaxes(ex.K, -1, -2), atol=1e-18)


@pytest.mark.parametrize(
    "obj",
    [
        {"kind": "schwarzschild", "m": 2.0},
        {"kind": "translated_schwarzschild", "m": 1, "z": [2, -1, 3]},
        {"kind": "york_perturbed", "m": 1, "P": [0, 1, 0], "f": {"type": "const"}},
        {"kind": "york_perturbed", "m": 1, "P": [1, 0, 0], "f": {"type": "power", "eps": 0.6}},
        {"kind": "graph_slice", "m": 1, "T": {"type": "divergent", "u": [1, 0, 0]}},
        {"kind": "graph_slice", "m": 1, "z": [1, 0, 0], "T": {"type": "prescribed"}},
        {"kind": "graph_slice", "m": 1, "z": [1, 0, 0], "T": {"type": "prescribed", "corrected": True}},
    ],
)
def test_json_round_trip(obj):
    fam = family_from_json(obj)
    assert family_from_json(family_to_json(fam)) == fam


@pytest.mark.parametrize(
    "obj",
    [
        {"kind": "schwarzschild", "m": 1, "extra": 1},
        {"kind": "schwarzschild", "m": -1},
        {"kind": "schwarzschild", "m": 1, "z": [1, 0, 0]},
        {"kind": "york_perturbed", "m": 1, "P": [1, 0, 0]},
        {"kind": "york_perturbed", "m": 1, "P": [1, 0, 0], "f": {"type": "power", "eps": 0.4}},
        {"kind": "graph_slice", "m": 1, "T": {"type": "divergent"}},
        {"kind": "graph_slice", "m": 1, "T": {"type": "zero", "corrected": True}},
        "{not json",
    ],
)
def test_json_rejects_bad_configs(obj):
    with pytest.raises(ConfigError):
        family_from_json(obj)


def test_prescribed_york_uses_constant_weight_m():
    fam = prescribed_york(3.0, (0, 1, 0))
    assert fam.weight.kind == "const" and fam.weight.value == 3.0
    assert fam.P == (0.0, 1.0, 0.0)


@settings(max_examples=60, deadline=None)
@given(
    st.floats(0.1, 10.0),
    st.tuples(*[st.floats(-1, 1)] * 3),
    st.floats(5.0, 1e4),
    st.tuples(*[st.floats(-1, 1)] * 3).filter(lambda v: sum(c * c for c in v) > 1e-4),
)
def test_metric_is_symmetric_and_positive(m, u, rfac, d):
    fam = divergent_graph_slice(m, u)
    d = np.array(d) / np.linalg.norm(d)
    g = eval_jet(fam, rfac * m * d).g
    assert np.array_equal(g, g.T)
    assert np.all(np.linalg.eigvalsh(g) > 0)
