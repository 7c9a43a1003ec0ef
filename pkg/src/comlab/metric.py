"""Exterior metric families with analytic first derivatives.

Every family is the Riemannian Schwarzschild metric ``g_m = phi**4 delta``
(``phi = 1 + m/2r``) plus an explicit deviation ``h``:

* ``schwarzschild``             h = 0
* ``translated_schwarzschild``  h = 2 m (z.x) / r**3 delta
* ``york_perturbed``            h = -2 f(r) Y,  Y the York momentum tensor
* ``graph_slice``               h = -N**2 dT (x) dT, the metric induced on
                                 the slice ``t = T(x)`` of the Schwarzschild
                                 spacetime, N the static lapse

Arrays follow one layout throughout the package: points are ``(..., 3)``,
metric values ``(..., 3, 3)``, first derivatives ``dg[..., k, i, j] =
d_k g_ij`` and second derivatives ``ddg[..., k, l, i, j] = d_k d_l g_ij``.
Symmetry in ``(i, j)`` holds by construction because every tensor is
assembled from symmetric building blocks.

Geometric units G = c = 1 are used everywhere.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import jsonschema
import numpy as np

from .errors import ConfigError, ConsistencyError, DomainError

__all__ = [
    "KINDS",
    "GraphFunction",
    "YorkWeight",
    "MetricFamily",
    "MetricJet",
    "ExtrinsicData",
    "schwarzschild",
    "translated_schwarzschild",
    "york_perturbed",
    "prescribed_york",
    "graph_slice",
    "divergent_graph_slice",
    "prescribed_graph_slice",
    "prescribed_lambda",
    "lapse",
    "conformal_factor",
    "eval_jet",
    "background_jet",
    "deviation",
    "deviation_jet",
    "christoffel",
    "extrinsic_data",
    "scalar_curvature",
    "family_from_json",
    "family_to_json",
    "FAMILY_SCHEMA",
]

KINDS = ("schwarzschild", "translated_schwarzschild", "york_perturbed", "graph_slice")

EYE = np.eye(3)


def _radius(x):
    return np.sqrt(np.einsum("...i,...i->...", x, x))


def _outer(a, b):
    return a[..., :, None] * b[..., None, :]


# --------------------------------------------------------------------------
# York weight functions and graph functions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class YorkWeight:
    """Radial weight ``f`` multiplying the York tensor.

    ``kind`` is one of ``"sin_log"`` (f = sin ln r), ``"power"``
    (f = r**(1 - eps), eps in (1/2, 1)) or ``"const"`` (f = value).
    """

    kind: str
    eps: float = 0.75
    value: float = 1.0

    def __post_init__(self):
        if self.kind not in ("sin_log", "power", "const"):
            raise ConfigError(f"unknown York weight {self.kind!r}")
        if self.kind == "power" and not (0.5 < self.eps < 1.0):
            raise ConfigError(f"power weight needs eps in (1/2, 1), got {self.eps}")

    def __call__(self, r):
        """Return ``(f(r), f'(r))``."""
        r = np.asarray(r, dtype=float)
        if self.kind == "sin_log":
            lr = np.log(r)
            return np.sin(lr), np.cos(lr) / r
        if self.kind == "power":
            return r ** (1.0 - self.eps), (1.0 - self.eps) * r ** (-self.eps)
        return np.full_like(r, self.value), np.zeros_like(r)

    def second(self, r):
        """Second derivative ``f''(r)``; used only by closed-form oracles."""
        r = np.asarray(r, dtype=float)
        if self.kind == "sin_log":
            lr = np.log(r)
            return -(np.sin(lr) + np.cos(lr)) / r**2
        if self.kind == "power":
            return -self.eps * (1.0 - self.eps) * r ** (-self.eps - 1.0)
        return np.zeros_like(r)


def prescribed_lambda(m: float, z, corrected: bool = False) -> float:
    """Amplitude of the prescribed-center graph function; zero for ``z = 0``.

    The default ``lam**3 = 15m/(8|z|**2)`` drives the ADM center to ``-z/2``.
    ``corrected=True`` returns ``lam**3 = -15m/(4|z|**2)``, for which the
    center is ``z``.
    """
    z2 = float(np.dot(z, z))
    if z2 == 0.0:
        return 0.0
    if corrected:
        return -((15.0 * m / (4.0 * z2)) ** (1.0 / 3.0))
    return (15.0 * m / (8.0 * z2)) ** (1.0 / 3.0)


@dataclass(frozen=True)
class GraphFunction:
    """Time function ``T`` of a graphical slice, with gradient and Hessian.

    Built-in kinds: ``"divergent"`` (sin ln r + u.x/r), ``"prescribed"``
    (lam s + (lam s)**2 with s = z.x/r) and ``"zero"``.  A ``"custom"``
    function supplies ``func(x) -> (T, dT, ddT)`` over ``(..., 3)`` arrays.
    """

    kind: str
    u: tuple = (0.0, 0.0, 0.0)
    z: tuple = (0.0, 0.0, 0.0)
    lam: float = 0.0
    func: Optional[Callable] = field(default=None, compare=False, repr=False)

    @classmethod
    def divergent(cls, u):
        return cls("divergent", u=tuple(float(c) for c in u))

    @classmethod
    def prescribed(cls, m, z, corrected: bool = False):
        z = tuple(float(c) for c in z)
        return cls("prescribed", z=z, lam=prescribed_lambda(m, z, corrected))

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def custom(cls, func):
        return cls("custom", func=func)

    def derivs(self, x):
        """Return ``(T, dT, ddT)`` with shapes ``(...)``, ``(..., 3)``, ``(..., 3, 3)``."""
        x = np.asarray(x, dtype=float)
        if self.kind == "custom":
            return self.func(x)
        r = _radius(x)[..., None]
        if self.kind == "zero" or (self.kind == "prescribed" and self.lam == 0.0):
            shape = x.shape[:-1]
            return np.zeros(shape), np.zeros(shape + (3,)), np.zeros(shape + (3, 3))
        if self.kind == "divergent":
            u = np.asarray(self.u)
            ux = np.einsum("...i,i->...", x, u)[..., None]
            lr = np.log(r)
            c, s = np.cos(lr), np.sin(lr)
            T = (s + ux / r)[..., 0]
            dT = c * x / r**2 + u / r - ux * x / r**3
            r_ = r[..., None]
            ux_ = ux[..., None]
            ddT = (
                c[..., None] * EYE / r_**2
                - (s + 2.0 * c)[..., None] * _outer(x, x) / r_**4
                - (_outer(u * np.ones_like(x), x) + _outer(x, u * np.ones_like(x))) / r_**3
                - ux_ * EYE / r_**3
                + 3.0 * ux_ * _outer(x, x) / r_**5
            )
            return T, dT, ddT
        # prescribed
        zv = np.asarray(self.z)
        lam = self.lam
        zx = np.einsum("...i,i->...", x, zv)[..., None]
        s = zx / r
        ds = zv / r - zx * x / r**3
        r_ = r[..., None]
        zx_ = zx[..., None]
        zb = zv * np.ones_like(x)
        dds = (
            -(_outer(zb, x) + _outer(x, zb)) / r_**3
            - zx_ * EYE / r_**3
            + 3.0 * zx_ * _outer(x, x) / r_**5
        )
        T = (lam * s + (lam * s) ** 2)[..., 0]
        a = lam + 2.0 * lam**2 * s
        dT = a * ds
        ddT = a[..., None] * dds + 2.0 * lam**2 * _outer(ds, ds)
        return T, dT, ddT


# --------------------------------------------------------------------------
# Families
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MetricFamily:
    """Immutable description of one metric on an exterior region ``r > r_min``."""

    kind: str
    m: float
    z: tuple = (0.0, 0.0, 0.0)
    P: tuple = (0.0, 0.0, 0.0)
    weight: Optional[YorkWeight] = None
    graph: Optional[GraphFunction] = None
    r_min: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown family kind {self.kind!r}")
        if not (self.m > 0 and math.isfinite(self.m)):
            raise ConfigError(f"mass parameter must be positive, got {self.m}")
        if self.kind == "graph_slice" and self.r_min < 0.5 * self.m:
            raise ConfigError("graph slices live outside r = m/2")

    @property
    def label(self) -> str:
        if self.kind == "york_perturbed":
            return f"york_perturbed[{self.weight.kind}]"
        if self.kind == "graph_slice":
            return f"graph_slice[{self.graph.kind}]"
        return self.kind


def schwarzschild(m: float = 1.0, r_min: Optional[float] = None) -> MetricFamily:
    return MetricFamily("schwarzschild", m, r_min=0.5 * m if r_min is None else r_min)


def translated_schwarzschild(m: float, z, r_min: Optional[float] = None) -> MetricFamily:
    z = tuple(float(c) for c in z)
    if r_min is None:
        # keeps phi**4 + 2m z.x/r**3 >= 1/2 well away from the horizon
        r_min = max(2.0 * m, 2.0 * math.sqrt(2.0 * m * math.sqrt(np.dot(z, z))))
    return MetricFamily("translated_schwarzschild", m, z=z, r_min=r_min)


def york_perturbed(m: float, P, weight: YorkWeight, R: Optional[float] = None) -> MetricFamily:
    return MetricFamily(
        "york_perturbed",
        m,
        P=tuple(float(c) for c in P),
        weight=weight,
        r_min=2.0 * m if R is None else R,
    )


def prescribed_york(m: float, z, R: Optional[float] = None) -> MetricFamily:
    """York family with P = z and constant weight f = m."""
    return york_perturbed(m, z, YorkWeight("const", value=m), R=R)


def graph_slice(m: float, T: GraphFunction, r_min: Optional[float] = None) -> MetricFamily:
    return MetricFamily(
        "graph_slice", m, graph=T, r_min=0.5 * m + 1e-3 * m if r_min is None else r_min,
        z=T.z if T.kind == "prescribed" else (0.0, 0.0, 0.0),
    )


def divergent_graph_slice(m: float, u) -> MetricFamily:
    return graph_slice(m, GraphFunction.divergent(u))


def prescribed_graph_slice(m: float, z, corrected: bool = False) -> MetricFamily:
    return graph_slice(m, GraphFunction.prescribed(m, z, corrected))


# --------------------------------------------------------------------------
# Jets
# --------------------------------------------------------------------------


@dataclass
class MetricJet:
    """Metric value and coordinate derivatives at one or many points."""

    g: np.ndarray
    dg: np.ndarray
    ddg: Optional[np.ndarray] = None

    def __add__(self, other):
        ddg = None
        if self.ddg is not None and other.ddg is not None:
            ddg = self.ddg + other.ddg
        return MetricJet(self.g + other.g, self.dg + other.dg, ddg)


def conformal_factor(m, r):
    """``phi = 1 + m/2r`` and ``dphi/dr``."""
    return 1.0 + 0.5 * m / r, -0.5 * m / r**2


def lapse(m, r):
    """Static Schwarzschild lapse ``N = (1 - m/2r)/(1 + m/2r)`` and ``dN/dr``."""
    q = 0.5 * m / r
    return (1.0 - q) / (1.0 + q), m / (r**2 * (1.0 + q) ** 2)


def _check_domain(family, x):
    r = _radius(x)
    bad = ~(r > family.r_min)
    if np.any(bad):
        idx = np.argwhere(np.atleast_1d(bad))[0]
        p = np.atleast_2d(x)[tuple(idx)] if x.ndim > 1 else x
        raise DomainError(
            f"{family.label}: point {np.asarray(p).tolist()} (r={float(np.atleast_1d(r)[tuple(idx)]):.6g}) "
            f"is inside r_min={family.r_min:.6g}"
        )
    return r


def _background(m, x, r):
    phi, dphi = conformal_factor(m, r)
    g = (phi**4)[..., None, None] * EYE
    d4 = 4.0 * phi**3 * dphi / r
    dg = (d4[..., None] * x)[..., :, None, None] * EYE
    return g, dg


def _york_tensor(P, x, r):
    """York tensor Y and its derivatives ``dY[..., k, i, j]``."""
    P = np.asarray(P, dtype=float)
    Pb = P * np.ones_like(x)
    px = np.einsum("...i,i->...", x, P)
    r3 = (r**3)[..., None, None]
    r5 = (r**5)[..., None, None]
    r7 = (r**7)[..., None, None]
    px_ = px[..., None, None]
    xx = _outer(x, x)
    Y = 1.5 * ((_outer(Pb, x) + _outer(x, Pb)) / r3 - px_ * EYE / r3 + px_ * xx / r5)

    r3k = r3[..., None]
    r5k = r5[..., None]
    r7k = r7[..., None]
    pxk = px_[..., None]
    xk = x[..., :, None, None]
    Pk = Pb[..., :, None, None]
    dlt = EYE[:, :, None]  # delta_{k i}, broadcast over j
    dY = (
        (Pb[..., None, :, None] * EYE[:, None, :] + EYE[:, :, None] * Pb[..., None, None, :]) / r3k
        - 3.0 * xk * (_outer(Pb, x) + _outer(x, Pb))[..., None, :, :] / r5k
        - Pk * EYE / r3k
        + 3.0 * pxk * xk * EYE / r5k
        + (Pk * xx[..., None, :, :]
           + pxk * (dlt * x[..., None, None, :] + x[..., None, :, None] * EYE[:, None, :])) / r5k
        - 5.0 * pxk * xk * xx[..., None, :, :] / r7k
    )
    return Y, 1.5 * dY


def _deviation_first(family, x, r):
    """Exact deviation ``h = g - g_m`` and ``dh`` (analytic)."""
    shape = x.shape[:-1]
    if family.kind == "schwarzschild":
        return np.zeros(shape + (3, 3)), np.zeros(shape + (3, 3, 3))
    if family.kind == "translated_schwarzschild":
        z = np.asarray(family.z)
        zx = np.einsum("...i,i->...", x, z)
        psi = 2.0 * family.m * zx / r**3
        dpsi = 2.0 * family.m * (z / r[..., None] ** 3 - 3.0 * zx[..., None] * x / r[..., None] ** 5)
        return psi[..., None, None] * EYE, dpsi[..., :, None, None] * EYE
    if family.kind == "york_perturbed":
        Y, dY = _york_tensor(family.P, x, r)
        f, df = family.weight(r)
        h = -2.0 * f[..., None, None] * Y
        dh = -2.0 * ((df / r)[..., None] * x)[..., :, None, None] * Y[..., None, :, :] \
            - 2.0 * f[..., None, None, None] * dY
        return h, dh
    # graph slice
    _, dT, ddT = family.graph.derivs(x)
    N, dN = lapse(family.m, r)
    N2 = N**2
    dN2 = (2.0 * N * dN / r)[..., None] * x
    TT = _outer(dT, dT)
    h = -N2[..., None, None] * TT
    dTT = ddT[..., :, :, None] * dT[..., None, None, :] + dT[..., None, :, None] * ddT[..., :, None, :]
    dh = -dN2[..., :, None, None] * TT[..., None, :, :] - N2[..., None, None, None] * dTT
    return h, dh


def _fd_second(first, x, r):
    """4th-order central differences of an analytic first-derivative field."""
    h = np.maximum(r * 1e-4, 1e-6)
    out = []
    for k in range(3):
        e = np.zeros(3)
        e[k] = 1.0
        step = h[..., None] * e
        d = (
            -first(x + 2.0 * step) + 8.0 * first(x + step)
            - 8.0 * first(x - step) + first(x - 2.0 * step)
        ) / (12.0 * h[..., None, None, None])
        out.append(d)
    # d[k][..., l, i, j] = d_k d_l g_ij
    return np.stack(out, axis=-4)


def _check_positive(family, g):
    m1 = g[..., 0, 0]
    m2 = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] ** 2
    m3 = np.linalg.det(g)
    if not (np.all(m1 > 0) and np.all(m2 > 0) and np.all(m3 > 0)):
        raise ConsistencyError(f"{family.label}: metric is not positive definite")


def background_jet(family: MetricFamily, p, order: int = 1) -> MetricJet:
    """Jet of the Schwarzschild part ``g_m`` alone."""
    x = np.asarray(p, dtype=float)
    r = _check_domain(family, x)
    g, dg = _background(family.m, x, r)
    ddg = None
    if order == 2:
        ddg = _fd_second(lambda y: _background(family.m, y, _radius(y))[1], x, r)
    return MetricJet(g, dg, ddg)


def deviation_jet(family: MetricFamily, p, order: int = 1) -> MetricJet:
    """Jet of the exact deviation ``h = g - g_m``."""
    x = np.asarray(p, dtype=float)
    r = _check_domain(family, x)
    h, dh = _deviation_first(family, x, r)
    ddh = None
    if order == 2:
        ddh = _fd_second(lambda y: _deviation_first(family, y, _radius(y))[1], x, r)
    return MetricJet(h, dh, ddh)


def eval_jet(family: MetricFamily, p, order: int = 1) -> MetricJet:
    """Metric value and derivatives of ``family`` at ``p`` (shape ``(..., 3)``).

    First derivatives are analytic.  ``order=2`` adds second derivatives
    from 4th-order central differences of the analytic first derivatives,
    step ``max(r*1e-4, 1e-6)``.

    Raises
    ------
    DomainError
        If any point has ``r <= family.r_min``.
    ConsistencyError
        If the assembled metric is not positive definite.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    jet = background_jet(family, p, order) + deviation_jet(family, p, order)
    _check_positive(family, jet.g)
    return jet


def deviation(family: MetricFamily, p) -> np.ndarray:
    """Exact deviation ``g - g_m`` at ``p``."""
    return deviation_jet(family, p).g


# --------------------------------------------------------------------------
# Curvature
# --------------------------------------------------------------------------


def christoffel(ginv, dg):
    """``Gamma[..., k, i, j]`` = Gamma^k_ij from the inverse metric and ``dg``."""
    lower = 0.5 * (
        np.swapaxes(dg, -3, -2)  # d_i g_lj  -> [.., l, i, j]
        + np.moveaxis(dg, -3, -1)  # d_j g_li -> [.., l, i, j]
        - dg  # d_l g_ij
    )
    return np.einsum("...kl,...lij->...kij", ginv, lower)


def scalar_curvature(family: MetricFamily, p) -> np.ndarray:
    """Scalar curvature from Christoffel symbols and their derivatives."""
    jet = eval_jet(family, p, order=2)
    g, dg, ddg = jet.g, jet.dg, jet.ddg
    ginv = np.linalg.inv(g)
    # dginv[..., m, a, b] = d_m g^ab
    dginv = -np.einsum("...ak,...mkl,...lb->...mab", ginv, dg, ginv)
    lower = 0.5 * (np.swapaxes(dg, -3, -2) + np.moveaxis(dg, -3, -1) - dg)
    # d_m of the lowered symbols, ddg[..., m, l, i, j] = d_m d_l g_ij
    dlower = 0.5 * (
        np.swapaxes(ddg, -3, -2) + np.moveaxis(ddg, -3, -1) - ddg
    )
    Gam = np.einsum("...kl,...lij->...kij", ginv, lower)
    dGam = np.einsum("...mkl,...lij->...mkij", dginv, lower) + np.einsum(
        "...kl,...mlij->...mkij", ginv, dlower
    )
    # Ric_ij = d_k G^k_ij - d_j G^k_ik + G^k_kl G^l_ij - G^k_jl G^l_ik
    ric = (
        np.einsum("...kkij->...ij", dGam)
        - np.einsum("...jkik->...ij", dGam)
        + np.einsum("...kkl,...lij->...ij", Gam, Gam)
        - np.einsum("...kjl,...lik->...ij", Gam, Gam)
    )
    return np.einsum("...ij,...ij->...", ginv, ric)


@dataclass
class ExtrinsicData:
    """Second fundamental form of a graphical slice and derived fields.

    ``Pi = trK g - K`` is the momentum tensor; ``N`` the static lapse.
    """

    K: np.ndarray
    trK: np.ndarray
    Pi: np.ndarray
    N: np.ndarray
    g: np.ndarray


def extrinsic_data(family: MetricFamily, p) -> ExtrinsicData:
    """Second fundamental form of the slice ``t = T(x)`` in the Schwarzschild spacetime.

    With ``W = sqrt(1 - N**2 |dT|**2)`` and all derivatives and norms taken
    in ``g_m``::

        K_ij = (N Hess_ij T + T_i N_j + N_i T_j - N**2 <dN, dT> T_i T_j) / W

    for the future-pointing unit normal.  The overall sign convention does
    not affect ``|K|**2``, ``trK**2`` or the momentum flux symmetry.
    """
    if family.kind != "graph_slice":
        raise ValueError("extrinsic data is only defined for graph slices")
    x = np.asarray(p, dtype=float)
    r = _check_domain(family, x)
    _, dT, ddT = family.graph.derivs(x)
    gm, dgm = _background(family.m, x, r)
    phi4 = conformal_factor(family.m, r)[0] ** 4
    gminv = gm / (phi4**2)[..., None, None]
    Gam = christoffel(gminv, dgm)
    hess = ddT - np.einsum("...kij,...k->...ij", Gam, dT)
    N, dNr = lapse(family.m, r)
    dN = (dNr / r)[..., None] * x
    grad2 = np.einsum("...i,...i->...", dT, dT) / phi4
    W2 = 1.0 - N**2 * grad2
    if np.any(W2 <= 0):
        worst = float(np.min(W2))
        raise DomainError(f"slice is not spacelike: 1 - N^2|dT|^2 = {worst:.3g} <= 0")
    W = np.sqrt(W2)
    dNdT = np.einsum("...i,...i->...", dN, dT) / phi4
    K = (
        N[..., None, None] * hess
        + _outer(dT, dN)
        + _outer(dN, dT)
        - (N**2 * dNdT)[..., None, None] * _outer(dT, dT)
    ) / W[..., None, None]
    g = gm - (N**2)[..., None, None] * _outer(dT, dT)
    ginv = np.linalg.inv(g)
    trK = np.einsum("...ij,...ij->...", ginv, K)
    Pi = trK[..., None, None] * g - K
    return ExtrinsicData(K=K, trK=trK, Pi=Pi, N=N, g=g)


# --------------------------------------------------------------------------
# JSON configuration
# --------------------------------------------------------------------------

_VEC = {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3}

FAMILY_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind", "m"],
    "properties": {
        "kind": {"enum": list(KINDS)},
        "m": {"type": "number", "exclusiveMinimum": 0},
        "z": _VEC,
        "P": _VEC,
        "f": {
            "type": "object",
            "additionalProperties": False,
            "required": ["type"],
            "properties": {
                "type": {"enum": ["sin_log", "power", "const"]},
                "eps": {"type": "number", "exclusiveMinimum": 0.5, "exclusiveMaximum": 1},
                "value": {"type": "number"},
            },
        },
        "T": {
            "type": "object",
            "additionalProperties": False,
            "required": ["type"],
            "properties": {
                "type": {"enum": ["divergent", "prescribed", "zero"]},
                "u": _VEC,
                "corrected": {"type": "boolean"},
            },
        },
        "r_min": {"type": "number", "exclusiveMinimum": 0},
    },
}


def family_from_json(obj) -> MetricFamily:
    """Build a family from a JSON object (dict or string); unknown keys are rejected.

    ``{"kind": "graph_slice", "m": 1, "T": {"type": "divergent", "u": [1, 0, 0]}}``
    ``{"kind": "york_perturbed", "m": 1, "P": [0, 1, 0], "f": {"type": "const"}}``
    ``{"kind": "graph_slice", "m": 1, "z": [1, 0, 0], "T": {"type": "prescribed"}}``

    ``"corrected": true`` in a prescribed ``T`` selects the amplitude whose
    center is ``z`` (see :func:`prescribed_lambda`).

    A ``const`` York weight defaults to ``value = m``; a ``power`` weight to
    ``eps = 0.75``.  For ``york_perturbed``, ``r_min`` plays the role of the
    excised radius R (default 2m).
    """
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
    try:
        jsonschema.validate(obj, FAMILY_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"family config: {exc.message}") from exc
    kind, m = obj["kind"], float(obj["m"])
    r_min = obj.get("r_min")
    z = obj.get("z", [0.0, 0.0, 0.0])

    def need(key):
        if key not in obj:
            raise ConfigError(f"{kind} needs key {key!r}")
        return obj[key]

    def forbid(*keys):
        extra = [k for k in keys if k in obj]
        if extra:
            raise ConfigError(f"{kind} does not accept {extra}")

    if kind == "schwarzschild":
        forbid("z", "P", "f", "T")
        return schwarzschild(m, r_min)
    if kind == "translated_schwarzschild":
        forbid("P", "f", "T")
        return translated_schwarzschild(m, need("z"), r_min)
    if kind == "york_perturbed":
        forbid("z", "T")
        spec = need("f")
        if spec["type"] == "const":
            w = YorkWeight("const", value=float(spec.get("value", m)))
        elif spec["type"] == "power":
            w = YorkWeight("power", eps=float(spec.get("eps", 0.75)))
        else:
            w = YorkWeight("sin_log")
        return york_perturbed(m, need("P"), w, R=r_min)
    forbid("P", "f")
    spec = need("T")
    if spec["type"] != "prescribed" and "corrected" in spec:
        raise ConfigError("'corrected' applies only to prescribed graph functions")
    if spec["type"] == "divergent":
        if "u" not in spec:
            raise ConfigError("divergent graph function needs 'u'")
        T = GraphFunction.divergent(spec["u"])
    elif spec["type"] == "prescribed":
        if "u" in spec:
            raise ConfigError("prescribed graph function takes 'z' at top level, not 'u'")
        T = GraphFunction.prescribed(m, z, bool(spec.get("corrected", False)))
    else:
        T = GraphFunction.zero()
    return graph_slice(m, T, r_min)


def family_to_json(family: MetricFamily) -> dict:
    """Inverse of :func:`family_from_json` for built-in families."""
    out = {"kind": family.kind, "m": family.m}
    if family.kind == "translated_schwarzschild":
        out["z"] = list(family.z)
    elif family.kind == "york_perturbed":
        out["P"] = list(family.P)
        w = family.weight
        out["f"] = {"type": w.kind}
        if w.kind == "power":
            out["f"]["eps"] = w.eps
        elif w.kind == "const":
            out["f"]["value"] = w.value
    elif family.kind == "graph_slice":
        T = family.graph
        if T.kind == "custom":
            raise ConfigError("custom graph functions have no JSON form")
        out["T"] = {"type": T.kind}
        if T.kind == "divergent":
            out["T"]["u"] = list(T.u)
        elif T.kind == "prescribed":
            out["z"] = list(T.z)
            if T.lam < 0:
                out["T"]["corrected"] = True
    out["r_min"] = family.r_min
    return out
