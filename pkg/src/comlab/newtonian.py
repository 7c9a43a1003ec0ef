"""Newtonian matter densities, truncated mass/center integrals and radial potentials.

Two built-in densities, both O(r**-4):

* ``divergent_u``: ``psi(r) r**-4 (|u| + u.x/r)``, whose center of mass
  grows like ``(4 pi/3) u ln R`` / mass.
* ``prescribed``: ``m psi(s) / (4 pi (a + 1/2) s**4)`` with ``s = |x - z|``,
  mass ``m`` and center ``z``.

``psi`` is the smooth step ``chi(r - 1)`` with ``chi(t) = E(t)/(E(t) + E(1-t))``,
``E(t) = exp(-1/t)`` for t > 0, so psi = 0 on r <= 1 and psi = 1 on r >= 2.
Truncated integrals run over balls centred at the density's own center.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import jsonschema
import numpy as np
from scipy.integrate import quad

from .errors import ConfigError, ContractError
from .quadrature import SphereGrid, AnnulusRule, integrate_annulus, integrate_sphere, sphere_grid

__all__ = [
    "NewtonianDensity",
    "cutoff",
    "cutoff_constant",
    "density_eval",
    "evenness_split",
    "newton_mass",
    "newton_moment",
    "newton_com",
    "radial_potential",
    "potential",
    "quasilocal_mass",
    "quasilocal_com",
    "density_from_json",
    "DENSITY_SCHEMA",
]


def _step(t):
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        return np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)


def cutoff(r):
    """Smooth radial cut-off: 0 for r <= 1, 1 for r >= 2."""
    t = np.asarray(r, dtype=float) - 1.0
    a, b = _step(t), _step(1.0 - t)
    return a / (a + b)


@lru_cache(maxsize=None)
def cutoff_constant() -> float:
    """``a = int_1^2 psi(r)/r**2 dr``."""
    val, _ = quad(lambda r: float(cutoff(r)) / r**2, 1.0, 2.0, epsabs=1e-14, epsrel=1e-12, limit=200)
    return val


@lru_cache(maxsize=None)
def _inner_moment(power: int, lo: float) -> float:
    """``int_lo^2 psi(s) s**-power ds`` for 1 <= lo <= 2."""
    if lo >= 2.0:
        return 0.0
    val, _ = quad(lambda s: float(cutoff(s)) * s**-power, max(lo, 1.0), 2.0,
                  epsabs=1e-14, epsrel=1e-12, limit=200)
    return val


@dataclass(frozen=True)
class NewtonianDensity:
    """A non-negative matter density on R^3.

    ``kind`` is ``"divergent_u"``, ``"prescribed"``, ``"custom_radial"``
    (``profile(s)`` of ``s = |x - center|``) or ``"custom"`` (``func(x)``).
    ``r_inner`` is where the support starts (the truncated integrals begin
    there) and ``center`` anchors balls and radial potentials.
    """

    kind: str
    m: float = 1.0
    u: tuple = (0.0, 0.0, 0.0)
    z: tuple = (0.0, 0.0, 0.0)
    profile: Optional[Callable] = field(default=None, compare=False, repr=False)
    func: Optional[Callable] = field(default=None, compare=False, repr=False)
    r_inner: float = 1.0

    @classmethod
    def divergent_u(cls, u):
        u = tuple(float(c) for c in u)
        if not any(u):
            raise ConfigError("divergent density needs u != 0")
        return cls("divergent_u", u=u)

    @classmethod
    def prescribed(cls, m, z=(0.0, 0.0, 0.0)):
        if not m > 0:
            raise ConfigError("prescribed density needs m > 0")
        return cls("prescribed", m=float(m), z=tuple(float(c) for c in z))

    @classmethod
    def custom_radial(cls, profile, center=(0.0, 0.0, 0.0), r_inner=0.0):
        return cls("custom_radial", z=tuple(float(c) for c in center), profile=profile, r_inner=r_inner)

    @classmethod
    def custom(cls, func, center=(0.0, 0.0, 0.0), r_inner=0.0):
        return cls("custom", z=tuple(float(c) for c in center), func=func, r_inner=r_inner)

    @property
    def center(self) -> np.ndarray:
        return np.zeros(3) if self.kind == "divergent_u" else np.asarray(self.z, dtype=float)

    @property
    def is_radial(self) -> bool:
        return self.kind in ("prescribed", "custom_radial")

    @property
    def norm(self) -> float:
        """``m / (4 pi (a + 1/2))`` for the prescribed density."""
        return self.m / (4.0 * math.pi * (cutoff_constant() + 0.5))


def density_eval(d: NewtonianDensity, p) -> np.ndarray:
    """Density at points ``p`` of shape ``(..., 3)``."""
    x = np.asarray(p, dtype=float)
    if d.kind == "custom":
        return np.asarray(d.func(x), dtype=float)
    y = x - d.center
    s = np.sqrt(np.einsum("...i,...i->...", y, y))
    if d.kind == "custom_radial":
        return np.asarray(d.profile(s), dtype=float)
    safe = np.where(s > 0, s, 1.0)
    psi = cutoff(s)
    if d.kind == "prescribed":
        return np.where(s > 1.0, d.norm * psi / safe**4, 0.0)
    u = np.asarray(d.u)
    ux = np.einsum("...i,i->...", y, u)
    return np.where(s > 1.0, psi / safe**4 * (np.linalg.norm(u) + ux / safe), 0.0)


def evenness_split(d: NewtonianDensity, p):
    """Even and odd parts ``((rho(p) + rho(-p))/2, (rho(p) - rho(-p))/2)`` about the origin."""
    x = np.asarray(p, dtype=float)
    a, b = density_eval(d, x), density_eval(d, -x)
    return 0.5 * (a + b), 0.5 * (a - b)


def _ball_rule(d: NewtonianDensity, R: float, grid: SphereGrid):
    """Panels: fine linear panels through the cut-off shell, log panels beyond."""
    lo = d.r_inner
    rules = []
    if d.kind in ("divergent_u", "prescribed"):
        if R > lo:
            rules.append(AnnulusRule(grid, lo, min(R, 2.0), n_radial=16, n_panels=16))
        if R > 2.0:
            n = max(1, int(math.ceil(math.log(R / 2.0))))
            rules.append(AnnulusRule(grid, 2.0, R, n_radial=16, n_panels=n, log_panels=True))
        return rules
    if lo <= 0:
        # the innermost sliver of a ball about the center
        lo = min(1e-8, R / 2)
        rules.append(AnnulusRule(grid, 1e-12, lo, n_radial=8, n_panels=1))
    n = max(4, int(math.ceil(2.0 * math.log(R / lo))))
    rules.append(AnnulusRule(grid, lo, R, n_radial=16, n_panels=n, log_panels=True))
    return rules


def _ball_integral(d, R, grid, weight):
    grid = grid or sphere_grid()
    if not R > 0:
        raise ContractError(f"radius must be positive, got {R}")
    c = d.center
    total = None
    for rule in _ball_rule(d, R, grid):
        val = integrate_annulus(rule, weight, center=c)
        total = val if total is None else total + val
    if total is None:
        return 0.0
    return total


def newton_mass(d: NewtonianDensity, R: float, grid: SphereGrid | None = None) -> float:
    """Mass inside the ball of radius ``R`` about the density center."""
    return float(_ball_integral(d, R, grid, lambda x: density_eval(d, x)))


def newton_moment(d: NewtonianDensity, R: float, grid: SphereGrid | None = None) -> np.ndarray:
    """First moment ``int_{B_R} rho x dV`` (the center-of-mass numerator)."""
    if R <= d.r_inner and d.kind in ("divergent_u", "prescribed"):
        return np.zeros(3)
    return np.asarray(_ball_integral(d, R, grid, lambda x: density_eval(d, x)[..., None] * x))


def newton_com(d: NewtonianDensity, R: float, grid: SphereGrid | None = None) -> np.ndarray:
    """Truncated center of mass ``newton_moment / newton_mass``."""
    mass = newton_mass(d, R, grid)
    if not mass > 0:
        raise ContractError(f"truncated mass is {mass}; center of mass undefined")
    return newton_moment(d, R, grid) / mass


def radial_potential(d: NewtonianDensity, r):
    """Potential ``U`` and ``dU/ds`` at distance ``s = r`` from the density center.

    ``U(s) = -M(s)/s - int_s^inf 4 pi rho(t) t dt``, ``dU/ds = M(s)/s**2``,
    so ``Lap U = 4 pi rho`` and ``U -> 0`` at infinity.
    """
    if not d.is_radial:
        raise ContractError(f"{d.kind} density has no radial potential")
    s = np.asarray(r, dtype=float)
    if d.kind == "prescribed":
        U, dU = np.vectorize(_prescribed_potential, otypes=[float, float])(s, d.m)
        return U, dU
    return np.vectorize(lambda t: _custom_potential(d.profile, t), otypes=[float, float])(s)


def _prescribed_potential(s, m):
    k = m / (cutoff_constant() + 0.5)  # 4 pi * norm
    if s <= 1.0:
        enclosed = 0.0
        outer = _inner_moment(3, 1.0) + 0.125
        return -k * outer, 0.0
    if s < 2.0:
        enclosed = cutoff_constant() - _inner_moment(2, s)
        outer = _inner_moment(3, s) + 0.125
    else:
        enclosed = cutoff_constant() + 0.5 - 1.0 / s
        outer = 0.5 / s**2
    M = k * enclosed
    return -M / s - k * outer, M / s**2


def _custom_potential(profile, s):
    M, _ = quad(lambda t: 4.0 * math.pi * float(profile(t)) * t * t, 0.0, s, limit=200)
    out, _ = quad(lambda t: 4.0 * math.pi * float(profile(t)) * t, s, np.inf, limit=200)
    return -M / s - out if s > 0 else -out, M / s**2 if s > 0 else 0.0


def potential(d: NewtonianDensity, x):
    """``U`` and ``grad U`` at points ``x`` (radial densities only)."""
    x = np.asarray(x, dtype=float)
    y = x - d.center
    s = np.sqrt(np.einsum("...i,...i->...", y, y))
    U, dU = radial_potential(d, s)
    return U, (dU / np.where(s > 0, s, 1.0))[..., None] * y


def quasilocal_mass(d: NewtonianDensity, center, r: float, grid: SphereGrid | None = None) -> float:
    """``(1/4 pi) oint dU/dnu dA`` over the sphere ``|x - center| = r``."""
    grid = grid or sphere_grid()
    c = np.asarray(center, dtype=float)

    def flux(x):
        _, gU = potential(d, x)
        return np.einsum("...i,...i->...", gU, (x - c) / r)

    return integrate_sphere(grid, r, flux, center=c) / (4.0 * math.pi)


def quasilocal_com(d: NewtonianDensity, center, r: float, grid: SphereGrid | None = None) -> np.ndarray:
    """``(1/(4 pi m_N)) oint (dU/dnu x - U nu) dA`` over ``|x - center| = r``."""
    grid = grid or sphere_grid()
    c = np.asarray(center, dtype=float)
    mN = quasilocal_mass(d, c, r, grid)
    if mN == 0:
        raise ContractError("quasi-local mass vanishes; center undefined")

    def field(x):
        U, gU = potential(d, x)
        nu = (x - c) / r
        dn = np.einsum("...i,...i->...", gU, nu)
        return dn[..., None] * x - U[..., None] * nu

    return integrate_sphere(grid, r, field, center=c) / (4.0 * math.pi * mN)


DENSITY_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["divergent_u", "prescribed"]},
        "m": {"type": "number", "exclusiveMinimum": 0},
        "u": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
        "z": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
    },
}


def density_from_json(obj) -> NewtonianDensity:
    """``{"kind": "prescribed", "m": 2, "z": [1, 0, 0]}`` or ``{"kind": "divergent_u", "u": [1, 0, 0]}``."""
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
    try:
        jsonschema.validate(obj, DENSITY_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"density config: {exc.message}") from exc
    if obj["kind"] == "divergent_u":
        if "u" not in obj or "z" in obj or "m" in obj:
            raise ConfigError("divergent_u takes exactly 'u'")
        return NewtonianDensity.divergent_u(obj["u"])
    if "u" in obj:
        raise ConfigError("prescribed density takes 'm' and 'z', not 'u'")
    return NewtonianDensity.prescribed(obj.get("m", 1.0), obj.get("z", [0.0, 0.0, 0.0]))
