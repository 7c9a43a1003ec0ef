"""Product Gauss-Legendre quadrature on coordinate spheres and annuli.

The sphere rule is Gauss-Legendre in ``cos(theta)`` times the uniform
trapezoid rule in ``phi``.  Nodes are built so that the grid is exactly
antipodal: for every node ``eta`` the node ``-eta`` is present bit for bit
with the same weight.  Odd integrands therefore cancel exactly.

Sums use :func:`math.fsum` (exactly rounded) over a fixed node order, so
results do not depend on evaluation order or threading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ComlabError

__all__ = [
    "SphereGrid",
    "AnnulusRule",
    "sphere_grid",
    "annulus_rule",
    "integrate_sphere",
    "integrate_annulus",
    "exact_sum",
]

DEFAULT_NTHETA = 24
DEFAULT_NPHI = 48


def exact_sum(values, axis=0):
    """Exactly rounded sum along ``axis`` (``math.fsum`` per component)."""
    values = np.asarray(values, dtype=float)
    values = np.moveaxis(values, axis, 0)
    flat = values.reshape(values.shape[0], -1)
    out = np.array([math.fsum(flat[:, j]) for j in range(flat.shape[1])])
    return out.reshape(values.shape[1:]) if values.ndim > 1 else float(out[0])


@dataclass(frozen=True)
class SphereGrid:
    """Quadrature rule on the unit sphere; weights sum to 4 pi."""

    n_theta: int
    n_phi: int

    def __post_init__(self):
        if self.n_theta < 1 or self.n_phi < 2 or self.n_phi % 2:
            raise ValueError("need n_theta >= 1 and an even n_phi >= 2")

    @property
    def degree(self) -> int:
        """Largest spherical-harmonic degree integrated exactly."""
        return min(2 * self.n_theta - 1, self.n_phi - 1)

    @cached_property
    def _rule(self):
        t, wt = np.polynomial.legendre.leggauss(self.n_theta)
        # exact mirror symmetry t -> -t
        t = 0.5 * (t - t[::-1])
        wt = 0.5 * (wt + wt[::-1])
        half = self.n_phi // 2
        ang = 2.0 * np.pi * np.arange(half) / self.n_phi
        c = np.concatenate([np.cos(ang), -np.cos(ang)])
        s = np.concatenate([np.sin(ang), -np.sin(ang)])
        st = np.sqrt(np.maximum(0.0, (1.0 - t) * (1.0 + t)))
        eta = np.empty((self.n_theta, self.n_phi, 3))
        eta[..., 0] = st[:, None] * c[None, :]
        eta[..., 1] = st[:, None] * s[None, :]
        eta[..., 2] = t[:, None] * np.ones(self.n_phi)[None, :]
        w = (wt[:, None] * np.full(self.n_phi, 2.0 * np.pi / self.n_phi)[None, :])
        return eta.reshape(-1, 3), w.reshape(-1)

    @property
    def nodes(self) -> np.ndarray:
        """Unit vectors, shape ``(n, 3)``."""
        return self._rule[0]

    @property
    def weights(self) -> np.ndarray:
        return self._rule[1]

    def refined(self) -> "SphereGrid":
        return SphereGrid(2 * self.n_theta, 2 * self.n_phi)


def sphere_grid(n_theta: int = DEFAULT_NTHETA, n_phi: int = DEFAULT_NPHI) -> SphereGrid:
    return SphereGrid(n_theta, n_phi)


def _evaluate(field, pts, where):
    try:
        return np.asarray(field(pts), dtype=float)
    except ComlabError as exc:
        raise type(exc)(f"{exc} (while integrating over {where})") from exc


def integrate_sphere(grid: SphereGrid, r: float, field, center=(0.0, 0.0, 0.0)):
    """Integrate ``field`` over the coordinate sphere of radius ``r``.

    ``field`` maps an ``(n, 3)`` array of points to ``(n,)`` or ``(n, d)``
    values; the Euclidean area element ``r**2 dOmega`` is applied.
    """
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    pts = np.asarray(center, dtype=float) + r * grid.nodes
    vals = _evaluate(field, pts, f"sphere r={r:.6g}")
    bad = ~np.isfinite(vals)
    if np.any(bad):
        k = int(np.argwhere(bad)[0][0])
        raise ComlabError(f"non-finite integrand at node {pts[k].tolist()} on sphere r={r:.6g}")
    wv = (grid.weights * r**2).reshape((-1,) + (1,) * (vals.ndim - 1)) * vals
    return exact_sum(wv)


@dataclass(frozen=True)
class AnnulusRule:
    """Sphere grid times panelled radial Gauss-Legendre on ``[r_inner, r_outer]``.

    With ``log_panels`` the panels are equal in ``ln r`` and the radial
    rule is applied in the variable ``s = ln r``.
    """

    grid: SphereGrid
    r_inner: float
    r_outer: float
    n_radial: int = 16
    n_panels: int = 1
    log_panels: bool = False

    def __post_init__(self):
        if not (0 < self.r_inner < self.r_outer):
            raise ValueError("need 0 < r_inner < r_outer")

    @cached_property
    def radial(self):
        """Radial nodes and weights (weights include ``dr``, not ``r**2``)."""
        x, w = np.polynomial.legendre.leggauss(self.n_radial)
        if self.log_panels:
            edges = np.linspace(math.log(self.r_inner), math.log(self.r_outer), self.n_panels + 1)
        else:
            edges = np.linspace(self.r_inner, self.r_outer, self.n_panels + 1)
        edges[0] = math.log(self.r_inner) if self.log_panels else self.r_inner
        edges[-1] = math.log(self.r_outer) if self.log_panels else self.r_outer
        a, b = edges[:-1, None], edges[1:, None]
        s = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
        ws = (0.5 * (b - a) * w).ravel()
        if self.log_panels:
            r = np.exp(s)
            return r, ws * r
        return s, ws


def annulus_rule(r_inner, r_outer, grid=None, n_radial=16, n_panels=None, log_panels=True):
    """Annulus rule with roughly one log-panel per factor e of radius by default."""
    grid = grid or sphere_grid()
    if n_panels is None:
        n_panels = max(1, int(math.ceil(math.log(r_outer / r_inner))))
    return AnnulusRule(grid, float(r_inner), float(r_outer), n_radial, n_panels, log_panels)


def integrate_annulus(rule: AnnulusRule, field, center=(0.0, 0.0, 0.0)):
    """Volume integral of ``field`` over ``r_inner < |x - center| < r_outer``."""
    rad, wr = rule.radial
    eta, ws = rule.grid.nodes, rule.grid.weights
    pts = np.asarray(center, dtype=float) + rad[:, None, None] * eta[None, :, :]
    vals = _evaluate(field, pts.reshape(-1, 3), f"annulus [{rule.r_inner:.6g}, {rule.r_outer:.6g}]")
    vals = vals.reshape((len(rad), len(ws)) + vals.shape[1:])
    w = (wr * rad**2)[:, None] * ws[None, :]
    wv = w.reshape(w.shape + (1,) * (vals.ndim - 2)) * vals
    return exact_sum(wv.reshape((-1,) + vals.shape[2:]))
