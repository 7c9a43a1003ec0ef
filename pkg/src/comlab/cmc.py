"""Mean curvature of round coordinate spheres and a round-sphere CMC fitter.

The true CMC leaves are graphs over round spheres; the fitter restricts the
search to round spheres ``|x - c| = a`` and minimises the area-weighted
spread of the mean curvature, which pins the center to the l = 1 balance
of the leaf.  Centers from the fit are compared with closed-form center
laws, not with leaf shapes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import ComlabError, DomainError
from .metric import MetricFamily, eval_jet
from .quadrature import SphereGrid, sphere_grid

__all__ = [
    "CmcFit",
    "sphere_mean_curvature",
    "leaf_mean_curvature",
    "cmc_residual",
    "fit_cmc_sphere",
    "cmc_center_sweep",
]


# l <= 31 is ample for the low-degree mean-curvature variations of interest
FIT_GRID = sphere_grid(16, 32)


def sphere_mean_curvature(family: MetricFamily, center, radius: float, eta) -> np.ndarray:
    """Mean curvature of the Euclidean sphere ``|x - center| = radius`` in ``family``.

    Evaluated at ``center + radius * eta`` for unit vectors ``eta`` of shape
    ``(..., 3)``; outward normal, so a Euclidean sphere has ``H = 2/radius``.
    Only first metric derivatives are needed.
    """
    eta = np.asarray(eta, dtype=float)
    x = np.asarray(center, dtype=float) + radius * eta
    jet = eval_jet(family, x)
    g, dg = jet.g, jet.dg
    gi = np.linalg.inv(g)
    F1 = eta
    F2 = (np.eye(3) - eta[..., :, None] * eta[..., None, :]) / radius
    # dgi[..., k, a, b] = d_k g^ab
    gik = gi[..., None, :, :]
    dgi = -(gik @ dg @ gik)
    v = np.einsum("...ij,...j->...i", gi, F1)  # g^ij F_j
    s2 = np.einsum("...i,...i->...", v, F1)
    s = np.sqrt(s2)
    ds = (np.einsum("...kab,...a,...b->...k", dgi, F1, F1) + 2.0 * np.einsum("...ak,...a->...k", F2, v)) / (
        2.0 * s[..., None]
    )
    div_nu = (
        np.einsum("...iij,...j->...", dgi, F1) / s
        + np.einsum("...ij,...ij->...", gi, F2) / s
        - np.einsum("...i,...i->...", v, ds) / s2
    )
    dlogvol = 0.5 * np.einsum("...ab,...kab->...k", gi, dg)
    return div_nu + np.einsum("...i,...i->...", v, dlogvol) / s


def leaf_mean_curvature(m: float, sigma: float) -> float:
    """Mean-curvature magnitude ``2/sigma - 4m/sigma**2`` of the leaf with parameter sigma."""
    return 2.0 / sigma - 4.0 * m / sigma**2


@dataclass
class CmcFit:
    """Best round sphere for one leaf parameter."""

    center: np.ndarray
    radius: float
    mean_H: float
    residual: float
    iterations: int = 0
    converged: bool = False
    sigma: float = float("nan")


def _spread(family, center, radius, grid):
    H = sphere_mean_curvature(family, center, radius, grid.nodes)
    w = grid.weights / (4.0 * math.pi)
    Hbar = float(np.dot(w, H))
    var = float(np.dot(w, (H - Hbar) ** 2))
    return Hbar, var


def cmc_residual(family: MetricFamily, center, radius: float, grid: SphereGrid | None = None) -> float:
    """Area-normalised L2 variance of ``H`` over the round sphere (dimensionless, scaled by radius**2)."""
    grid = grid or sphere_grid()
    _, var = _spread(family, center, radius, grid)
    return var * radius**2


def fit_cmc_sphere(
    family: MetricFamily,
    sigma: float,
    init: CmcFit | None = None,
    grid: SphereGrid | None = None,
    tol: float = 1e-10,
    max_iter: int = 200,
    residual_tol: float | None = None,
) -> CmcFit:
    """Round sphere whose mean curvature is closest to constant and equal to the leaf value.

    Minimises, over center ``c`` and radius ``a``::

        sigma**2 * [ mean((H - Hbar)**2) + (Hbar - H_sigma)**2 ]

    with ``H_sigma = 2/sigma - 4m/sigma**2``, using Nelder-Mead on
    ``(c/sigma, a/sigma)``; the initial simplex has edge ``max(m/2, 1e-4 sigma)``.  Stops when the
    simplex is smaller than ``tol * sigma`` or after ``max_iter``
    iterations; a non-converged fit returns its best iterate with
    ``converged=False``.

    Raises
    ------
    DomainError
        If ``sigma <= 2m``, where the leaf mean curvature is not positive.
    """
    grid = grid or FIT_GRID
    if not sigma > 2.0 * family.m:
        raise DomainError(f"leaf parameter sigma={sigma:.6g} must exceed 2m={2.0 * family.m:.6g}")
    H_target = leaf_mean_curvature(family.m, sigma)
    c0 = np.zeros(3) if init is None else np.asarray(init.center, dtype=float)
    a0 = sigma if init is None or not np.isfinite(init.radius) else float(init.radius)

    def objective(q):
        c = q[:3] * sigma
        a = q[3] * sigma
        try:
            Hbar, var = _spread(family, c, a, grid)
        except ComlabError:
            return np.inf
        return sigma**2 * (var + (Hbar - H_target) ** 2)

    q0 = np.concatenate([c0 / sigma, [a0 / sigma]])
    step = max(0.5 * family.m, 1e-4 * sigma) / sigma
    simplex = np.vstack([q0] + [q0 + step * e for e in np.eye(4)])
    res = minimize(
        objective,
        q0,
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "xatol": tol,
            "fatol": 0.0,
            "maxiter": max_iter,
            "maxfev": max_iter * 10,
        },
    )
    c = res.x[:3] * sigma
    a = float(res.x[3] * sigma)
    Hbar, var = _spread(family, c, a, grid)
    residual = var * a**2
    size = float(np.max(np.abs(res.final_simplex[0][1:] - res.final_simplex[0][0])))
    converged = size <= tol and (residual_tol is None or residual <= residual_tol)
    return CmcFit(
        center=c,
        radius=a,
        mean_H=Hbar,
        residual=residual,
        iterations=int(res.nit),
        converged=bool(converged),
        sigma=float(sigma),
    )


def cmc_center_sweep(family: MetricFamily, sigmas, grid: SphereGrid | None = None, drift=None, **kw):
    """Fit round CMC spheres along an increasing ladder of leaf parameters.

    Each fit starts from the previous center, shifted by ``drift(sigma) -
    drift(sigma_prev)`` when a closed-form drift law is supplied.  A fit
    that raises is recorded as ``None`` and the sweep continues.
    """
    out = []
    prev = None
    for k, sigma in enumerate(sigmas):
        init = None
        if prev is not None:
            c = np.array(prev.center, dtype=float)
            if drift is not None:
                c = c + np.asarray(drift(sigma)) - np.asarray(drift(sigmas[k - 1]))
            init = CmcFit(center=c, radius=sigma, mean_H=float("nan"), residual=float("nan"))
        elif drift is not None:
            init = CmcFit(center=np.asarray(drift(sigma), dtype=float), radius=sigma,
                          mean_H=float("nan"), residual=float("nan"))
        try:
            fit = fit_cmc_sphere(family, sigma, init=init, grid=grid, **kw)
        except ComlabError:
            fit = None
        out.append((float(sigma), fit))
        if fit is not None:
            prev = fit
    return out
