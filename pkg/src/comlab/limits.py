"""Radius ladders, limit extrapolation and classification of vector sequences.

A sequence ``(r_k, v_k)`` is fitted, jointly over components, by four
linear-in-coefficients models that share a decaying tail
``c + sum_{j=1..K} b_j (r_0/r)**j``:

* ``converged``:        tail only
* ``log_divergent``:    tail + ``alpha ln r``
* ``power_divergent``:  tail + ``beta r**p``, ``p`` fitted in ``[P_MIN, P_MAX]``
* ``oscillatory``:      tail + ``A cos ln r + B sin ln r``

Every divergent model contains the converged one, so a divergent class is
only selected when it cuts the residual by the margin against the converged
fit and against every other divergent model.  Otherwise the sequence is
``converged`` (no divergent term is supported by the data) or
``undetermined`` (two divergent models are both supported).  Any selected
model must also leave a residual below ``FIT_FRACTION`` of the data spread;
a sequence that no model explains is ``undetermined``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ContractError

__all__ = [
    "RadiusLadder",
    "LimitVerdict",
    "Extrapolation",
    "classify",
    "extrapolate",
    "MARGIN",
    "MIN_POINTS",
]

MARGIN = 5.0
MIN_POINTS = 8
P_MIN, P_MAX = 0.05, 3.0
# relative residual below which a sequence counts as exactly fitted
NOISE_FLOOR = 1e-11
# a selected model must leave a residual below this fraction of the data spread
FIT_FRACTION = 1e-3
CLASSES = ("converged", "log_divergent", "power_divergent", "oscillatory")


@dataclass(frozen=True)
class RadiusLadder:
    """Geometric radii ``r_k = r0 * ratio**k``, ``k = 0..count-1``."""

    r0: float
    ratio: float
    count: int

    def __post_init__(self):
        if not self.r0 > 0:
            raise ValueError(f"r0 must be positive, got {self.r0}")
        if not self.ratio > 1:
            raise ValueError(f"ratio must exceed 1, got {self.ratio}")
        if self.count < 1:
            raise ValueError(f"count must be at least 1, got {self.count}")

    @classmethod
    def default(cls, m: float = 1.0) -> "RadiusLadder":
        """``r0 = 100 m``, ``ratio = e**(pi/8)``, 48 radii (three periods of ln r)."""
        return cls(100.0 * m, math.exp(math.pi / 8.0), 48)

    @property
    def radii(self) -> np.ndarray:
        return self.r0 * self.ratio ** np.arange(self.count)

    @property
    def periods(self) -> float:
        """Number of ``2 pi`` periods of ``ln r`` spanned by the ladder."""
        return (self.count - 1) * math.log(self.ratio) / (2.0 * math.pi)

    def spans_oscillation(self, periods: float = 2.0) -> bool:
        return self.periods >= periods


def _json(x):
    if isinstance(x, np.ndarray):
        return [_json(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [_json(v) for v in x]
    if isinstance(x, dict):
        return {k: _json(v) for k, v in x.items()}
    if isinstance(x, (float, np.floating)):
        return float(x) if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    return x


@dataclass
class LimitVerdict:
    """Outcome of :func:`classify`.

    Class-specific parameters are vectors over components; those that do
    not apply to the selected class are ``None``.  ``residuals`` holds the
    RMS residual of every model.
    """

    kind: str
    residuals: dict
    value: np.ndarray | None = None
    rate: np.ndarray | None = None
    slope: np.ndarray | None = None
    exponent: float | None = None
    coefficient: np.ndarray | None = None
    amplitude: np.ndarray | None = None
    phase: np.ndarray | None = None
    cos_coef: np.ndarray | None = None
    sin_coef: np.ndarray | None = None
    separation: float | None = None
    tail_degree: int = 0
    n_points: int = 0
    r0: float = 1.0
    diagnostics: list = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.kind == "converged"

    def params(self) -> dict:
        """Class-specific parameters."""
        names = {
            "converged": ("value", "rate"),
            "log_divergent": ("slope", "value"),
            "power_divergent": ("exponent", "coefficient", "value"),
            "oscillatory": ("amplitude", "phase", "cos_coef", "sin_coef", "value"),
            "undetermined": (),
        }[self.kind]
        return {k: _json(getattr(self, k)) for k in names}

    def to_dict(self) -> dict:
        """``{"class": ..., "params": {...}, "residuals": {...}, ...}``, JSON-ready."""
        return {
            "class": self.kind,
            "params": self.params(),
            "residuals": _json(self.residuals),
            "separation": _json(self.separation),
            "tail_degree": self.tail_degree,
            "n_points": self.n_points,
            "diagnostics": list(self.diagnostics),
        }


class Extrapolation(NamedTuple):
    value: np.ndarray
    error: np.ndarray
    degree: int


def _prepare(sequence):
    rs, vs = [], []
    for r, v in sequence:
        rs.append(float(r))
        vs.append(np.atleast_1d(np.asarray(v, dtype=float)))
    r = np.asarray(rs)
    if len(r) < MIN_POINTS:
        raise ContractError(f"need at least {MIN_POINTS} points, got {len(r)}")
    if np.any(np.diff(r) <= 0) or r[0] <= 0:
        raise ContractError("radii must be positive and strictly increasing")
    Y = np.vstack(vs)
    if not np.all(np.isfinite(Y)):
        raise ContractError("sequence contains non-finite values")
    return r, Y


def _tail(r, K):
    x = r[0] / r
    return np.column_stack([np.ones_like(r)] + [x**j for j in range(1, K + 1)])


def _lstsq(X, Y):
    """Coefficients, RMS residual and a rank flag."""
    # column scaling keeps the rank test meaningful
    s = np.linalg.norm(X, axis=0)
    s[s == 0] = 1.0
    coef, _, rank, _ = np.linalg.lstsq(X / s, Y, rcond=None)
    coef = coef / s[:, None]
    res = Y - X @ coef
    return coef, float(np.sqrt(np.mean(res**2))), rank == X.shape[1]


def _power_fit(r, Y, T):
    def rms(p):
        return _lstsq(np.column_stack([T, (r / r[0]) ** p]), Y)[1]

    grid = np.linspace(P_MIN, P_MAX, 60)
    vals = [rms(p) for p in grid]
    k = int(np.argmin(vals))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    best = minimize_scalar(rms, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    p = float(best.x) if best.fun <= vals[k] else float(grid[k])
    coef, res, full = _lstsq(np.column_stack([T, (r / r[0]) ** p]), Y)
    return p, coef, res, full


def classify(sequence, tail_degree: int | None = None, margin: float = MARGIN) -> LimitVerdict:
    """Classify the large-r behaviour of a vector sequence ``[(r, v), ...]``.

    Parameters
    ----------
    sequence
        At least 8 pairs with strictly increasing positive ``r``.
    tail_degree
        Number of ``(r0/r)**j`` tail terms; default ``min(3, n - 7)``.
    margin
        Required residual ratio between the selected model and each rival.
    """
    r, Y = _prepare(sequence)
    n = len(r)
    K = min(3, n - 7) if tail_degree is None else int(tail_degree)
    K = max(K, 1)
    T = _tail(r, K)
    lnr = np.log(r)
    scale = float(np.max(np.abs(Y)))
    diagnostics = []

    fits = {}
    fits["converged"] = _lstsq(T, Y)
    fits["log_divergent"] = _lstsq(np.column_stack([T, lnr - lnr[0]]), Y)
    fits["oscillatory"] = _lstsq(np.column_stack([T, np.cos(lnr), np.sin(lnr)]), Y)
    p, pc, pres, pfull = _power_fit(r, Y, T)
    fits["power_divergent"] = (pc, pres, pfull)

    residuals = {}
    for name in CLASSES:
        coef, res, full = fits[name]
        if not full:
            diagnostics.append(f"{name}: rank-deficient design matrix")
            res = math.inf
        residuals[name] = res
    verdict = LimitVerdict(kind="undetermined", residuals=residuals, tail_degree=K, n_points=n,
                           r0=float(r[0]), diagnostics=diagnostics)

    conv = residuals["converged"]
    if not math.isfinite(conv):
        return verdict
    if conv <= NOISE_FLOOR * scale or scale == 0.0:
        return _fill(verdict, "converged", fits, p, conv, residuals, margin)
    spread = float(np.max(np.ptp(Y, axis=0)))
    div = sorted(CLASSES[1:], key=lambda c: residuals[c])
    best, second = div[0], div[1]
    if residuals[best] * margin > conv:
        # no divergent term is supported
        if conv > FIT_FRACTION * spread:
            diagnostics.append(f"no model fits: best residual {residuals[best]:.3g} vs spread {spread:.3g}")
            return verdict
        return _fill(verdict, "converged", fits, p, conv / max(residuals[best], 1e-300), residuals, margin)
    if residuals[best] > FIT_FRACTION * spread:
        diagnostics.append(f"no model fits: best residual {residuals[best]:.3g} vs spread {spread:.3g}")
        return verdict
    if residuals[best] * margin > residuals[second]:
        diagnostics.append(f"{best} and {second} both fit; separation "
                           f"{residuals[second] / max(residuals[best], 1e-300):.3g} < {margin:g}")
        return verdict
    sep = min(conv, residuals[second]) / max(residuals[best], 1e-300)
    return _fill(verdict, best, fits, p, sep, residuals, margin)


def _fill(v: LimitVerdict, kind, fits, p, sep, residuals, margin):
    coef = fits[kind][0]
    K = v.tail_degree
    v.kind = kind
    v.separation = float(sep)
    v.value = coef[0]
    v.rate = coef[1]
    if kind == "log_divergent":
        v.slope = coef[K + 1]
    elif kind == "power_divergent":
        v.exponent = p
        # coefficient of r**p in absolute radius units
        v.coefficient = coef[K + 1] / v.r0**p
    elif kind == "oscillatory":
        A, B = coef[K + 1], coef[K + 2]
        v.cos_coef, v.sin_coef = A, B
        v.amplitude = np.hypot(A, B)
        v.phase = np.arctan2(B, A)
    return v


def extrapolate(sequence, verdict: LimitVerdict | None = None, max_degree: int = 4) -> Extrapolation:
    """Limit of a converged sequence by a Richardson-style polynomial fit in ``1/r``.

    Fits ``c + sum_{j<=K} b_j (r0/r)**j`` for ``K = 1..max_degree`` and keeps
    the ``K`` with the smallest standard error of ``c``.  The error estimate
    is the larger of that standard error and the change of ``c`` when one
    more tail term is added.

    Raises
    ------
    ContractError
        If the sequence is not classified ``converged``.
    """
    verdict = verdict if verdict is not None else classify(sequence)
    if verdict.kind != "converged":
        raise ContractError(f"extrapolate needs a converged sequence, verdict is {verdict.kind}")
    r, Y = _prepare(sequence)
    n = len(r)
    fits = []
    for K in range(1, min(max_degree, n - 3) + 1):
        X = _tail(r, K)
        coef, _, full = _lstsq(X, Y)
        if not full:
            break
        res = Y - X @ coef
        s2 = np.sum(res**2, axis=0) / (n - X.shape[1])
        cov00 = np.linalg.pinv(X.T @ X)[0, 0]
        fits.append((coef[0], np.sqrt(np.maximum(s2 * cov00, 0.0)), K))
    if not fits:
        raise ContractError("extrapolation fit is rank-deficient")
    i = min(range(len(fits)), key=lambda j: np.max(fits[j][1]))
    c, se, K = fits[i]
    nxt = fits[i + 1][0] if i + 1 < len(fits) else fits[i - 1][0] if i > 0 else c
    err = np.maximum(se, np.abs(nxt - c))
    err = np.maximum(err, 4 * np.finfo(float).eps * np.max(np.abs(Y)))
    return Extrapolation(value=c, error=err, degree=K)
