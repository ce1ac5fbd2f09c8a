"""Additive STL decomposition (Cleveland et al. 1990) with a vectorized loess.

Loess follows the reference Fortran conventions: the neighbourhood of each
evaluation point is the ``span`` nearest indices, tricube weights on the
distance scaled by the largest neighbourhood distance (enlarged by
``(span - n) // 2`` when the span exceeds the series), multiplied by optional
robustness weights.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .errors import SeriesTooShort

PERIODIC = "periodic"

_BLOCK_ELEMS = 1_000_000


def next_odd(x):
    k = int(math.ceil(x))
    return k if k % 2 == 1 else k + 1


@dataclass(frozen=True)
class StlParams:
    period: int = 24
    seasonal_window: object = PERIODIC
    trend_window: int = None
    inner_iterations: int = 2
    outer_iterations: int = 0
    lowpass_window: int = None

    def __post_init__(self):
        if not isinstance(self.period, (int, np.integer)) or self.period < 2:
            raise ValueError(f"period must be an integer >= 2, got {self.period!r}")
        if self.seasonal_window != PERIODIC:
            _check_window("seasonal_window", self.seasonal_window)
        if self.trend_window is None:
            object.__setattr__(self, "trend_window", next_odd(1.5 * self.period))
        _check_window("trend_window", self.trend_window)
        if self.lowpass_window is None:
            object.__setattr__(self, "lowpass_window", next_odd(self.period))
        _check_window("lowpass_window", self.lowpass_window)
        if self.inner_iterations < 1:
            raise ValueError("inner_iterations must be >= 1")
        if self.outer_iterations < 0:
            raise ValueError("outer_iterations must be >= 0")

    @property
    def periodic(self):
        return self.seasonal_window == PERIODIC

    def to_dict(self):
        return {
            "period": int(self.period),
            "seasonal_window": self.seasonal_window if self.periodic else int(self.seasonal_window),
            "trend_window": int(self.trend_window),
            "lowpass_window": int(self.lowpass_window),
            "inner_iterations": int(self.inner_iterations),
            "outer_iterations": int(self.outer_iterations),
        }


def _check_window(name, w):
    if isinstance(w, bool) or not isinstance(w, (int, np.integer)) or w < 3 or w % 2 == 0:
        raise ValueError(f"{name} must be an odd integer >= 3, got {w!r}")


@dataclass(frozen=True)
class StlDecomposition:
    trend: np.ndarray
    seasonal: np.ndarray
    remainder: np.ndarray
    period: int
    robustness_weights: np.ndarray = field(default=None, repr=False)


def _loess_at(y, xs, span, degree, weights):
    """Evaluate loess of ``y`` (observed at 0..n-1) at positions ``xs``."""
    n = y.shape[0]
    xs = np.asarray(xs, dtype=np.float64)
    q = min(span, n)
    half = (span - 1) // 2
    out = np.empty(xs.shape[0])
    rows = max(1, _BLOCK_ELEMS // q)
    offs = np.arange(q)
    for a in range(0, xs.shape[0], rows):
        x0 = xs[a : a + rows]
        nleft = np.clip(np.floor(x0).astype(np.int64) - half, 0, n - q)
        idx = nleft[:, None] + offs[None, :]
        nright = nleft + q - 1
        h = np.maximum(x0 - nleft, nright - x0)
        if span > n:
            h = h + (span - n) // 2
        r = np.abs(idx - x0[:, None])
        hh = h[:, None]
        w = np.where(r <= 0.999 * hh, (1.0 - (r / np.where(hh > 0, hh, 1.0)) ** 3) ** 3, 0.0)
        w = np.where(r <= 0.001 * hh, 1.0, w)
        if weights is not None:
            w = w * weights[idx]
        out[a : a + rows] = _local_fit(y[idx], idx - x0[:, None], w, degree, n, y, x0)
    return out


def _local_fit(yw, dx, w, degree, n, y, x0):
    wsum = w.sum(axis=1)
    bad = wsum <= 0
    wsum = np.where(bad, 1.0, wsum)
    wn = w / wsum[:, None]
    fit0 = (wn * yw).sum(axis=1)
    if degree == 0:
        res = fit0
    else:
        # centred at the weighted mean abscissa for conditioning
        mu = (wn * dx).sum(axis=1)
        c = dx - mu[:, None]
        b = (wn * c * c).sum(axis=1)
        ok1 = np.sqrt(b) > 0.001 * (n - 1)
        slope_num = (wn * c * yw).sum(axis=1)
        slope = np.where(ok1, slope_num / np.where(ok1, b, 1.0), 0.0)
        fit1 = fit0 - slope * mu
        res = np.where(ok1, fit1, fit0)
        if degree == 2:
            res = np.where(ok1, _quadratic_fit(yw, dx, wn, fit1), res)
    if np.any(bad):
        # no usable neighbours: keep the nearest observation
        nearest = np.clip(np.rint(x0[bad]).astype(np.int64), 0, n - 1)
        res = res.copy()
        res[bad] = y[nearest]
    return res


def _quadratic_fit(yw, dx, wn, fallback):
    # scaled abscissa keeps the normal equations well conditioned
    s = np.maximum(np.abs(dx).max(axis=1), 1.0)[:, None]
    t = dx / s
    m0 = wn.sum(axis=1)
    m1 = (wn * t).sum(axis=1)
    m2 = (wn * t**2).sum(axis=1)
    m3 = (wn * t**3).sum(axis=1)
    m4 = (wn * t**4).sum(axis=1)
    A = np.stack(
        [np.stack([m0, m1, m2], -1), np.stack([m1, m2, m3], -1), np.stack([m2, m3, m4], -1)], -2
    )
    rhs = np.stack([(wn * yw).sum(1), (wn * t * yw).sum(1), (wn * t * t * yw).sum(1)], -1)
    out = fallback.copy()
    cond = np.linalg.cond(A)
    good = np.isfinite(cond) & (cond < 1e10)
    if np.any(good):
        beta = np.linalg.solve(A[good], rhs[good][..., None])[..., 0]
        out[good] = beta[:, 0]
    return out


def loess_smooth(y, span, degree=1, weights=None):
    """Loess fit of ``y`` evaluated at every index.

    ``span`` is the number of nearest neighbours (odd, >= 3); it may exceed
    ``len(y)``, in which case the tricube scale is widened and the fit tends
    to a global polynomial. ``weights`` multiplies the tricube weights.
    """
    y = np.asarray(y, dtype=np.float64)
    if span < 3 or span % 2 == 0:
        raise ValueError(f"span must be an odd integer >= 3, got {span}")
    if degree not in (0, 1, 2):
        raise ValueError(f"degree must be 0, 1 or 2, got {degree}")
    if weights is not None:
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != y.shape or np.any(weights < 0):
            raise ValueError("weights must be non-negative and match y")
    n = y.shape[0]
    if n == 0:
        return y.copy()
    return _loess_at(y, np.arange(n, dtype=np.float64), span, degree, weights)


def _moving_average(x, k):
    c = np.cumsum(np.concatenate(([0.0], x)))
    return (c[k:] - c[:-k]) / k


def _cycle_subseries(detrended, period, params, rho):
    """Smooth each cycle-subseries and extend it one cycle on both sides."""
    n = detrended.shape[0]
    out = np.empty(n + 2 * period)
    for j in range(period):
        sub = detrended[j::period]
        w = rho[j::period]
        k = sub.shape[0]
        ext = np.empty(k + 2)
        if params.periodic:
            ws = w.sum()
            ext[:] = (w * sub).sum() / ws if ws > 0 else sub.mean()
        else:
            xs = np.arange(-1, k + 1, dtype=np.float64)
            ext[:] = _loess_at(sub, xs, params.seasonal_window, 1, w)
        out[j::period] = ext
    return out


def _lowpass(c, period, window):
    ma = _moving_average(_moving_average(_moving_average(c, period), period), 3)
    return loess_smooth(ma, window, degree=1)


def _bisquare_weights(resid):
    r = np.abs(resid)
    h = 6.0 * np.median(r)
    if h <= 0:
        return np.ones_like(r)
    u = r / h
    return np.where(u < 1.0, (1.0 - u * u) ** 2, 0.0)


def stl(values, params=None):
    """Decompose ``values`` into trend + seasonal + remainder."""
    if params is None:
        params = StlParams()
    y = np.asarray(values, dtype=np.float64).ravel()
    n = y.shape[0]
    p = params.period
    if n < 2 * p:
        raise SeriesTooShort(f"STL needs at least {2 * p} samples (2 periods), got {n}")
    if not np.all(np.isfinite(y)):
        raise ValueError("STL input must be finite and gap-free")

    trend = np.zeros(n)
    seasonal = np.zeros(n)
    rho = np.ones(n)
    for outer in range(params.outer_iterations + 1):
        for _ in range(params.inner_iterations):
            c = _cycle_subseries(y - trend, p, params, rho)
            low = _lowpass(c, p, params.lowpass_window)
            seasonal = c[p : n + p] - low
            trend = loess_smooth(y - seasonal, params.trend_window, 1, rho)
        if outer < params.outer_iterations:
            rho = _bisquare_weights(y - trend - seasonal)

    if params.periodic:
        # the low-pass step leaves O(eps) wobble; make the cycle exact
        means = np.array([seasonal[j::p].mean() for j in range(p)])
        seasonal = means[np.arange(n) % p]
    remainder = y - trend - seasonal
    return StlDecomposition(trend, seasonal, remainder, p, rho)


def stl_decompose(ts, params=None):
    """STL of a gap-free :class:`~fsclust.ingest.TimeSeries`."""
    if ts.missing_mask.any():
        raise ValueError(f"series {ts.id!r} has missing values; fill gaps first")
    return stl(ts.values, params)
