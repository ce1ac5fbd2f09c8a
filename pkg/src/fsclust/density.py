"""Gaussian kernel density estimation with Sheather-Jones plug-in bandwidth.

The kernel is the standard normal density. The estimator and its derivative
use the usual negative exponent, so the estimate is itself a probability
density (a mixture of normals).
"""
from dataclasses import dataclass
import math

import numpy as np

from . import _kernels
from .errors import BandwidthFailure, DegenerateSample

SQRT_2PI = math.sqrt(2.0 * math.pi)
SQRT_PI = math.sqrt(math.pi)
GRID_PAD = 8.0
DEFAULT_GRID_SIZE = 4096

# R(K) and mu_2(K) for the standard normal kernel
_ROUGHNESS = 1.0 / (2.0 * SQRT_PI)
_MU2 = 1.0
# phi^(4)(0) and phi^(6)(0)
_K4_AT_0 = 3.0 / SQRT_2PI
_K6_AT_0 = -15.0 / SQRT_2PI


@dataclass(frozen=True)
class DensityModel:
    """Fitted Gaussian KDE: the sample and its bandwidth."""

    sample: np.ndarray
    bandwidth: float

    def __post_init__(self):
        sample = np.array(self.sample, dtype=np.float64).ravel()
        if sample.size < 1:
            raise DegenerateSample("empty sample")
        if not np.all(np.isfinite(sample)):
            raise DegenerateSample("sample contains non-finite values")
        if not (self.bandwidth > 0 and math.isfinite(self.bandwidth)):
            raise ValueError(f"bandwidth must be positive and finite, got {self.bandwidth}")
        sample.setflags(write=False)
        object.__setattr__(self, "sample", sample)
        object.__setattr__(self, "bandwidth", float(self.bandwidth))

    @property
    def n(self):
        return self.sample.shape[0]


@dataclass(frozen=True)
class EvalGrid:
    lo: float
    hi: float
    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"grid needs at least 2 points, got m={self.m}")
        if not self.lo < self.hi:
            raise ValueError(f"grid bounds must satisfy lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def spacing(self):
        return (self.hi - self.lo) / (self.m - 1)

    @property
    def points(self):
        return np.linspace(self.lo, self.hi, self.m)


def robust_scale(sample):
    """min(sample standard deviation, IQR / 1.349)."""
    x = np.asarray(sample, dtype=np.float64)
    sd = float(np.std(x, ddof=1))
    q75, q25 = np.percentile(x, [75.0, 25.0])
    iqr_scale = float(q75 - q25) / 1.349
    if iqr_scale > 0:
        return min(sd, iqr_scale)
    return sd


def psi_functional(sample, g, order):
    """Kernel estimate of the density functional psi_r at pilot bandwidth ``g``.

    psi_r(g) = n^-2 g^-(r+1) sum_i sum_j phi^(r)((x_i - x_j) / g)
    """
    x = np.asarray(sample, dtype=np.float64)
    n = x.shape[0]
    s = _kernels.pair_hermite_sum(x, g, order)
    return s / (n * n * g ** (order + 1) * SQRT_2PI)


def _check_sample(sample):
    x = np.asarray(sample, dtype=np.float64).ravel()
    if x.shape[0] < 2:
        raise DegenerateSample(f"need at least 2 points, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise DegenerateSample("sample contains non-finite values")
    if not np.ptp(x) > 0:
        raise DegenerateSample("sample has zero variance")
    return x


def sj_bandwidth(sample):
    """Two-stage Sheather-Jones direct plug-in bandwidth for a Gaussian kernel.

    Raises DegenerateSample for constant input and BandwidthFailure when an
    estimated functional has the wrong sign or is not finite.
    """
    x = _check_sample(sample)
    n = x.shape[0]
    scale = robust_scale(x)
    if not scale > 0:
        raise DegenerateSample("sample scale estimate is zero")

    psi8 = 105.0 / (32.0 * SQRT_PI * scale**9)
    g6 = (-2.0 * _K6_AT_0 / (psi8 * n)) ** (1.0 / 9.0)
    psi6 = psi_functional(x, g6, 6)
    if not (math.isfinite(psi6) and psi6 < 0):
        raise BandwidthFailure(f"psi6 estimate {psi6!r} is not negative")
    g4 = (-2.0 * _K4_AT_0 / (psi6 * n)) ** (1.0 / 7.0)
    psi4 = psi_functional(x, g4, 4)
    if not (math.isfinite(psi4) and psi4 > 0):
        raise BandwidthFailure(f"psi4 estimate {psi4!r} is not positive")
    h = (_ROUGHNESS / (_MU2**2 * psi4 * n)) ** 0.2
    if not (math.isfinite(h) and h > 0):
        raise BandwidthFailure(f"bandwidth {h!r} is not positive")
    return h


def silverman_bandwidth(sample):
    x = _check_sample(sample)
    return 0.9 * robust_scale(x) * x.shape[0] ** -0.2


def select_bandwidth(sample):
    """Return ``(h, fallback_used)``; falls back to Silverman's rule on BandwidthFailure."""
    try:
        return sj_bandwidth(sample), False
    except BandwidthFailure:
        return silverman_bandwidth(sample), True


def fit(sample, bandwidth=None):
    """Build a DensityModel, selecting the bandwidth by plug-in when not given."""
    if bandwidth is None:
        bandwidth = sj_bandwidth(sample)
    return DensityModel(sample, bandwidth)


def kde_sums(model, x):
    x = np.asarray(x, dtype=np.float64).ravel()
    return _kernels.kde_grid(model.sample, model.bandwidth, x)


def kde_pdf(model, x):
    """Gaussian KDE evaluated at ``x`` (scalar or array)."""
    scalar = np.ndim(x) == 0
    s0, _ = kde_sums(model, x)
    f = s0 / (model.n * model.bandwidth * SQRT_2PI)
    return float(f[0]) if scalar else f.reshape(np.shape(x))


def kde_pdf_deriv(model, x):
    """Exact derivative of :func:`kde_pdf` with respect to ``x``."""
    scalar = np.ndim(x) == 0
    _, s1 = kde_sums(model, x)
    h = model.bandwidth
    fp = -s1 / (model.n * h * h * SQRT_2PI)
    return float(fp[0]) if scalar else fp.reshape(np.shape(x))


def kde_pdf_and_deriv(model, x):
    """Density and derivative from a single pass over the sample."""
    s0, s1 = kde_sums(model, x)
    h = model.bandwidth
    norm = model.n * h * SQRT_2PI
    return s0 / norm, -s1 / (norm * h)


def make_grid(model, m=DEFAULT_GRID_SIZE):
    """Uniform grid covering the sample padded by 8 bandwidths on each side."""
    if m < 2:
        raise ValueError(f"grid needs at least 2 points, got m={m}")
    pad = GRID_PAD * model.bandwidth
    return EvalGrid(float(model.sample.min() - pad), float(model.sample.max() + pad), int(m))
