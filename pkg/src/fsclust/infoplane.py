"""Shannon entropy power and Fisher information of a KDE by trapezoidal quadrature.

Entropy uses the standard sign convention H = -E[log f], so a Gaussian
attains SEP * FIM = 1 and every other density lies above it.
"""
from dataclasses import asdict, dataclass
import math

import numpy as np

from .density import DEFAULT_GRID_SIZE, DensityModel, kde_pdf_and_deriv, make_grid, select_bandwidth
from .errors import DegenerateSample, IsoperimetricViolation, QuadratureFailure

# integrands are dropped where f < CUTOFF * max(f)
CUTOFF = 1e-12
PRODUCT_SLACK = 1e-6


@dataclass(frozen=True)
class FsPoint:
    id: str
    sep: float
    fim: float
    product: float
    bandwidth: float
    n: int
    fallback_bandwidth_used: bool = False

    def to_dict(self):
        return asdict(self)


def _trapezoid(y, dx):
    return float(dx * (math.fsum(y) - 0.5 * (y[0] + y[-1])))


def _evaluate(model, grid):
    f, fp = kde_pdf_and_deriv(model, grid.points)
    keep = f >= CUTOFF * f.max()
    return f, fp, keep


def _entropy_from(f, keep, dx):
    integrand = np.zeros_like(f)
    integrand[keep] = -f[keep] * np.log(f[keep])
    h = _trapezoid(integrand, dx)
    if not math.isfinite(h):
        raise QuadratureFailure(f"differential entropy is not finite ({h!r})")
    return h


def _fim_from(f, fp, keep, dx):
    integrand = np.zeros_like(f)
    integrand[keep] = fp[keep] ** 2 / f[keep]
    i = _trapezoid(integrand, dx)
    if not (math.isfinite(i) and i > 0):
        raise QuadratureFailure(f"Fisher information is not finite and positive ({i!r})")
    return i


def _sep_from_entropy(h):
    n = math.exp(2.0 * h) / (2.0 * math.pi * math.e)
    if not (math.isfinite(n) and n > 0):
        raise QuadratureFailure(f"entropy power is not finite and positive ({n!r})")
    return n


def differential_entropy(model, grid):
    f, _, keep = _evaluate(model, grid)
    return _entropy_from(f, keep, grid.spacing)


def sep(model, grid):
    """Shannon entropy power exp(2H) / (2 pi e)."""
    return _sep_from_entropy(differential_entropy(model, grid))


def fim(model, grid):
    """Fisher information (for a location parameter) integral of f'^2 / f."""
    f, fp, keep = _evaluate(model, grid)
    return _fim_from(f, fp, keep, grid.spacing)


def sep_fim(model, grid):
    """Both coordinates from one evaluation of the density on the grid."""
    f, fp, keep = _evaluate(model, grid)
    dx = grid.spacing
    return _sep_from_entropy(_entropy_from(f, keep, dx)), _fim_from(f, fp, keep, dx)


def fs_point(id, remainder, m=DEFAULT_GRID_SIZE, standardize=False):
    """Fisher-Shannon coordinates of one series.

    With ``standardize`` the series is scaled to zero mean and unit variance
    first; FS coordinates are scale dependent, so this changes plane positions.
    """
    x = np.asarray(remainder, dtype=np.float64).ravel()
    if x.shape[0] < 2 or not np.all(np.isfinite(x)):
        raise DegenerateSample(f"series {id!r}: need at least 2 finite values")
    if not np.ptp(x) > 0:
        raise DegenerateSample(f"series {id!r} is constant")
    if standardize:
        x = (x - x.mean()) / x.std(ddof=1)
    h, fallback = select_bandwidth(x)
    model = DensityModel(x, h)
    grid = make_grid(model, m)
    n_hat, i_hat = sep_fim(model, grid)
    product = n_hat * i_hat
    if product < 1.0 - PRODUCT_SLACK:
        raise IsoperimetricViolation(
            f"series {id!r}: SEP*FIM = {product!r} < 1; quadrature grid too coarse?"
        )
    return FsPoint(str(id), n_hat, i_hat, product, h, int(x.shape[0]), fallback)
