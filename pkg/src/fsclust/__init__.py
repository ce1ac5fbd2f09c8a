"""Fisher-Shannon plane and complexity-invariant clustering of time series."""
from ._kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
