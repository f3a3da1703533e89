"""lpplab: Monte Carlo laboratory for last-passage percolation fluctuations
near the axis, their Brownian analogue, and the Tracy-Widom reference law.
"""

from .kernels import BACKEND
from .weights import StreamKey, WeightSpec

__all__ = ["BACKEND", "StreamKey", "WeightSpec"]
__version__ = "0.1.0"
