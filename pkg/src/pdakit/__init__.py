"""Pareto depth analysis toolkit: exact nondominated sorting, continuum-limit
PDE solvers on [0,1]^2 grids, and streaming multi-criteria anomaly detection."""

__version__ = "0.1.0"

from .anomaly import (  # noqa: F401
    AnomalyVerdict,
    DetectorConfig,
    Dyad,
    ExactDetector,
    PdeDetector,
    knn_union,
)
from .density import StreamingDensity  # noqa: F401
from .grid import GridField  # noqa: F401
from .hje import HjeSolution, depth_estimate, solve_hje  # noqa: F401
from .pareto import (  # noqa: F401
    PointSet,
    SortResult,
    dominates,
    sort_bruteforce,
    sort_fast2d,
    within_front_indices,
)
from .similarity import AbsDiffMeasure, IofMeasure, SimilarityMeasure  # noqa: F401
from .transport import TransportSolution, solve_transport, solve_v, solve_w  # noqa: F401
