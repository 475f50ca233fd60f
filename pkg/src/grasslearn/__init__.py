"""Learning on the Grassmann manifold: geometry, kernels, optimization and applications."""

from .errors import DataError, GrassError, NumericalError
from .manifold import (
    GrassmannPoint,
    Metric,
    TangentVector,
    all_distances,
    distance,
    exp_map,
    from_matrix,
    geodesic_point,
    log_map,
    principal_angles,
    random_point,
)

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "GrassError",
    "GrassmannPoint",
    "Metric",
    "NumericalError",
    "TangentVector",
    "all_distances",
    "distance",
    "exp_map",
    "from_matrix",
    "geodesic_point",
    "log_map",
    "principal_angles",
    "random_point",
]
