"""Angles, cones, sphere partitions and weighted Hilbert norms on hyperbolic graphs."""
from . import kernels
from .errors import *  # noqa: F401,F403
from .graph import (  # noqa: F401
    DeltaEstimate,
    DistanceMatrix,
    Graph,
    all_geodesics,
    all_pairs_distances,
    build_graph,
    gromov_product,
    hyperbolicity_delta,
    interval,
    quasi_center,
    some_geodesic,
)

__version__ = "0.1.0"
BACKEND = kernels.NAME
