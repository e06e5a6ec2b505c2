"""Backend selection for the hot kernels.

The compiled extension is used when it imports; set ``FINEHYP_PURE=1`` to
force the numpy/Python implementations.
"""
import os

from . import _pykernels

BACKEND = _pykernels
if not os.environ.get("FINEHYP_PURE"):
    try:
        from . import _ckernels as BACKEND  # type: ignore[no-redef]
    except ImportError:  # pragma: no cover - depends on the build
        BACKEND = _pykernels

INF = _pykernels.INF
NAME = BACKEND.NAME

bfs_from = BACKEND.bfs_from
bfs_all_pairs = BACKEND.bfs_all_pairs
interval_delta = BACKEND.interval_delta
angle_table = BACKEND.angle_table
count_cycle_paths = BACKEND.count_cycle_paths
next_hop = BACKEND.next_hop
chain_table = BACKEND.chain_table
triangle_sweep = BACKEND.triangle_sweep
angle_forcing_sweep = BACKEND.angle_forcing_sweep
