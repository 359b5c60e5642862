"""Ray marching against the occupancy grid.

The sampling kernel is compiled (Cython) when available; set
``TUNNELPROP_PURE=1`` to force the numpy fallback.  Both produce identical
sample arrays, so every downstream distance is backend-independent.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, OutOfBoundsError
from .geo import LocalPoint
from .grid import OccupancyGrid

if os.environ.get("TUNNELPROP_PURE") == "1":
    from . import _raycore_py as _kernel
    KERNEL_BACKEND = "python"
else:
    try:
        from . import _raycore as _kernel  # type: ignore[attr-defined]
        KERNEL_BACKEND = "cython"
    except ImportError:
        from . import _raycore_py as _kernel
        KERNEL_BACKEND = "python"

FREE_TO_SOLID = "free->solid"
SOLID_TO_FREE = "solid->free"


@dataclass(frozen=True)
class RayTrace:
    """All free/solid transitions along one ray, plus the terrain exit."""

    origin: LocalPoint
    direction: tuple[float, float, float]
    crossings: tuple[tuple[float, str], ...]
    terrain_exit: float | None


def unit_direction(frm: LocalPoint, to: LocalPoint, flatten: bool = False):
    """Unit vector from one point toward another; flatten drops the up component."""
    d = np.array([to.east - frm.east, to.north - frm.north, to.up - frm.up])
    if flatten:
        d[2] = 0.0
    norm = np.linalg.norm(d)
    if norm == 0.0:
        raise InvalidParameterError("zero-length ray direction")
    return d / norm


def sample_ray(grid: OccupancyGrid, origin: LocalPoint, direction, step: float,
               max_range: float) -> np.ndarray:
    """Occupancy of equally spaced samples along the ray, as a uint8 array."""
    if step <= 0 or step > grid.voxel_size:
        raise InvalidParameterError("step must be in (0, voxel_size]")
    if max_range <= 0:
        raise InvalidParameterError("max_range must be positive")
    d = np.asarray(direction, dtype=np.float64)
    d = d / np.linalg.norm(d)
    # Kernel works in voxel-index units of the dense array.
    o_vox = np.array([origin.east, origin.north, origin.up]) / grid.voxel_size - grid.index_min
    n_samples = int(math.floor(max_range / step)) + 1
    return _kernel.ray_occupancy(grid.dense, o_vox[0], o_vox[1], o_vox[2],
                                 d[0], d[1], d[2], step / grid.voxel_size, n_samples)


def ray_march(grid: OccupancyGrid, origin: LocalPoint, direction, step: float,
              max_range: float) -> RayTrace:
    """March a ray and record every free<->solid transition up to max_range.

    ``terrain_exit`` is the last solid->free transition with no solid sample
    beyond it; 0.0 for a ray that never meets solid from a free origin, and
    None when the ray ends inside solid.
    """
    if not grid.contains(origin):
        raise OutOfBoundsError("ray origin lies outside the grid bounds")
    occ = sample_ray(grid, origin, direction, step, max_range)
    flips = np.flatnonzero(np.diff(occ.astype(np.int8)))
    crossings = tuple(
        (float((i + 1) * step), FREE_TO_SOLID if occ[i + 1] else SOLID_TO_FREE)
        for i in flips
    )
    if not occ.any():
        terrain_exit: float | None = 0.0
    elif occ[-1]:
        terrain_exit = None
    else:
        last_solid = int(np.flatnonzero(occ)[-1])
        terrain_exit = float((last_solid + 1) * step)
    d = np.asarray(direction, dtype=np.float64)
    d = tuple((d / np.linalg.norm(d)).tolist())
    return RayTrace(origin, d, crossings, terrain_exit)


def solid_length(trace: RayTrace, step: float, upto: float | None = None) -> float:
    """Total ray length spent inside solid, optionally truncated at ``upto``."""
    segments = []
    entry = None
    start_solid = bool(trace.crossings) and trace.crossings[0][1] == SOLID_TO_FREE
    if start_solid or (not trace.crossings and trace.terrain_exit is None):
        entry = 0.0
    for dist, kind in trace.crossings:
        if kind == FREE_TO_SOLID:
            entry = dist
        elif entry is not None:
            segments.append((entry, dist))
            entry = None
    total = 0.0
    limit = math.inf if upto is None else upto
    for a, b in segments:
        if a >= limit:
            break
        total += min(b, limit) - a
    return total
