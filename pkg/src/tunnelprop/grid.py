"""Voxel occupancy grid over a point cloud.

Voxel indices follow the floor convention on all axes: a point belongs to
voxel ``floor(coordinate / voxel_size)``, so a point exactly on a voxel face
is assigned to the lower-index voxel.  The grid is immutable after
construction and safe for concurrent read queries.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidParameterError
from .geo import LocalPoint, PointCloud

_VOXEL_EPS = 1e-9  # tolerance when a caller passes voxel_size == resolution


class OccupancyGrid:
    """Boolean voxelization of solid geometry.

    Internally a dense uint8 array offset by the minimum occupied index;
    ``occupied`` exposes the spec's set-of-integer-voxel view.
    """

    def __init__(self, voxel_size: float, dense: np.ndarray, index_min: np.ndarray):
        if voxel_size <= 0:
            raise InvalidParameterError("voxel_size must be positive")
        self.voxel_size = float(voxel_size)
        self.dense = np.ascontiguousarray(dense, dtype=np.uint8)
        self.dense.setflags(write=False)
        self.index_min = np.asarray(index_min, dtype=np.int64)
        self.origin = LocalPoint(0.0, 0.0, 0.0)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.dense.shape

    @property
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """(min_corner, max_corner) of the voxelized extent, metres."""
        lo = self.index_min * self.voxel_size
        hi = (self.index_min + np.array(self.dense.shape)) * self.voxel_size
        return lo, hi

    @property
    def occupied(self) -> frozenset[tuple[int, int, int]]:
        idx = np.argwhere(self.dense) + self.index_min
        return frozenset(map(tuple, idx.tolist()))

    def occupied_count(self) -> int:
        return int(np.count_nonzero(self.dense))

    def voxel_index(self, p: LocalPoint) -> tuple[int, int, int]:
        v = np.floor(np.array([p.east, p.north, p.up]) / self.voxel_size).astype(np.int64)
        return tuple(v.tolist())

    def contains(self, p: LocalPoint) -> bool:
        lo, hi = self.bounds
        q = np.array([p.east, p.north, p.up])
        return bool(np.all(q >= lo) and np.all(q < hi))


def build_occupancy(cloud: PointCloud, voxel_size: float = 0.25) -> OccupancyGrid:
    """Voxelize a point cloud; a voxel is occupied iff >= 1 point falls in it."""
    if voxel_size <= 0:
        raise InvalidParameterError("voxel_size must be positive")
    if voxel_size + _VOXEL_EPS < cloud.source_resolution:
        raise InvalidParameterError(
            f"voxel_size {voxel_size} finer than source resolution {cloud.source_resolution}")
    pts = np.array([(p.east, p.north, p.up) for p in cloud.points])
    idx = np.floor(pts / voxel_size).astype(np.int64)
    index_min = idx.min(axis=0)
    shape = idx.max(axis=0) - index_min + 1
    dense = np.zeros(tuple(shape), dtype=np.uint8)
    local = idx - index_min
    dense[local[:, 0], local[:, 1], local[:, 2]] = 1
    return OccupancyGrid(voxel_size, dense, index_min)


def grid_from_dense(voxel_size: float, dense: np.ndarray, index_min) -> OccupancyGrid:
    """Construct a grid directly from a dense boolean volume (synthetic scenes)."""
    return OccupancyGrid(voxel_size, np.asarray(dense, dtype=np.uint8), index_min)


def is_occupied(grid: OccupancyGrid, p: LocalPoint) -> bool:
    """True iff p's voxel is occupied; points outside the bounds are free."""
    v = np.floor(np.array([p.east, p.north, p.up]) / grid.voxel_size).astype(np.int64)
    local = v - grid.index_min
    if np.any(local < 0) or np.any(local >= np.array(grid.dense.shape)):
        return False
    return bool(grid.dense[local[0], local[1], local[2]])
