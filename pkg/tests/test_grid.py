import numpy as np
import pytest

from tunnelprop.errors import InvalidParameterError
from tunnelprop.geo import LocalPoint, PointCloud
from tunnelprop.grid import build_occupancy, is_occupied


def cloud_of(points, resolution=0.01):
    return PointCloud(tuple(LocalPoint(*p) for p in points), resolution)


def test_single_point_single_voxel():
    grid = build_occupancy(cloud_of([(0.5, 0.5, 0.5)]), 1.0)
    assert grid.occupied_count() == 1
    assert is_occupied(grid, LocalPoint(0.5, 0.5, 0.5))


def test_two_points_same_voxel():
    grid = build_occupancy(cloud_of([(0.1, 0.1, 0.1), (0.9, 0.9, 0.9)]), 1.0)
    assert grid.occupied_count() == 1


def test_uniform_slab_voxel_counts():
    # 10x10x10 m cube sampled on a 0.1 m lattice, voxel 0.5 m -> 20^3 voxels.
    axis = np.arange(0.05, 10.0, 0.1)
    xx, yy, zz = np.meshgrid(axis[:25], axis[:25], axis[:25], indexing="ij")
    pts = np.column_stack([xx.ravel(), yy.ravel(), zz.ravel()])
    # keep runtime sane: 25 samples per axis cover 2.5 m -> 5 voxels per axis
    grid = build_occupancy(cloud_of(pts.tolist()), 0.5)
    # brute-force voxelization oracle
    expected = {tuple(v) for v in np.floor(pts / 0.5).astype(int)}
    assert grid.occupied_count() == len(expected) == 5 ** 3
    assert grid.occupied == frozenset(expected)


def test_occupancy_soundness_random_cloud():
    rng = np.random.default_rng(3)
    pts = rng.uniform(-4, 4, size=(500, 3))
    grid = build_occupancy(cloud_of(pts.tolist()), 0.25)
    expected = {tuple(v) for v in np.floor(pts / 0.25).astype(int)}
    assert grid.occupied == frozenset(expected)
    for p in pts[:50]:
        assert is_occupied(grid, LocalPoint(*p))


def test_point_far_outside_bounds_is_free():
    grid = build_occupancy(cloud_of([(0.5, 0.5, 0.5)]), 1.0)
    assert not is_occupied(grid, LocalPoint(1000.0, 0.0, 0.0))


def test_floor_convention_on_voxel_face():
    grid = build_occupancy(cloud_of([(0.5, 0.5, 0.5), (1.5, 0.5, 0.5)]), 1.0)
    # the face point x=1.0 belongs to voxel index 1, not 0
    assert grid.voxel_index(LocalPoint(1.0, 0.5, 0.5)) == (1, 0, 0)
    assert is_occupied(grid, LocalPoint(1.0, 0.5, 0.5))


def test_invalid_voxel_size():
    with pytest.raises(InvalidParameterError):
        build_occupancy(cloud_of([(0, 0, 0)]), 0.0)
    with pytest.raises(InvalidParameterError):
        build_occupancy(cloud_of([(0, 0, 0)], resolution=0.5), 0.25)


def test_determinism_bit_for_bit():
    rng = np.random.default_rng(9)
    pts = rng.uniform(-2, 2, size=(200, 3)).tolist()
    g1 = build_occupancy(cloud_of(pts), 0.25)
    g2 = build_occupancy(cloud_of(pts), 0.25)
    assert np.array_equal(g1.dense, g2.dense)
    assert np.array_equal(g1.index_min, g2.index_min)
