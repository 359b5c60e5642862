import math

import numpy as np
import pytest

from tunnelprop.errors import DegenerateGeometryError, MissingAnnotationError
from tunnelprop.features import (CorridorOpening, angles_to_tx,
                                 corridor_avg_distance, detect_corridor_openings,
                                 extract_features, indoor_depth, indoor_distance,
                                 penetration_distance)
from tunnelprop.geo import LocalPoint
from tunnelprop.positioning import MeasurementPoint
from tunnelprop.synth import (SideCorridor, TunnelLayout, analytic_features,
                              rasterize_solid)

VOX = 0.25
O = LocalPoint(0, 0, 0)


def test_angles_due_north():
    phi, theta = angles_to_tx(O, LocalPoint(0, 100, 0))
    assert phi == 0.0 and theta == 0.0


def test_angles_east_up_symmetry():
    phi, theta = angles_to_tx(O, LocalPoint(100, 0, 100))
    assert phi == pytest.approx(90.0)
    assert theta == pytest.approx(45.0)


def test_angles_paper_geometry():
    # mast 30 m above ground, receiver 5 m underground at 200 m horizontal
    phi, theta = angles_to_tx(LocalPoint(0, 0, -5), LocalPoint(0, 200, 30))
    assert theta == pytest.approx(math.degrees(math.atan(35 / 200)), abs=1e-9)
    assert theta == pytest.approx(9.93, abs=0.01)


def test_angles_coincident_points():
    with pytest.raises(DegenerateGeometryError):
        angles_to_tx(O, O)


@pytest.fixture(scope="module")
def tunnel_scene():
    layout = TunnelLayout(east0=0.0, north0=0.0, axis_length=24.0, width=3.0,
                          height=2.0, burial_depth=3.0, terrain_elevation=0.0,
                          side_corridors=(SideCorridor(12.0, 2.0, 5.0, 1),))
    return layout, rasterize_solid(layout, VOX)


def test_indoor_distance_to_end_wall(tunnel_scene):
    layout, grid = tunnel_scene
    rx = LocalPoint(0.0, 20.0, layout.mid_z)
    tx = LocalPoint(0.0, 300.0, layout.mid_z)  # beyond the north end wall
    d = indoor_distance(rx, tx, grid, "3d")
    assert d == pytest.approx(4.0, abs=2 * VOX)


def test_indoor_distance_touching_wall(tunnel_scene):
    layout, grid = tunnel_scene
    rx = LocalPoint(-1.45, 10.0, layout.mid_z)
    tx = LocalPoint(-300.0, 10.0, layout.mid_z)
    assert indoor_distance(rx, tx, grid, "3d") <= VOX


def test_indoor_distance_2d_3d_same_altitude(tunnel_scene):
    layout, grid = tunnel_scene
    rx = LocalPoint(0.0, 5.0, layout.mid_z)
    tx = LocalPoint(200.0, 5.0, layout.mid_z)
    d2 = indoor_distance(rx, tx, grid, "2d")
    d3 = indoor_distance(rx, tx, grid, "3d")
    assert d2 == pytest.approx(d3, abs=2 * VOX)


def test_penetration_vertical_through_burial(tunnel_scene):
    layout, grid = tunnel_scene
    rx = LocalPoint(0.0, 5.0, layout.mid_z)
    tx = LocalPoint(0.0, 5.0, 50.0)
    d = penetration_distance(rx, tx, grid, "3d")
    assert d == pytest.approx(layout.burial_depth, abs=2 * VOX)


def test_penetration_inclined_slab():
    layout = TunnelLayout(east0=0.0, north0=0.0, axis_length=24.0, width=3.0,
                          height=2.0, burial_depth=1.5, terrain_elevation=0.0,
                          lateral_margin=30.0)
    grid = rasterize_solid(layout, VOX)
    rx = LocalPoint(0.0, 12.0, layout.ceiling_z - 0.2)
    theta = math.radians(40.0)
    tx = LocalPoint(0.0, 12.0 + 60.0 * math.cos(theta), rx.up + 60.0 * math.sin(theta))
    d = penetration_distance(rx, tx, grid, "3d")
    assert d == pytest.approx(layout.burial_depth / math.sin(theta), abs=2 * VOX)


def test_penetration_zero_above_ground(tunnel_scene):
    layout, grid = tunnel_scene
    rx = LocalPoint(0.0, 10.0, 0.5)  # above the terrain surface, inside bounds?
    # place rx just above terrain but still within grid bounds
    lo, hi = grid.bounds
    if rx.up >= hi[2]:
        rx = LocalPoint(0.0, 10.0, hi[2] - 1e-6)
    tx = LocalPoint(0.0, 10.0, 60.0)
    assert penetration_distance(rx, tx, grid, "3d") == 0.0


def test_indoor_depth_six_metres():
    layout = TunnelLayout(east0=0.0, north0=0.0, axis_length=20.0, width=3.0,
                          height=2.0, burial_depth=4.0, terrain_elevation=0.0)
    grid = rasterize_solid(layout, VOX)
    rx = LocalPoint(0.0, 10.0, -6.0)
    if rx.up < layout.floor_z:
        rx = LocalPoint(0.0, 10.0, layout.floor_z + 0.1)
    d = indoor_depth(rx, grid)
    assert d == pytest.approx(-rx.up, abs=2 * VOX)


def test_indoor_depth_equal_under_flat_terrain(tunnel_scene):
    layout, grid = tunnel_scene
    a = indoor_depth(LocalPoint(0.0, 5.0, layout.mid_z), grid)
    b = indoor_depth(LocalPoint(0.5, 18.0, layout.mid_z), grid)
    assert a == pytest.approx(b, abs=2 * VOX)


def test_corridor_avg_centroid_of_square():
    samples = [LocalPoint(1, 1, 0), LocalPoint(1, -1, 0),
               LocalPoint(-1, 1, 0), LocalPoint(-1, -1, 0)]
    op = CorridorOpening("sq", tuple(samples))
    assert corridor_avg_distance(O, [op]) == pytest.approx(math.sqrt(2.0), abs=1e-12)


def test_corridor_avg_constant_distance():
    samples = [LocalPoint(5, 0, 0), LocalPoint(0, 5, 0), LocalPoint(0, 0, 5)]
    op = CorridorOpening("c", tuple(samples))
    assert corridor_avg_distance(O, [op]) == pytest.approx(5.0)


def test_corridor_avg_brute_force_equivalence():
    rng = np.random.default_rng(21)
    for _ in range(300):
        openings = []
        for k in range(rng.integers(1, 6)):
            n = int(rng.integers(2, 8))
            pts = tuple(LocalPoint(*p) for p in rng.uniform(-50, 50, (n, 3)))
            openings.append(CorridorOpening(f"o{k}", pts))
        rx = LocalPoint(*rng.uniform(-50, 50, 3))
        got = corridor_avg_distance(rx, openings)
        best = min(openings, key=lambda op: min(rx.distance_to(p)
                                                for p in op.boundary_samples))
        want = sum(rx.distance_to(p) for p in best.boundary_samples) / len(best.boundary_samples)
        assert got == pytest.approx(want, abs=1e-9)


def test_corridor_avg_requires_openings():
    with pytest.raises(MissingAnnotationError):
        corridor_avg_distance(O, [])


def test_detect_single_opening(tunnel_scene):
    layout, grid = tunnel_scene
    ops = detect_corridor_openings(grid, layout.main_axis(), VOX / 2)
    assert len(ops) == 1
    a, b = ops[0].boundary_samples
    assert a.distance_to(b) == pytest.approx(2.0, abs=2 * VOX)
    mid_n = (a.north + b.north) / 2
    assert mid_n == pytest.approx(12.0, abs=2 * VOX)


def test_detect_no_corridors():
    layout = TunnelLayout(east0=0.0, north0=0.0, axis_length=20.0, width=3.0,
                          height=2.0, burial_depth=2.0)
    grid = rasterize_solid(layout, VOX)
    assert detect_corridor_openings(grid, layout.main_axis(), VOX / 2) == []


def test_detect_two_openings_twenty_metres_apart():
    layout = TunnelLayout(east0=0.0, north0=0.0, axis_length=50.0, width=3.0,
                          height=2.0, burial_depth=2.0,
                          side_corridors=(SideCorridor(15.0, 2.0, 5.0, 1),
                                          SideCorridor(35.0, 2.0, 5.0, 1)))
    grid = rasterize_solid(layout, VOX)
    ops = detect_corridor_openings(grid, layout.main_axis(), VOX / 2)
    assert len(ops) == 2
    c0, c1 = (op.centroid() for op in ops)
    assert c0.distance_to(c1) == pytest.approx(20.0, abs=2 * VOX)


def test_extract_features_batch(tunnel_scene):
    layout, grid = tunnel_scene
    tx = LocalPoint(-100.0, 200.0, 30.0)
    pts = [MeasurementPoint(LocalPoint(0.0, 2.0 + 2 * i, layout.mid_z), -85.0, "s", i)
           for i in range(10)]
    rows = extract_features(pts, tx, grid, layout.openings())
    assert len(rows) == 10
    for row in rows:
        fv = row.features
        assert fv.d3d >= fv.d2d >= 0
        assert fv.d3d ** 2 == pytest.approx(fv.d2d ** 2 + (tx.up - layout.mid_z) ** 2,
                                            rel=1e-6)
        assert fv.d_in_3d <= fv.d3d
        assert fv.d_pen_3d <= fv.d3d
        assert not row.errors


def test_extract_matches_analytic(tunnel_scene):
    layout, grid = tunnel_scene
    tx = LocalPoint(-100.0, 200.0, 30.0)
    pts = [MeasurementPoint(LocalPoint(0.0, 4.0 + 3 * i, layout.mid_z), -85.0, "s", i)
           for i in range(6)]
    rows = extract_features(pts, tx, grid, layout.openings())
    for row, pt in zip(rows, pts):
        truth = analytic_features(layout, pt.position, tx)
        for name in ("d_in_2d", "d_in_3d", "d_pen_2d", "d_pen_3d", "depth"):
            assert row.features.get(name) == pytest.approx(
                truth.get(name), abs=2 * VOX), name


def test_extract_overhead_transmitter(tunnel_scene):
    layout, grid = tunnel_scene
    rx = LocalPoint(0.0, 10.0, layout.mid_z)
    tx = LocalPoint(0.0, 10.0, 30.0)
    pts = [MeasurementPoint(rx, -85.0, "s", 0)]
    rows = extract_features(pts, tx, grid, layout.openings())
    assert rows[0].features.d2d == 0.0
    assert rows[0].features.elevation_theta == pytest.approx(90.0)


def test_extract_deterministic(tunnel_scene):
    layout, grid = tunnel_scene
    tx = LocalPoint(-50.0, 100.0, 30.0)
    pts = [MeasurementPoint(LocalPoint(0.0, 3.0 + i, layout.mid_z), -85.0, "s", i)
           for i in range(5)]
    r1 = extract_features(pts, tx, grid, layout.openings())
    r2 = extract_features(pts, tx, grid, layout.openings())
    for a, b in zip(r1, r2):
        assert a.features == b.features
