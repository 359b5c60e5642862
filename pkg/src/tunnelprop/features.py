"""Engineered propagation features for deep-indoor measurement points.

For each point: transmitter distances and bearing/elevation angles, the
indoor distance to the first tunnel boundary toward the transmitter, the
penetration distance through solid ground up to the terrain exit point, the
vertical indoor depth, and the average distance to the nearest corridor
opening.  Ray-based features exist in 2D (azimuth only) and 3D variants.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields as dataclass_fields

import numpy as np

from .errors import (DegenerateGeometryError, MissingAnnotationError, NoBoundaryError,
                     OutOfBoundsError, TunnelPropError)
from .geo import LocalPoint
from .grid import OccupancyGrid
from .rays import FREE_TO_SOLID, ray_march, solid_length, unit_direction

FEATURE_FIELDS = ("d2d", "d3d", "azimuth_phi", "elevation_theta",
                  "d_in_2d", "d_in_3d", "d_pen_2d", "d_pen_3d",
                  "depth", "d_cor_avg")


@dataclass(frozen=True)
class FeatureVector:
    """All engineered regressors for one measurement point; NaN marks failures."""

    d2d: float
    d3d: float
    azimuth_phi: float
    elevation_theta: float
    d_in_2d: float
    d_in_3d: float
    d_pen_2d: float
    d_pen_3d: float
    depth: float
    d_cor_avg: float

    def get(self, name: str) -> float:
        if name not in FEATURE_FIELDS:
            raise KeyError(name)
        return getattr(self, name)


@dataclass(frozen=True)
class CorridorOpening:
    """Boundary samples outlining where a side corridor meets the main tunnel."""

    opening_id: str
    boundary_samples: tuple[LocalPoint, ...]

    def __post_init__(self):
        if len(self.boundary_samples) < 2:
            raise MissingAnnotationError(
                f"opening {self.opening_id}: needs >= 2 boundary samples")

    def centroid(self) -> LocalPoint:
        e = sum(p.east for p in self.boundary_samples) / len(self.boundary_samples)
        n = sum(p.north for p in self.boundary_samples) / len(self.boundary_samples)
        u = sum(p.up for p in self.boundary_samples) / len(self.boundary_samples)
        return LocalPoint(e, n, u)


@dataclass(frozen=True)
class FeatureRow:
    """extract_features output: the vector plus per-feature error tags."""

    session_id: str
    index: int
    rsrp_dbm: float
    features: FeatureVector
    errors: dict


def angles_to_tx(rx: LocalPoint, tx: LocalPoint) -> tuple[float, float]:
    """(azimuth deg clockwise from north in [0, 360), elevation deg in [-90, 90])."""
    de, dn, du = tx.east - rx.east, tx.north - rx.north, tx.up - rx.up
    if de == 0.0 and dn == 0.0 and du == 0.0:
        raise DegenerateGeometryError("receiver and transmitter coincide")
    phi = math.degrees(math.atan2(de, dn)) % 360.0
    theta = math.degrees(math.atan2(du, math.hypot(de, dn)))
    return phi, theta


def _ray_to_tx(grid, rx, tx, mode, step, max_range):
    if mode not in ("2d", "3d"):
        raise TunnelPropError(f"mode must be '2d' or '3d', got {mode!r}")
    direction = unit_direction(rx, tx, flatten=(mode == "2d"))
    if step is None:
        step = grid.voxel_size / 2.0
    if max_range is None:
        max_range = 2.0 * rx.distance_to(tx)
    return ray_march(grid, rx, direction, step, max_range), step


def indoor_distance(rx: LocalPoint, tx: LocalPoint, grid: OccupancyGrid,
                    mode: str = "3d", step: float | None = None,
                    max_range: float | None = None) -> float:
    """Ray length from rx to the first tunnel boundary toward the transmitter."""
    trace, _ = _ray_to_tx(grid, rx, tx, mode, step, max_range)
    if not trace.crossings and trace.terrain_exit is None:
        return 0.0  # receiver voxel itself is solid: touching the wall
    if trace.crossings and trace.crossings[0][1] != FREE_TO_SOLID:
        return 0.0
    for dist, kind in trace.crossings:
        if kind == FREE_TO_SOLID:
            cap = rx.horizontal_distance_to(tx) if mode == "2d" else rx.distance_to(tx)
            return min(dist, cap)
    raise NoBoundaryError("no tunnel boundary found toward the transmitter")


def penetration_distance(rx: LocalPoint, tx: LocalPoint, grid: OccupancyGrid,
                         mode: str = "3d", step: float | None = None,
                         max_range: float | None = None) -> float:
    """Total ray length inside solid between rx and the terrain exit point."""
    trace, used_step = _ray_to_tx(grid, rx, tx, mode, step, max_range)
    if trace.terrain_exit == 0.0:
        return 0.0  # never enters solid
    if trace.terrain_exit is None:
        raise NoBoundaryError("ray ends inside solid; no terrain exit within range")
    return solid_length(trace, used_step, upto=trace.terrain_exit)


def indoor_depth(rx: LocalPoint, grid: OccupancyGrid, step: float | None = None,
                 max_range: float | None = None) -> float:
    """Vertical distance from rx up to the terrain surface; 0 at or above it."""
    if step is None:
        step = grid.voxel_size / 2.0
    if max_range is None:
        lo, hi = grid.bounds
        max_range = float(hi[2] - rx.up) + 2.0 * grid.voxel_size
        if max_range <= 0:
            return 0.0
    trace = ray_march(grid, rx, (0.0, 0.0, 1.0), step, max_range)
    if trace.terrain_exit is None:
        raise NoBoundaryError("no open sky found above the receiver within range")
    return trace.terrain_exit


def corridor_avg_distance(rx: LocalPoint, openings) -> float:
    """Mean distance to the boundary samples of the nearest corridor opening."""
    openings = list(openings)
    if not openings:
        raise MissingAnnotationError("no corridor openings supplied")
    best = None
    best_min = math.inf
    for op in openings:
        dmin = min(rx.distance_to(p) for p in op.boundary_samples)
        if dmin < best_min:
            best_min = dmin
            best = op
    return sum(rx.distance_to(p) for p in best.boundary_samples) / len(best.boundary_samples)


def detect_corridor_openings(grid: OccupancyGrid, main_axis, scan_spacing: float,
                             gap_threshold: float = 1.0,
                             probe_range: float = 50.0) -> list[CorridorOpening]:
    """Scan cross-sections along the main tunnel axis for lateral wall gaps.

    At every station a lateral probe ray measures the distance to the wall on
    each side; stations whose wall distance jumps well past the per-side
    median are grouped into contiguous gaps, and gaps wider than
    ``gap_threshold`` become openings with boundary samples at the gap edges.
    """
    p0, p1 = main_axis
    if not (grid.contains(p0) and grid.contains(p1)):
        raise OutOfBoundsError("main axis endpoints must lie inside the grid bounds")
    axis = np.array([p1.east - p0.east, p1.north - p0.north, 0.0])
    length = np.linalg.norm(axis)
    if length == 0:
        raise DegenerateGeometryError("main axis has zero horizontal length")
    u = axis / length
    step = grid.voxel_size / 2.0
    stations = np.arange(0.0, length + scan_spacing / 2.0, scan_spacing)
    openings = []
    for side in (1.0, -1.0):
        v = (side * u[1], -side * u[0], 0.0)
        dists = []
        for s in stations:
            c = LocalPoint(p0.east + u[0] * s, p0.north + u[1] * s, p0.up)
            try:
                trace = ray_march(grid, c, v, step, probe_range)
            except OutOfBoundsError:
                dists.append(math.inf)
                continue
            wall = next((d for d, kind in trace.crossings if kind == FREE_TO_SOLID), math.inf)
            dists.append(wall)
        finite = [d for d in dists if math.isfinite(d)]
        if not finite:
            continue
        baseline = float(np.median(finite))
        margin = max(2.0 * grid.voxel_size, 0.5)
        is_open = [d > baseline + margin for d in dists]
        openings.extend(_gaps_to_openings(is_open, stations, p0, u, v, baseline,
                                          gap_threshold, side))
    return openings


def _gaps_to_openings(is_open, stations, p0, u, v, baseline, gap_threshold, side):
    spacing = stations[1] - stations[0] if len(stations) > 1 else 0.0
    out = []
    run_start = None
    runs = []
    for i, flag in enumerate(is_open):
        if flag and run_start is None:
            run_start = i
        elif not flag and run_start is not None:
            runs.append((run_start, i - 1))
            run_start = None
    if run_start is not None:
        runs.append((run_start, len(is_open) - 1))
    label = "east" if side > 0 else "west"
    k = 0
    for a, b in runs:
        s_lo = stations[a] - spacing / 2.0
        s_hi = stations[b] + spacing / 2.0
        if s_hi - s_lo < gap_threshold:
            continue
        samples = []
        for s_edge in (s_lo, s_hi):
            samples.append(LocalPoint(
                p0.east + u[0] * s_edge + v[0] * baseline,
                p0.north + u[1] * s_edge + v[1] * baseline,
                p0.up))
        out.append(CorridorOpening(f"{label}_{k}", tuple(samples)))
        k += 1
    return out


def extract_features(points, tx_position: LocalPoint, grid: OccupancyGrid,
                     openings, step: float | None = None,
                     max_range: float | None = None) -> list[FeatureRow]:
    """One FeatureVector per measurement point; per-point failures are tagged.

    Geometry errors never abort the batch: the affected feature is NaN and
    the error message is recorded under the feature's name.
    """
    rows = []
    openings = list(openings) if openings is not None else []
    for pt in points:
        rx = pt.position
        values = {}
        errors = {}
        values["d2d"] = rx.horizontal_distance_to(tx_position)
        values["d3d"] = rx.distance_to(tx_position)
        try:
            values["azimuth_phi"], values["elevation_theta"] = angles_to_tx(rx, tx_position)
        except TunnelPropError as exc:
            values["azimuth_phi"] = values["elevation_theta"] = math.nan
            errors["azimuth_phi"] = errors["elevation_theta"] = str(exc)

        ray_features = {
            "d_in_2d": lambda: indoor_distance(rx, tx_position, grid, "2d", step, max_range),
            "d_in_3d": lambda: indoor_distance(rx, tx_position, grid, "3d", step, max_range),
            "d_pen_2d": lambda: penetration_distance(rx, tx_position, grid, "2d", step, max_range),
            "d_pen_3d": lambda: penetration_distance(rx, tx_position, grid, "3d", step, max_range),
            "depth": lambda: indoor_depth(rx, grid, step),
        }
        for name, compute in ray_features.items():
            try:
                values[name] = compute()
            except TunnelPropError as exc:
                values[name] = math.nan
                errors[name] = str(exc)
        try:
            values["d_cor_avg"] = corridor_avg_distance(rx, openings)
        except TunnelPropError as exc:
            values["d_cor_avg"] = math.nan
            errors["d_cor_avg"] = str(exc)
        rows.append(FeatureRow(pt.session_id, pt.index, pt.rsrp_dbm,
                               FeatureVector(**values), errors))
    return rows


def load_openings(path) -> list[CorridorOpening]:
    """Read the openings annotation JSON."""
    with open(path) as fh:
        data = json.load(fh)
    openings = []
    for rec in data:
        samples = tuple(LocalPoint(e, n, up) for e, n, up in rec["boundary_samples"])
        openings.append(CorridorOpening(str(rec["opening_id"]), samples))
    return openings


def save_openings(openings, path):
    data = [{"opening_id": op.opening_id,
             "boundary_samples": [[p.east, p.north, p.up] for p in op.boundary_samples]}
            for op in openings]
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


def feature_matrix(rows, names) -> np.ndarray:
    """Stack selected feature columns from FeatureRows into an (n, k) array."""
    for name in names:
        if name not in FEATURE_FIELDS:
            raise KeyError(f"unknown feature {name!r}")
    return np.array([[row.features.get(name) for name in names] for row in rows])
