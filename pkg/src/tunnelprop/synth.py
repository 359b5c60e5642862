"""Deterministic synthetic tunnel scenes and measurement campaigns.

Scenes are axis-aligned box tunnels buried in a solid soil block under flat
terrain, so every geometric feature has a closed-form value; campaigns emit
RSRP from a declared truth model plus seeded Gaussian noise.  Both serve as
independent oracles for the geometry and statistics pipelines.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, InvalidParameterError
from .features import CorridorOpening, FeatureRow, FeatureVector, corridor_avg_distance
from .geo import GeoPoint, LocalPoint, PointCloud, to_geo, to_local
from .grid import OccupancyGrid, grid_from_dense
from .pathloss import (IndoorLossModel, TransmitterConfig, predict_rsrp,
                       predict_total_loss, tx_local_position)
from .positioning import MeasurementSession, interpolate_positions


@dataclass(frozen=True)
class SideCorridor:
    station: float  # metres along the main axis, at the corridor centreline
    width: float    # along-axis extent of the opening
    length: float   # lateral extent away from the main tunnel
    side: int = 1   # +1 opens east, -1 opens west

    def __post_init__(self):
        if self.width <= 0 or self.length <= 0:
            raise InvalidParameterError("corridor dimensions must be positive")
        if self.side not in (1, -1):
            raise InvalidParameterError("corridor side must be +1 or -1")


@dataclass(frozen=True)
class TunnelLayout:
    """Main tunnel due north from (east0, north0), buried under flat terrain."""

    east0: float
    north0: float
    axis_length: float
    width: float
    height: float
    burial_depth: float
    terrain_elevation: float = 0.0
    side_corridors: tuple[SideCorridor, ...] = ()
    lateral_margin: float = 8.0
    floor_slab: float = 1.0

    def __post_init__(self):
        if min(self.axis_length, self.width, self.height, self.burial_depth) <= 0:
            raise InvalidParameterError("layout dimensions must be positive")
        for c in self.side_corridors:
            if not (0.0 < c.station < self.axis_length):
                raise InvalidParameterError(
                    f"corridor station {c.station} outside the main axis")

    @property
    def ceiling_z(self) -> float:
        return self.terrain_elevation - self.burial_depth

    @property
    def floor_z(self) -> float:
        return self.ceiling_z - self.height

    @property
    def mid_z(self) -> float:
        return self.floor_z + self.height / 2.0

    def interior_boxes(self):
        """(lo, hi) corner pairs of all hollow (air) regions."""
        w2 = self.width / 2.0
        boxes = [(np.array([self.east0 - w2, self.north0, self.floor_z]),
                  np.array([self.east0 + w2, self.north0 + self.axis_length,
                            self.ceiling_z]))]
        for c in self.side_corridors:
            n_lo = self.north0 + c.station - c.width / 2.0
            n_hi = self.north0 + c.station + c.width / 2.0
            if c.side > 0:
                e_lo, e_hi = self.east0 + w2, self.east0 + w2 + c.length
            else:
                e_lo, e_hi = self.east0 - w2 - c.length, self.east0 - w2
            boxes.append((np.array([e_lo, n_lo, self.floor_z]),
                          np.array([e_hi, n_hi, self.ceiling_z])))
        return boxes

    def solid_box(self):
        """(lo, hi) of the soil block containing every hollow region."""
        boxes = self.interior_boxes()
        lo = np.min([b[0] for b in boxes], axis=0)
        hi = np.max([b[1] for b in boxes], axis=0)
        m = self.lateral_margin
        return (np.array([lo[0] - m, lo[1] - m, self.floor_z - self.floor_slab]),
                np.array([hi[0] + m, hi[1] + m, self.terrain_elevation]))

    def openings(self) -> list[CorridorOpening]:
        """Analytic corridor openings at their gap-edge points, mid-height."""
        w2 = self.width / 2.0
        out = []
        for k, c in enumerate(self.side_corridors):
            wall_e = self.east0 + c.side * w2
            samples = tuple(
                LocalPoint(wall_e, self.north0 + c.station + s * c.width / 2.0, self.mid_z)
                for s in (-1.0, 1.0))
            out.append(CorridorOpening(f"corridor_{k}", samples))
        return out

    def main_axis(self) -> tuple[LocalPoint, LocalPoint]:
        return (LocalPoint(self.east0, self.north0, self.mid_z),
                LocalPoint(self.east0, self.north0 + self.axis_length, self.mid_z))


def rasterize_solid(layout: TunnelLayout, voxel_size: float = 0.25) -> OccupancyGrid:
    """Voxelize the soil block minus hollow interiors by voxel-centre test."""
    if voxel_size <= 0:
        raise InvalidParameterError("voxel_size must be positive")
    lo, hi = layout.solid_box()
    idx_min = np.floor(lo / voxel_size).astype(np.int64)
    idx_max = np.ceil(hi / voxel_size).astype(np.int64)
    # pad open air above the terrain so above-ground receivers stay in bounds
    idx_max[2] += int(math.ceil(2.0 / voxel_size))
    shape = idx_max - idx_min
    axes = [(np.arange(idx_min[k], idx_max[k]) + 0.5) * voxel_size for k in range(3)]
    ce, cn, cu = np.meshgrid(*axes, indexing="ij", sparse=True)

    def inside(box):
        blo, bhi = box
        return ((ce > blo[0]) & (ce < bhi[0]) & (cn > blo[1]) & (cn < bhi[1])
                & (cu > blo[2]) & (cu < bhi[2]))

    solid = inside((lo, hi))
    for box in layout.interior_boxes():
        solid &= ~inside(box)
    assert solid.shape == tuple(shape)
    return grid_from_dense(voxel_size, solid, idx_min)


def _sample_rect(origin, u_vec, v_vec, len_u, len_v, spacing, rng):
    """Jittered near-uniform samples over a rectangle; density ~ 1/spacing^2."""
    nu = max(1, round(len_u / spacing))
    nv = max(1, round(len_v / spacing))
    su, sv = len_u / nu, len_v / nv
    iu, iv = np.meshgrid(np.arange(nu), np.arange(nv), indexing="ij")
    a = (iu.ravel() + 0.5) * su + rng.uniform(-spacing / 4, spacing / 4, iu.size)
    b = (iv.ravel() + 0.5) * sv + rng.uniform(-spacing / 4, spacing / 4, iv.size)
    origin = np.asarray(origin, dtype=float)
    u_vec = np.asarray(u_vec, dtype=float)
    v_vec = np.asarray(v_vec, dtype=float)
    return origin + a[:, None] * u_vec + b[:, None] * v_vec


def generate_cloud(layout: TunnelLayout, sample_spacing: float, seed: int) -> PointCloud:
    """Sample all solid surfaces (walls, ceiling, floor, terrain) of the scene."""
    if sample_spacing <= 0:
        raise InvalidParameterError("sample_spacing must be positive")
    rng = np.random.default_rng(seed)
    rects = []
    ex, ey, ez = np.eye(3)
    w2 = layout.width / 2.0
    e0, n0, L = layout.east0, layout.north0, layout.axis_length
    fz, cz, h = layout.floor_z, layout.ceiling_z, layout.height

    # Main tunnel floor, ceiling and end walls.
    rects.append(((e0 - w2, n0, fz), ex, ey, layout.width, L))
    rects.append(((e0 - w2, n0, cz), ex, ey, layout.width, L))
    rects.append(((e0 - w2, n0, fz), ex, ez, layout.width, h))
    rects.append(((e0 - w2, n0 + L, fz), ex, ez, layout.width, h))

    # Side walls, split around corridor openings.
    for side, wall_e in ((1, e0 + w2), (-1, e0 - w2)):
        cuts = sorted((c.station - c.width / 2.0, c.station + c.width / 2.0)
                      for c in layout.side_corridors if c.side == side)
        pos = 0.0
        for lo_s, hi_s in cuts:
            if lo_s > pos:
                rects.append(((wall_e, n0 + pos, fz), ey, ez, lo_s - pos, h))
            pos = hi_s
        if pos < L:
            rects.append(((wall_e, n0 + pos, fz), ey, ez, L - pos, h))

    # Corridor surfaces: floor, ceiling, flanking walls, end wall.
    for c in layout.side_corridors:
        n_lo = n0 + c.station - c.width / 2.0
        if c.side > 0:
            e_lo, e_hi = e0 + w2, e0 + w2 + c.length
        else:
            e_lo, e_hi = e0 - w2 - c.length, e0 - w2
        rects.append(((e_lo, n_lo, fz), ex, ey, c.length, c.width))
        rects.append(((e_lo, n_lo, cz), ex, ey, c.length, c.width))
        rects.append(((e_lo, n_lo, fz), ex, ez, c.length, h))
        rects.append(((e_lo, n_lo + c.width, fz), ex, ez, c.length, h))
        end_e = e_hi if c.side > 0 else e_lo
        rects.append(((end_e, n_lo, fz), ey, ez, c.width, h))

    # Terrain surface over the whole soil block.
    slo, shi = layout.solid_box()
    rects.append(((slo[0], slo[1], layout.terrain_elevation), ex, ey,
                  shi[0] - slo[0], shi[1] - slo[1]))

    pts = np.vstack([_sample_rect(o, u, v, lu, lv, sample_spacing, rng)
                     for o, u, v, lu, lv in rects])
    return PointCloud(tuple(LocalPoint(float(p[0]), float(p[1]), float(p[2])) for p in pts),
                      source_resolution=min(sample_spacing, 0.01))


def surface_area(layout: TunnelLayout) -> float:
    """Total sampled surface area; the analytic oracle for cloud point counts."""
    w, h, L = layout.width, layout.height, layout.axis_length
    area = 2 * w * L + 2 * w * h + 2 * h * L
    for c in layout.side_corridors:
        area -= h * c.width  # opening cut from the main side wall
        area += 2 * c.length * c.width + 2 * c.length * h + c.width * h
    slo, shi = layout.solid_box()
    area += (shi[0] - slo[0]) * (shi[1] - slo[1])
    return area


def _box_interval(box, p, u, t_max):
    """[t0, t1] of the ray p + t*u inside an axis-aligned box, clipped to [0, t_max]."""
    lo, hi = box
    t0, t1 = 0.0, t_max
    for k in range(3):
        if u[k] == 0.0:
            if not (lo[k] < p[k] < hi[k]):
                return None
            continue
        a = (lo[k] - p[k]) / u[k]
        b = (hi[k] - p[k]) / u[k]
        if a > b:
            a, b = b, a
        t0, t1 = max(t0, a), min(t1, b)
    return (t0, t1) if t0 < t1 else None


def _subtract_intervals(base, holes):
    """Set-difference of one interval minus a list of intervals."""
    segments = [base]
    for h in sorted(holes):
        nxt = []
        for a, b in segments:
            if h[1] <= a or h[0] >= b:
                nxt.append((a, b))
                continue
            if h[0] > a:
                nxt.append((a, h[0]))
            if h[1] < b:
                nxt.append((h[1], b))
        segments = nxt
    return segments


def solid_ray_intervals(layout: TunnelLayout, rx: LocalPoint, direction, t_max: float):
    """Closed-form solid segments along a ray from rx, for oracle comparison."""
    p = np.array([rx.east, rx.north, rx.up])
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    base = _box_interval(layout.solid_box(), p, u, t_max)
    if base is None:
        return []
    holes = []
    for box in layout.interior_boxes():
        iv = _box_interval(box, p, u, t_max)
        if iv is not None:
            holes.append(iv)
    return [s for s in _subtract_intervals(base, holes) if s[1] - s[0] > 1e-12]


def analytic_features(layout: TunnelLayout, rx: LocalPoint, tx: LocalPoint) -> FeatureVector:
    """Closed-form feature values for a receiver inside the synthetic scene."""
    d2d = rx.horizontal_distance_to(tx)
    d3d = rx.distance_to(tx)
    de, dn, du = tx.east - rx.east, tx.north - rx.north, tx.up - rx.up
    phi = math.degrees(math.atan2(de, dn)) % 360.0
    theta = math.degrees(math.atan2(du, d2d))

    def ray_stats(flatten):
        u = np.array([de, dn, 0.0 if flatten else du])
        u = u / np.linalg.norm(u)
        t_max = 2.0 * d3d
        solids = solid_ray_intervals(layout, rx, u, t_max)
        if not solids:
            return 0.0, 0.0
        d_in = solids[0][0]
        d_pen = sum(b - a for a, b in solids)
        return d_in, d_pen

    d_in_2d, d_pen_2d = ray_stats(True)
    d_in_3d, d_pen_3d = ray_stats(False)
    depth = max(0.0, layout.terrain_elevation - rx.up)
    ops = layout.openings()
    d_cor = corridor_avg_distance(rx, ops) if ops else math.nan
    return FeatureVector(d2d, d3d, phi, theta,
                         min(d_in_2d, d2d), min(d_in_3d, d3d),
                         d_pen_2d, d_pen_3d, depth, d_cor)


@dataclass(frozen=True)
class SynthCampaign:
    """Everything a pipeline run needs, plus the analytic ground truth."""

    origin: GeoPoint
    layout: TunnelLayout
    sessions: tuple[MeasurementSession, ...]
    truth_rows: tuple[FeatureRow, ...]
    tx_local: LocalPoint


TRUTH_MODELS = ("distance_only", "eq1_with_variant")


def generate_campaign(layout: TunnelLayout, cfg: TransmitterConfig,
                      truth: str = "eq1_with_variant", sigma: float = 0.0,
                      seed: int = 0, origin: GeoPoint | None = None,
                      point_spacing: float = 2.0, variant: str = "none",
                      slope_db_per_m: float = -0.05,
                      intercept_dbm: float = -60.0,
                      sessions: int = 1) -> SynthCampaign:
    """Emit sessions whose RSRP follows the chosen truth model plus noise."""
    if truth not in TRUTH_MODELS:
        raise ConfigurationError(f"unknown truth model {truth!r}")
    if origin is None:
        origin = GeoPoint(55.78, 12.52, 0.0)
    rng = np.random.default_rng(seed)
    tx_local = tx_local_position(cfg, origin)
    in_model = IndoorLossModel(variant)

    margin = 1.0
    usable = layout.axis_length - 2 * margin
    seg_len = usable / sessions
    all_sessions = []
    all_rows = []
    for s_idx in range(sessions):
        n_lo = layout.north0 + margin + s_idx * seg_len
        n_hi = n_lo + seg_len
        count = max(2, int(math.floor(seg_len / point_spacing)) + 1)
        start_l = LocalPoint(layout.east0, n_lo, layout.mid_z)
        end_l = LocalPoint(layout.east0, n_hi, layout.mid_z)
        positions = [LocalPoint(layout.east0,
                                n_lo + i * (n_hi - n_lo) / (count - 1),
                                layout.mid_z) for i in range(count)]
        rsrp = []
        fvs = []
        for pos in positions:
            fv = analytic_features(layout, pos, tx_local)
            fvs.append(fv)
            if truth == "distance_only":
                value = intercept_dbm + slope_db_per_m * fv.d3d
            else:
                comps = predict_total_loss(cfg, fv, in_model, clamp=True)
                value = predict_rsrp(cfg, comps)
            if sigma > 0:
                value += rng.normal(0.0, sigma)
            rsrp.append(float(value))
        sid = f"S{s_idx:03d}"
        all_sessions.append(MeasurementSession(
            sid, to_geo(start_l, origin), to_geo(end_l, origin), count, tuple(rsrp)))
        all_rows.extend(FeatureRow(sid, i, rsrp[i], fvs[i], {}) for i in range(count))
    return SynthCampaign(origin, layout, tuple(all_sessions), tuple(all_rows), tx_local)


def layout_to_dict(layout: TunnelLayout) -> dict:
    return {
        "east0": layout.east0, "north0": layout.north0,
        "axis_length": layout.axis_length, "width": layout.width,
        "height": layout.height, "burial_depth": layout.burial_depth,
        "terrain_elevation": layout.terrain_elevation,
        "lateral_margin": layout.lateral_margin, "floor_slab": layout.floor_slab,
        "side_corridors": [{"station": c.station, "width": c.width,
                            "length": c.length, "side": c.side}
                           for c in layout.side_corridors],
    }


def layout_from_dict(data: dict) -> TunnelLayout:
    corridors = tuple(SideCorridor(**c) for c in data.pop("side_corridors", []))
    return TunnelLayout(side_corridors=corridors, **data)


def save_layout(layout: TunnelLayout, path):
    with open(path, "w") as fh:
        json.dump(layout_to_dict(layout), fh, indent=2)
        fh.write("\n")


def load_layout(path) -> TunnelLayout:
    with open(path) as fh:
        return layout_from_dict(json.load(fh))
