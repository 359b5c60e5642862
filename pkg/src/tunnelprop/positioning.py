"""Reconstruction of indoor measurement positions.

Each surveyed run is a straight corridor segment with known endpoints and a
known number of equidistant stops; positions are linearly interpolated
between the converted endpoints, altitude included.  Curved runs must be
split into straight sessions by the caller.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DegenerateGeometryError, ParseError, ValidationError
from .geo import GeoPoint, LocalPoint, to_local

RSRP_MIN_DBM = -160.0
RSRP_MAX_DBM = -20.0


def average_rsrp_db(samples) -> float:
    """Mean of raw RSRP samples, taken in the dB domain."""
    samples = list(samples)
    if not samples:
        raise ValidationError("cannot average an empty RSRP sample list")
    return sum(samples) / len(samples)


@dataclass(frozen=True)
class MeasurementSession:
    """One straight corridor run: endpoints plus ordered per-stop observations."""

    session_id: str
    start: GeoPoint
    end: GeoPoint
    point_count: int
    observations: tuple[float, ...]
    aux: tuple[dict, ...] = ()

    def __post_init__(self):
        if self.point_count < 2:
            raise ValidationError(f"session {self.session_id}: point_count must be >= 2")
        if len(self.observations) != self.point_count:
            raise ValidationError(
                f"session {self.session_id}: declared {self.point_count} points "
                f"but has {len(self.observations)} observations")
        if self.start == self.end:
            raise ValidationError(f"session {self.session_id}: start equals end")


@dataclass(frozen=True)
class MeasurementPoint:
    position: LocalPoint
    rsrp_dbm: float
    session_id: str
    index: int

    def __post_init__(self):
        if not (RSRP_MIN_DBM <= self.rsrp_dbm <= RSRP_MAX_DBM):
            raise ValidationError(
                f"rsrp {self.rsrp_dbm} dBm outside plausible range "
                f"[{RSRP_MIN_DBM}, {RSRP_MAX_DBM}]")


def interpolate_positions(session: MeasurementSession, origin: GeoPoint) -> list[MeasurementPoint]:
    """Place the session's observations on equidistant stops along start->end."""
    a = to_local(session.start, origin)
    b = to_local(session.end, origin)
    if a.distance_to(b) == 0.0:
        raise DegenerateGeometryError(
            f"session {session.session_id}: zero-length segment in the local frame")
    n = session.point_count
    delta = ((b.east - a.east) / (n - 1), (b.north - a.north) / (n - 1),
             (b.up - a.up) / (n - 1))
    points = []
    for i in range(n):
        if i == 0:
            pos = a
        elif i == n - 1:
            pos = b  # endpoints exact, not re-derived through the step
        else:
            pos = LocalPoint(a.east + i * delta[0], a.north + i * delta[1], a.up + i * delta[2])
        points.append(MeasurementPoint(pos, session.observations[i], session.session_id, i))
    return points


def load_sessions(sessions_path, observations_path=None) -> list[MeasurementSession]:
    """Load sessions from CSV (two files) or JSON (single file)."""
    sessions_path = Path(sessions_path)
    if sessions_path.suffix.lower() == ".json":
        return _load_sessions_json(sessions_path)
    if observations_path is None:
        raise ValidationError("CSV sessions require an observations file")
    return _load_sessions_csv(sessions_path, Path(observations_path))


def total_point_count(sessions) -> int:
    return sum(s.point_count for s in sessions)


def _session_from_record(rec, observations):
    try:
        sid = str(rec["session_id"])
        start = GeoPoint(float(rec["start_lat"]), float(rec["start_lon"]), float(rec["start_alt"]))
        end = GeoPoint(float(rec["end_lat"]), float(rec["end_lon"]), float(rec["end_alt"]))
        count = int(rec["point_count"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed session record: {exc}") from exc
    obs = observations.get(sid, [])
    if len(obs) != count:
        raise ValidationError(
            f"session {sid}: declares {count} points but {len(obs)} observation rows")
    ordered = [None] * count
    for index, rsrp in obs:
        if not (0 <= index < count):
            raise ValidationError(f"session {sid}: observation index {index} out of range")
        ordered[index] = rsrp
    if any(v is None for v in ordered):
        raise ValidationError(f"session {sid}: duplicate or missing observation indices")
    return MeasurementSession(sid, start, end, count, tuple(ordered))


def _load_sessions_csv(sessions_path, observations_path):
    observations: dict[str, list] = {}
    with open(observations_path, newline="") as fh:
        for row in csv.DictReader(fh):
            try:
                observations.setdefault(str(row["session_id"]), []).append(
                    (int(row["index"]), float(row["rsrp_dbm"])))
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"malformed observation record: {exc}") from exc
    sessions = []
    with open(sessions_path, newline="") as fh:
        for row in csv.DictReader(fh):
            sessions.append(_session_from_record(row, observations))
    return sessions


def _load_sessions_json(path):
    with open(path) as fh:
        data = json.load(fh)
    sessions = []
    for rec in data["sessions"]:
        obs = {str(rec["session_id"]): [(i, float(v)) for i, v in enumerate(rec["rsrp_dbm"])]}
        flat = {k: v for k, v in rec.items() if k != "rsrp_dbm"}
        flat.setdefault("point_count", len(rec["rsrp_dbm"]))
        sessions.append(_session_from_record(flat, obs))
    return sessions


def save_sessions_csv(sessions, sessions_path, observations_path):
    """Write the CSV pair consumed by load_sessions."""
    with open(sessions_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["session_id", "start_lat", "start_lon", "start_alt",
                    "end_lat", "end_lon", "end_alt", "point_count"])
        for s in sessions:
            w.writerow([s.session_id,
                        repr(float(s.start.latitude)), repr(float(s.start.longitude)), repr(float(s.start.altitude)),
                        repr(float(s.end.latitude)), repr(float(s.end.longitude)), repr(float(s.end.altitude)),
                        s.point_count])
    with open(observations_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["session_id", "index", "rsrp_dbm"])
        for s in sessions:
            for i, rsrp in enumerate(s.observations):
                w.writerow([s.session_id, i, repr(float(rsrp))])
