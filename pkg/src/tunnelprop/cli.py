"""Command-line pipeline: ingest -> positions -> features -> evaluate, plus synth.

The local frame origin is the transmitter site position from the tx config,
so every stage sharing a tx config shares one frame.  Exit codes: 0 success,
2 missing input, 3 validation failure, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import features as feats
from . import pathloss, positioning, report, stats, synth
from .errors import (ConfigurationError, EmptyInputError, ModelValidityError,
                     ParseError, TunnelPropError, ValidationError)
from .geo import load_point_cloud
from .grid import build_occupancy

EXIT_OK = 0
EXIT_MISSING_INPUT = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4


def _require(path, what):
    if path is None:
        raise ConfigurationError(f"missing required {what}")
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"{what} not found: {p}")
    return p


def _load_common(args):
    cfg = pathloss.load_tx_config(_require(args.tx_config, "tx config"))
    origin = cfg.position
    sessions = positioning.load_sessions(
        _require(args.sessions, "sessions file"),
        _require(args.observations, "observations file") if args.observations else None)
    if not sessions:
        raise EmptyInputError("sessions file contains no sessions")
    return cfg, origin, sessions


def _points(sessions, origin):
    out = []
    for s in sessions:
        out.extend(positioning.interpolate_positions(s, origin))
    return out


def cmd_ingest(args):
    cfg, origin, sessions = _load_common(args)
    cloud = load_point_cloud(_require(args.cloud, "point cloud"), origin=origin)
    grid = build_occupancy(cloud, args.voxel_size)
    lo, hi = grid.bounds
    print(f"cloud: {len(cloud)} points, {grid.occupied_count()} occupied voxels "
          f"at {grid.voxel_size} m")
    print(f"bounds: east [{lo[0]:.2f}, {hi[0]:.2f}] north [{lo[1]:.2f}, {hi[1]:.2f}] "
          f"up [{lo[2]:.2f}, {hi[2]:.2f}] m")
    print(f"sessions: {len(sessions)}, measurement points: "
          f"{positioning.total_point_count(sessions)}")
    return EXIT_OK


def cmd_positions(args):
    _, origin, sessions = _load_common(args)
    points = _points(sessions, origin)
    out = Path(args.out) / "positions.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    report.write_positions_csv(points, out)
    print(f"wrote {len(points)} positions to {out}")
    return EXIT_OK


def cmd_features(args):
    cfg, origin, sessions = _load_common(args)
    cloud = load_point_cloud(_require(args.cloud, "point cloud"), origin=origin)
    grid = build_occupancy(cloud, args.voxel_size)
    openings = feats.load_openings(_require(args.openings, "openings annotation")) \
        if args.openings else []
    tx_local = pathloss.tx_local_position(cfg, origin)
    points = _points(sessions, origin)
    rows = feats.extract_features(points, tx_local, grid, openings)
    out = Path(args.out) / "features.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    report.write_features_csv(rows, out)
    failed = sum(1 for r in rows if r.errors)
    print(f"wrote {len(rows)} feature rows to {out} ({failed} with per-point errors)")
    return EXIT_OK


def cmd_evaluate(args):
    cfg = pathloss.load_tx_config(_require(args.tx_config, "tx config"))
    rows = report.read_features_csv(_require(args.features, "features CSV"))
    if not rows:
        raise EmptyInputError("features CSV contains no rows")
    model_report = stats.compare_models(stats.BUILTIN_MODELS, rows,
                                        mse_convention=args.mse_convention)
    variants = [pathloss.VARIANT_ALIASES[v] for v in
                ("none", "din2d", "din3d", "dpen2d", "dpen3d")]
    mae_report = stats.mae_by_variant(cfg, rows, variants=variants)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report.write_model_report_csv(model_report, out / "model_report.csv")
    report.write_mae_report_csv(mae_report, out / "mae_report.csv")
    report.svg_boxplot(mae_report.variant_rows, out / "mae_boxplot.svg")
    for row in model_report.model_rows:
        flag = f"  [{row['error']}]" if row["error"] else ""
        print(f"{row['id']}: r2={row['r2']:.4f} ll={row['log_likelihood']:.1f} "
              f"mse={row['residual_mse']:.3f}{flag}")
    for row in mae_report.variant_rows:
        print(f"{row['variant']}: mae={row['mae_db']:.3f} dB")
    print(f"reports written to {out}")
    return EXIT_OK


def cmd_synth(args):
    layout = synth.load_layout(_require(args.layout, "layout JSON")) \
        if args.layout else _default_layout()
    cfg = pathloss.load_tx_config(_require(args.tx_config, "tx config")) \
        if args.tx_config else _default_tx()
    campaign = synth.generate_campaign(
        layout, cfg, truth=args.truth, sigma=args.sigma, seed=args.seed,
        origin=cfg.position, variant=args.truth_variant, sessions=args.n_sessions)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cloud = synth.generate_cloud(layout, args.sample_spacing, args.seed)
    save_cloud_xyz(cloud, out / "cloud.xyz")
    positioning.save_sessions_csv(campaign.sessions, out / "sessions.csv",
                                  out / "observations.csv")
    feats.save_openings(layout.openings(), out / "openings.json")
    pathloss.save_tx_config(cfg, out / "tx_config.json")
    synth.save_layout(layout, out / "layout.json")
    report.write_features_csv(campaign.truth_rows, out / "truth_features.csv")
    print(f"synthetic campaign: {len(campaign.sessions)} sessions, "
          f"{sum(s.point_count for s in campaign.sessions)} points, "
          f"{len(cloud)} cloud points -> {out}")
    return EXIT_OK


def save_cloud_xyz(cloud, path):
    with open(path, "w") as fh:
        fh.write("# synthetic tunnel scene, local frame, metres\n")
        for p in cloud.points:
            fh.write(f"{p.east!r} {p.north!r} {p.up!r}\n")


def _default_layout():
    return synth.TunnelLayout(
        east0=-140.0, north0=-290.0, axis_length=60.0, width=3.0, height=2.5,
        burial_depth=3.0, terrain_elevation=0.0,
        side_corridors=(synth.SideCorridor(20.0, 2.0, 6.0, side=1),
                        synth.SideCorridor(42.0, 2.0, 6.0, side=1)))


def _default_tx():
    from .geo import GeoPoint
    return pathloss.TransmitterConfig(position=GeoPoint(55.78, 12.52, 0.0))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tunnelprop",
        description="Deep-indoor propagation feature and path-loss pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, cloud=False, openings=False, features=False):
        p.add_argument("--tx-config", help="transmitter config TOML/JSON")
        p.add_argument("--sessions", help="sessions CSV/JSON")
        p.add_argument("--observations", help="observations CSV (with CSV sessions)")
        p.add_argument("--voxel-size", type=float, default=0.25)
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=0)
        if cloud:
            p.add_argument("--cloud", help="point cloud file (xyz-ascii)")
        if openings:
            p.add_argument("--openings", help="corridor openings JSON")
        if features:
            p.add_argument("--features", help="features CSV from the features stage")

    common(sub.add_parser("ingest", help="load inputs and print a summary"), cloud=True)
    common(sub.add_parser("positions", help="interpolate measurement positions"))
    common(sub.add_parser("features", help="compute engineered features"),
           cloud=True, openings=True)

    p_eval = sub.add_parser("evaluate", help="regression table and MAE-by-variant report")
    common(p_eval, features=True)
    p_eval.add_argument("--in-model", default="none",
                        choices=sorted(pathloss.VARIANT_ALIASES),
                        help="indoor-loss variant for single-model prediction")
    p_eval.add_argument("--mse-convention", default="df", choices=("df", "ml"))

    p_synth = sub.add_parser("synth", help="generate a synthetic campaign")
    common(p_synth)
    p_synth.add_argument("--layout", help="tunnel layout JSON (default: built-in)")
    p_synth.add_argument("--truth", default="eq1_with_variant",
                         choices=synth.TRUTH_MODELS)
    p_synth.add_argument("--truth-variant", default="none",
                         choices=pathloss.INDOOR_VARIANTS)
    p_synth.add_argument("--sigma", type=float, default=0.0)
    p_synth.add_argument("--sample-spacing", type=float, default=0.1)
    p_synth.add_argument("--n-sessions", type=int, default=2)
    return parser


_COMMANDS = {"ingest": cmd_ingest, "positions": cmd_positions,
             "features": cmd_features, "evaluate": cmd_evaluate, "synth": cmd_synth}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_INPUT
    except (ValidationError, EmptyInputError, ParseError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (TunnelPropError, ModelValidityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
