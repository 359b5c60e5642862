"""CSV and SVG emission for feature tables and evaluation reports.

All writers are deterministic: fixed column orders, ``repr`` float
formatting, newline-terminated files.  The box plot is a standalone SVG with
no display dependency.
"""

from __future__ import annotations

import csv
import math
from xml.sax.saxutils import escape

import numpy as np

from .features import FEATURE_FIELDS


def _fmt(value) -> str:
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return repr(float(value))


def write_features_csv(rows, path):
    """One row per measurement point: ids, observed RSRP, features, error tags."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["session_id", "index", "rsrp_dbm", *FEATURE_FIELDS, "errors"])
        for row in rows:
            tags = ";".join(f"{k}:{v}" for k, v in sorted(row.errors.items()))
            w.writerow([row.session_id, row.index, _fmt(row.rsrp_dbm),
                        *[_fmt(row.features.get(f)) for f in FEATURE_FIELDS], tags])


def read_features_csv(path):
    """Inverse of write_features_csv, for pipeline stages run in separate processes."""
    from .features import FeatureRow, FeatureVector
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            fv = FeatureVector(**{f: float(rec[f]) for f in FEATURE_FIELDS})
            errors = {}
            if rec.get("errors"):
                for tag in rec["errors"].split(";"):
                    k, _, v = tag.partition(":")
                    errors[k] = v
            rows.append(FeatureRow(rec["session_id"], int(rec["index"]),
                                   float(rec["rsrp_dbm"]), fv, errors))
    return rows


def write_model_report_csv(report, path):
    """Table of per-model regression statistics."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "r2", "log_likelihood", "residual_mse", "error"])
        for row in report.model_rows:
            w.writerow([row["id"], _fmt(row["r2"]), _fmt(row["log_likelihood"]),
                        _fmt(row["residual_mse"]), row.get("error", "")])


def write_mae_report_csv(report, path):
    """Per-variant MAE summary with quartiles."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["variant", "mae_db", "q1", "median", "q3", "error"])
        for row in report.variant_rows:
            w.writerow([row["variant"], _fmt(row["mae_db"]), _fmt(row["q1"]),
                        _fmt(row["median"]), _fmt(row["q3"]), row.get("error", "")])


def write_positions_csv(points, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["session_id", "index", "east", "north", "up", "rsrp_dbm"])
        for p in points:
            w.writerow([p.session_id, p.index, _fmt(p.position.east),
                        _fmt(p.position.north), _fmt(p.position.up), _fmt(p.rsrp_dbm)])


def svg_boxplot(variant_rows, path, title="Prediction MAE by indoor-loss variant",
                width=640, height=400):
    """Standalone SVG box plot: one box per variant of absolute prediction error."""
    margin_l, margin_r, margin_t, margin_b = 60, 20, 40, 50
    plot_w = width - margin_l - margin_r
    plot_h = height - margin_t - margin_b
    usable = [r for r in variant_rows if not r.get("error")]
    if not usable:
        raise ValueError("no variant rows to plot")
    stats = []
    for r in usable:
        errs = np.asarray(r.get("abs_errors", [r["q1"], r["median"], r["q3"]]))
        stats.append({"variant": r["variant"], "q1": r["q1"], "median": r["median"],
                      "q3": r["q3"], "lo": float(errs.min()), "hi": float(errs.max()),
                      "mean": r["mae_db"]})
    y_max = max(s["hi"] for s in stats) * 1.05 or 1.0
    slot = plot_w / len(stats)
    box_w = slot * 0.5

    def y(v):
        return margin_t + plot_h * (1.0 - v / y_max)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{escape(title)}</text>',
        f'<line x1="{margin_l}" y1="{margin_t}" x2="{margin_l}" '
        f'y2="{margin_t + plot_h}" stroke="black"/>',
        f'<line x1="{margin_l}" y1="{margin_t + plot_h}" x2="{width - margin_r}" '
        f'y2="{margin_t + plot_h}" stroke="black"/>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        v = frac * y_max
        parts.append(f'<line x1="{margin_l - 4}" y1="{y(v):.1f}" x2="{margin_l}" '
                     f'y2="{y(v):.1f}" stroke="black"/>')
        parts.append(f'<text x="{margin_l - 8}" y="{y(v) + 4:.1f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="10">{v:.1f}</text>')
    parts.append(f'<text x="16" y="{margin_t + plot_h / 2:.1f}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12" '
                 f'transform="rotate(-90 16 {margin_t + plot_h / 2:.1f})">MAE [dB]</text>')
    for i, s in enumerate(stats):
        cx = margin_l + slot * (i + 0.5)
        x0 = cx - box_w / 2
        parts.append(f'<line x1="{cx:.1f}" y1="{y(s["lo"]):.1f}" x2="{cx:.1f}" '
                     f'y2="{y(s["hi"]):.1f}" stroke="black"/>')
        for whisk in ("lo", "hi"):
            parts.append(f'<line x1="{cx - box_w / 4:.1f}" y1="{y(s[whisk]):.1f}" '
                         f'x2="{cx + box_w / 4:.1f}" y2="{y(s[whisk]):.1f}" stroke="black"/>')
        parts.append(f'<rect class="box" x="{x0:.1f}" y="{y(s["q3"]):.1f}" '
                     f'width="{box_w:.1f}" height="{max(y(s["q1"]) - y(s["q3"]), 0.5):.1f}" '
                     f'fill="#9ecae1" stroke="black"/>')
        parts.append(f'<line x1="{x0:.1f}" y1="{y(s["median"]):.1f}" '
                     f'x2="{x0 + box_w:.1f}" y2="{y(s["median"]):.1f}" '
                     f'stroke="black" stroke-width="2"/>')
        parts.append(f'<text x="{cx:.1f}" y="{margin_t + plot_h + 16}" '
                     f'text-anchor="middle" font-family="sans-serif" '
                     f'font-size="11">{escape(s["variant"])}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
