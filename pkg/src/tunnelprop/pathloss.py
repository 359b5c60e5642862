"""Outdoor-to-indoor path-loss decomposition and the campaign link budget.

Total deterministic loss = basic outdoor loss (3GPP TR 38.901 UMa closed
form) + building penetration loss (low/high-loss material composition) +
indoor loss (0.5 dB per metre of the selected indoor feature).  Shadowing is
a separate, explicitly sampled zero-mean normal term in the dB domain and
never enters the deterministic prediction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import speed_of_light

from .errors import (FeatureMissingError, InvalidInputError, InvalidParameterError,
                     ModelValidityError)
from .geo import GeoPoint, LocalPoint, to_local

N_SUBCARRIERS = 12  # 180 kHz carrier, 15 kHz spacing

INDOOR_VARIANTS = ("none", "d_in_2d", "d_in_3d", "d_pen_2d", "d_pen_3d")

# CLI spellings for the indoor-loss variants
VARIANT_ALIASES = {"none": "none", "din2d": "d_in_2d", "din3d": "d_in_3d",
                   "dpen2d": "d_pen_2d", "dpen3d": "d_pen_3d"}

_UMA_D2D_MIN = 10.0
_UMA_D2D_MAX = 5000.0
_UMA_ENV_HEIGHT = 1.0  # effective environment height for the breakpoint


@dataclass(frozen=True)
class TransmitterConfig:
    """Transmitter site and link-budget parameters."""

    position: GeoPoint
    height_above_ground: float = 30.0
    frequency_hz: float = 820.5e6
    bandwidth_hz: float = 180e3
    tx_power_dbm: float = 46.0
    tx_gain_dbi: float = 5.0
    rx_gain_dbi: float = 5.8
    noise_figure_tx_db: float = 5.0
    noise_figure_rx_db: float = 3.0

    def __post_init__(self):
        if not (0.5e9 <= self.frequency_hz <= 100e9):
            raise InvalidInputError("frequency outside model validity [0.5, 100] GHz")
        if not math.isfinite(self.tx_power_dbm):
            raise InvalidInputError("tx_power_dbm must be finite")

    @property
    def frequency_ghz(self) -> float:
        return self.frequency_hz / 1e9


@dataclass(frozen=True)
class PathLossComponents:
    """The three deterministic loss terms; shadowing sigma carried alongside."""

    pl_b_db: float
    pl_tw_db: float
    pl_in_db: float
    sigma_p_db: float

    @property
    def total_db(self) -> float:
        return self.pl_b_db + self.pl_tw_db + self.pl_in_db


@dataclass(frozen=True)
class IndoorLossModel:
    """Which indoor feature, if any, feeds the per-metre indoor loss term."""

    variant: str = "none"

    def __post_init__(self):
        if self.variant not in INDOOR_VARIANTS:
            raise InvalidParameterError(
                f"variant must be one of {INDOOR_VARIANTS}, got {self.variant!r}")


def pl_in(d: float) -> float:
    """Indoor loss in dB: half a dB per metre of indoor distance."""
    if d < 0:
        raise InvalidInputError(f"indoor distance must be >= 0, got {d}")
    return 0.5 * d


def pl_basic(cfg: TransmitterConfig, d3d: float, rx_height: float = 1.5,
             condition: str = "nlos", clamp: bool = False) -> float:
    """Basic outdoor loss, TR 38.901 UMa closed form at the config frequency."""
    if condition not in ("los", "nlos"):
        raise InvalidParameterError(f"condition must be 'los' or 'nlos', got {condition!r}")
    h_bs = cfg.height_above_ground
    dh = h_bs - rx_height
    d2d_sq = d3d * d3d - dh * dh
    d2d = math.sqrt(d2d_sq) if d2d_sq > 0 else 0.0
    if not (_UMA_D2D_MIN <= d2d <= _UMA_D2D_MAX):
        if not clamp:
            raise ModelValidityError(
                f"2D distance {d2d:.1f} m outside UMa validity "
                f"[{_UMA_D2D_MIN}, {_UMA_D2D_MAX}] m")
        d2d = min(max(d2d, _UMA_D2D_MIN), _UMA_D2D_MAX)
        d3d = math.hypot(d2d, dh)
    fc = cfg.frequency_ghz
    d_bp = 4.0 * (h_bs - _UMA_ENV_HEIGHT) * (rx_height - _UMA_ENV_HEIGHT) \
        * cfg.frequency_hz / speed_of_light
    if d2d <= d_bp:
        pl_los = 28.0 + 22.0 * math.log10(d3d) + 20.0 * math.log10(fc)
    else:
        pl_los = (28.0 + 40.0 * math.log10(d3d) + 20.0 * math.log10(fc)
                  - 9.0 * math.log10(d_bp * d_bp + dh * dh))
    if condition == "los":
        return pl_los
    pl_nlos = (13.54 + 39.08 * math.log10(d3d) + 20.0 * math.log10(fc)
               - 0.6 * (rx_height - 1.5))
    return max(pl_los, pl_nlos)


def pl_tw(cfg: TransmitterConfig, material_profile: str = "low_loss") -> float:
    """Frequency-dependent building penetration loss (material composition)."""
    f = cfg.frequency_ghz
    loss_glass = 2.0 + 0.2 * f
    loss_iir_glass = 23.0 + 0.3 * f
    loss_concrete = 5.0 + 4.0 * f
    if material_profile == "low_loss":
        mix = 0.3 * 10.0 ** (-loss_glass / 10.0) + 0.7 * 10.0 ** (-loss_concrete / 10.0)
    elif material_profile == "high_loss":
        mix = 0.7 * 10.0 ** (-loss_iir_glass / 10.0) + 0.3 * 10.0 ** (-loss_concrete / 10.0)
    else:
        raise InvalidParameterError(
            f"material_profile must be 'low_loss' or 'high_loss', got {material_profile!r}")
    return 5.0 - 10.0 * math.log10(mix)


def predict_total_loss(cfg: TransmitterConfig, fv, in_model: IndoorLossModel,
                       material_profile: str = "low_loss", rx_height: float = 1.5,
                       condition: str = "nlos", clamp: bool = True,
                       sigma_p_db: float = 7.0) -> PathLossComponents:
    """Evaluate all deterministic loss terms for one feature vector."""
    basic = pl_basic(cfg, fv.d3d, rx_height=rx_height, condition=condition, clamp=clamp)
    wall = pl_tw(cfg, material_profile)
    if in_model.variant == "none":
        indoor = 0.0
    else:
        d = fv.get(in_model.variant)
        if d is None or math.isnan(d):
            raise FeatureMissingError(
                f"feature {in_model.variant!r} is unavailable for this point")
        indoor = pl_in(d)
    return PathLossComponents(basic, wall, indoor, sigma_p_db)


def predict_rsrp(cfg: TransmitterConfig, components: PathLossComponents) -> float:
    """Per-resource-element RSRP in dBm from the link budget."""
    return (cfg.tx_power_dbm - 10.0 * math.log10(N_SUBCARRIERS)
            + cfg.tx_gain_dbi + cfg.rx_gain_dbi - components.total_db)


def sample_shadowing(sigma_p: float, seed, size=None):
    """Zero-mean normal shadowing draw(s) in dB; reproducible per seed."""
    if sigma_p < 0:
        raise InvalidInputError("sigma_p must be >= 0")
    rng = np.random.default_rng(seed)
    draw = rng.normal(0.0, sigma_p) if size is None else rng.normal(0.0, sigma_p, size)
    if sigma_p == 0.0:
        draw = 0.0 if size is None else np.zeros(size)
    return draw


def tx_local_position(cfg: TransmitterConfig, origin: GeoPoint) -> LocalPoint:
    """Antenna position in the local frame (site altitude + mast height)."""
    base = to_local(cfg.position, origin)
    return LocalPoint(base.east, base.north, base.up + cfg.height_above_ground)


def load_tx_config(path) -> TransmitterConfig:
    """Read a TransmitterConfig from TOML or JSON."""
    path = str(path)
    if path.endswith(".toml"):
        try:
            import tomllib
        except ImportError:
            import tomli as tomllib
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    else:
        with open(path) as fh:
            data = json.load(fh)
    pos = data.pop("position")
    position = GeoPoint(float(pos["latitude"]), float(pos["longitude"]),
                        float(pos.get("altitude", 0.0)))
    return TransmitterConfig(position=position, **{k: float(v) for k, v in data.items()})


def save_tx_config(cfg: TransmitterConfig, path):
    data = {
        "position": {"latitude": cfg.position.latitude,
                     "longitude": cfg.position.longitude,
                     "altitude": cfg.position.altitude},
        "height_above_ground": cfg.height_above_ground,
        "frequency_hz": cfg.frequency_hz,
        "bandwidth_hz": cfg.bandwidth_hz,
        "tx_power_dbm": cfg.tx_power_dbm,
        "tx_gain_dbi": cfg.tx_gain_dbi,
        "rx_gain_dbi": cfg.rx_gain_dbi,
        "noise_figure_tx_db": cfg.noise_figure_tx_db,
        "noise_figure_rx_db": cfg.noise_figure_rx_db,
    }
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")
