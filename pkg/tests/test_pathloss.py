import math

import numpy as np
import pytest

from tunnelprop.errors import (FeatureMissingError, InvalidInputError,
                               ModelValidityError)
from tunnelprop.features import FeatureVector
from tunnelprop.geo import GeoPoint
from tunnelprop.pathloss import (IndoorLossModel, PathLossComponents,
                                 TransmitterConfig, load_tx_config, pl_basic,
                                 pl_in, pl_tw, predict_rsrp, predict_total_loss,
                                 sample_shadowing, save_tx_config)

CFG = TransmitterConfig(position=GeoPoint(55.78, 12.52, 0.0))


def fv_with(**kwargs):
    base = dict(d2d=400.0, d3d=401.0, azimuth_phi=10.0, elevation_theta=5.0,
                d_in_2d=10.0, d_in_3d=9.0, d_pen_2d=4.0, d_pen_3d=3.0,
                depth=5.0, d_cor_avg=7.0)
    base.update(kwargs)
    return FeatureVector(**base)


def test_pl_in_values():
    assert pl_in(10.0) == 5.0
    assert pl_in(0.0) == 0.0
    assert pl_in(24.6) == pytest.approx(12.3, abs=1e-12)


def test_pl_in_negative_rejected():
    with pytest.raises(InvalidInputError):
        pl_in(-1.0)


def uma_oracle(d3d, fc_ghz, h_bs, h_ut, condition):
    """Independent evaluation of the published UMa closed form."""
    c = 299792458.0
    dh = h_bs - h_ut
    d2d = math.sqrt(d3d ** 2 - dh ** 2)
    d_bp = 4 * (h_bs - 1.0) * (h_ut - 1.0) * (fc_ghz * 1e9) / c
    if d2d <= d_bp:
        los = 28.0 + 22.0 * math.log10(d3d) + 20.0 * math.log10(fc_ghz)
    else:
        los = (28.0 + 40.0 * math.log10(d3d) + 20.0 * math.log10(fc_ghz)
               - 9.0 * math.log10(d_bp ** 2 + dh ** 2))
    if condition == "los":
        return los
    nlos = 13.54 + 39.08 * math.log10(d3d) + 20.0 * math.log10(fc_ghz) - 0.6 * (h_ut - 1.5)
    return max(los, nlos)


def test_pl_basic_matches_hand_oracle():
    got = pl_basic(CFG, 500.0, rx_height=1.5, condition="nlos")
    want = uma_oracle(500.0, CFG.frequency_ghz, 30.0, 1.5, "nlos")
    assert got == pytest.approx(want, abs=0.01)


def test_pl_basic_los_matches_hand_oracle():
    got = pl_basic(CFG, 200.0, rx_height=1.5, condition="los")
    want = uma_oracle(200.0, CFG.frequency_ghz, 30.0, 1.5, "los")
    assert got == pytest.approx(want, abs=0.01)


def test_pl_basic_doubling_slope():
    # far-field NLOS log region: doubling d3d adds 39.08*log10(2) dB
    a = pl_basic(CFG, 1000.0, condition="nlos")
    b = pl_basic(CFG, 2000.0, condition="nlos")
    assert b - a == pytest.approx(39.08 * math.log10(2.0), abs=0.01)


def test_pl_basic_below_validity():
    with pytest.raises(ModelValidityError):
        pl_basic(CFG, 29.0, condition="nlos")  # d2d ~ 5 m < 10 m
    assert pl_basic(CFG, 29.0, condition="nlos", clamp=True) > 0


def test_pl_basic_monotone_in_distance():
    losses = [pl_basic(CFG, d, condition="nlos") for d in np.linspace(50, 4500, 200)]
    assert all(b >= a for a, b in zip(losses, losses[1:]))


def test_pl_tw_low_loss_hand_oracle():
    f = CFG.frequency_ghz
    want = 5.0 - 10.0 * math.log10(
        0.3 * 10 ** (-(2.0 + 0.2 * f) / 10.0) + 0.7 * 10 ** (-(5.0 + 4.0 * f) / 10.0))
    assert pl_tw(CFG, "low_loss") == pytest.approx(want, abs=0.01)


def test_pl_tw_high_ge_low_over_frequency():
    for f_ghz in np.linspace(0.5, 40.0, 30):
        cfg = TransmitterConfig(position=CFG.position, frequency_hz=f_ghz * 1e9)
        assert pl_tw(cfg, "high_loss") >= pl_tw(cfg, "low_loss")


def test_pl_tw_deterministic():
    assert pl_tw(CFG, "low_loss") == pl_tw(CFG, "low_loss")


def test_predict_total_loss_none_variant():
    comps = predict_total_loss(CFG, fv_with(), IndoorLossModel("none"))
    assert comps.pl_in_db == 0.0
    assert comps.total_db == comps.pl_b_db + comps.pl_tw_db


def test_predict_total_loss_din2d():
    comps = predict_total_loss(CFG, fv_with(d_in_2d=10.0), IndoorLossModel("d_in_2d"))
    assert comps.pl_in_db == 5.0


def test_variant_total_is_none_total_plus_indoor():
    fv = fv_with(d_pen_3d=8.0)
    none_total = predict_total_loss(CFG, fv, IndoorLossModel("none")).total_db
    var_total = predict_total_loss(CFG, fv, IndoorLossModel("d_pen_3d")).total_db
    assert var_total == pytest.approx(none_total + 0.5 * 8.0, abs=1e-12)


def test_missing_feature_raises():
    fv = fv_with(d_pen_3d=math.nan)
    with pytest.raises(FeatureMissingError):
        predict_total_loss(CFG, fv, IndoorLossModel("d_pen_3d"))


def test_predict_rsrp_zero_loss():
    comps = PathLossComponents(0.0, 0.0, 0.0, 7.0)
    want = 46.0 - 10.0 * math.log10(12.0) + 5.0 + 5.8
    assert predict_rsrp(CFG, comps) == pytest.approx(want, abs=1e-12)
    assert predict_rsrp(CFG, comps) == pytest.approx(46.01, abs=0.01)


def test_predict_rsrp_linear_in_loss():
    a = predict_rsrp(CFG, PathLossComponents(100.0, 0.0, 0.0, 7.0))
    b = predict_rsrp(CFG, PathLossComponents(110.0, 0.0, 0.0, 7.0))
    assert a - b == pytest.approx(10.0, abs=1e-12)


def test_predict_rsrp_rx_gain():
    cfg2 = TransmitterConfig(position=CFG.position, rx_gain_dbi=CFG.rx_gain_dbi + 3.0)
    comps = PathLossComponents(120.0, 10.0, 5.0, 7.0)
    assert predict_rsrp(cfg2, comps) - predict_rsrp(CFG, comps) == pytest.approx(3.0)


def test_shadowing_zero_sigma():
    assert sample_shadowing(0.0, seed=1) == 0.0


def test_shadowing_statistics():
    draws = sample_shadowing(8.0, seed=42, size=10 ** 6)
    assert abs(draws.mean()) < 0.05
    assert 7.9 <= draws.std() <= 8.1


def test_shadowing_reproducible():
    assert sample_shadowing(8.0, seed=7) == sample_shadowing(8.0, seed=7)


def test_shadowing_negative_sigma():
    with pytest.raises(InvalidInputError):
        sample_shadowing(-1.0, seed=0)


def test_config_round_trip(tmp_path):
    save_tx_config(CFG, tmp_path / "tx.json")
    loaded = load_tx_config(tmp_path / "tx.json")
    assert loaded == CFG


def test_config_toml(tmp_path):
    (tmp_path / "tx.toml").write_text(
        'height_above_ground = 30.0\nfrequency_hz = 820.5e6\n'
        '[position]\nlatitude = 55.78\nlongitude = 12.52\naltitude = 0.0\n')
    loaded = load_tx_config(tmp_path / "tx.toml")
    assert loaded.frequency_hz == 820.5e6
    assert loaded.tx_power_dbm == 46.0


def test_frequency_validity():
    with pytest.raises(InvalidInputError):
        TransmitterConfig(position=CFG.position, frequency_hz=100e6)
