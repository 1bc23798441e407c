import json
import math
import os
from pathlib import Path

import pytest

import adsvol

DATA = Path(os.environ.get("ADSVOL_TEST_DATA", Path(__file__).resolve().parents[1] / "data"))


def fixture_params():
    return adsvol.AdsParams(alpha=0.5, beta=0.3, delta=0.4, epsilon=0.08, k_min=105.0, spot=100.0)


def test_identities():
    p = fixture_params()
    assert adsvol.hurst(1.0, p) == 0.5
    assert adsvol.sigma(p.m_min, p) == p.epsilon


def test_pricing_round_trip():
    ctx = adsvol.PricingContext(spot=100.0, rate=0.05, tau=1.0)
    price = adsvol.call_price(ctx, 100.0, 0.2)
    assert price == pytest.approx(10.450583572185565, rel=1e-12)
    assert adsvol.implied_vol(ctx, 100.0, price) == pytest.approx(0.2, rel=1e-9)


def test_errors_are_python_exceptions():
    ctx = adsvol.PricingContext(spot=100.0, rate=0.0, tau=0.5)
    with pytest.raises(adsvol.AdsvolError):
        adsvol.implied_vol(ctx, 100.0, 1000.0)
    with pytest.raises(ValueError):
        adsvol.curvature([1.0, 0.5, 2.0], [0.1, 0.2, 0.3])


def test_curvature_of_square_is_two():
    m = [0.5 + 0.125 * i for i in range(9)]
    assert all(c == 2.0 for _, c in adsvol.curvature(m, [x * x for x in m]))


def test_fsabr_without_vol_of_vol_is_black_scholes():
    ctx = adsvol.PricingContext(spot=100.0, rate=0.01, tau=0.25)
    strikes = [90.0, 100.0, 110.0]
    out = adsvol.fsabr_prices(ctx, strikes, alpha0=0.2, rho=-0.3, nu=0.0, hurst=0.3, n_paths=20000, n_steps=8)
    for k, (price, se) in zip(strikes, out):
        assert abs(price - adsvol.call_price(ctx, k, 0.2)) <= 4 * se


def test_calibrate_recovers_fixture():
    slices = {s.ticker: s for s in adsvol.load_slices(DATA / "synthetic_chain.csv")}
    fit = adsvol.calibrate(slices["SYN"], "ads", n_trials=60, seed=1)
    assert fit["model"] == "ads"
    assert fit["rmse"] < 1e-3
    assert len(fit["history"]) == 61


def test_arbitrage_report_is_a_dict():
    ctx = adsvol.PricingContext(spot=100.0, rate=0.02, tau=0.25)
    rep = adsvol.check_arbitrage(ctx, fixture_params())
    assert set(rep["conditions"]) >= {"i_monotone", "i_convex", "v_calendar"}
    assert rep["admissibility"]["delta_ok"] is True


def test_cli_in_process(tmp_path):
    code, out, _ = adsvol.cli(["report", "-i", str(DATA / "published_metrics.csv"), "-o", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "summary.csv").exists()
    assert adsvol.cli(["report"])[0] == 2
