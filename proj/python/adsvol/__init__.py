"""AdS implied volatility model: pricing, baselines, calibration, metrics and arbitrage checks."""

from ._adsvol import (
    AdsParams,
    AdsvolError,
    PricingContext,
    QuoteSlice,
    ads_call_price,
    beta_admissible_bound,
    calibrate,
    call_price,
    check_arbitrage,
    cli,
    curvature,
    dC_dK,
    dC_dT,
    evaluate,
    fbm_covariance,
    fsabr_prices,
    hurst,
    hurst_derivative,
    implied_vol,
    load_slices,
    sabr_implied_vol,
    sigma,
    sigma_derivative,
    simulate_fbm,
    summarize_column,
)

__version__ = "0.1.0"
__all__ = [name for name in dir() if not name.startswith("_")]
