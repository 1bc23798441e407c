#pragma once

#include "adsvol/ads.hpp"

namespace adsvol::pricing {

/// Spot, continuous rate and the (now, expiry) pair, both in years.
struct PricingContext {
    double spot = 100.0;
    double rate = 0.0;
    double t = 0.0;
    double T = 0.0;

    [[nodiscard]] double tau() const { return T - t; }
    [[nodiscard]] double discount() const;
    [[nodiscard]] double forward() const;
};

void validate(const PricingContext& ctx);

/// Standard normal CDF via erfc.
double norm_cdf(double x);
double norm_pdf(double x);

/// Black-Scholes call. At tau == 0 returns (S - K)^+; with sigma == 0 and
/// tau > 0 returns the discounted intrinsic (S - K e^{-r tau})^+.
double call_price(const PricingContext& ctx, double strike, double sigma);

/// dC/dsigma.
double vega(const PricingContext& ctx, double strike, double sigma);

/// Lower and upper no-arbitrage bounds of a call price.
struct PriceBand {
    double lower;
    double upper;
};
PriceBand price_band(const PricingContext& ctx, double strike);

/// Implied volatility from a call price. Bisection to 1e-4 in sigma, then at
/// most 20 safeguarded Newton steps; bisection resumes if Newton stalls.
/// Throws OutOfBandError if price is not strictly inside price_band(), and
/// ConvergenceError after 200 iterations.
double implied_vol(const PricingContext& ctx, double strike, double price);

/// Half-width, in moneyness, of the band around m_min excluded from
/// derivative evaluation.
inline constexpr double kSingularHalfWidth = 5e-5;

bool in_singular_band(double strike, const ads::AdsParams& params);

/// Total dC/dK of the call priced with sigma(K) from the AdS smile:
///   -e^{-r tau} N(d2) + K e^{-r tau} phi(d2) sqrt(tau) dsigma/dK.
double dC_dK(const PricingContext& ctx, double strike, const ads::AdsParams& params);

/// d2C/dK2 as a central difference of dC_dK with step K * 1e-5.
double d2C_dK2(const PricingContext& ctx, double strike, const ads::AdsParams& params);

/// dC/dT at fixed sigma: r K e^{-r tau} N(d2) + sigma K e^{-r tau} phi(d2) / (2 sqrt(tau)).
double dC_dT(const PricingContext& ctx, double strike, double sigma);

/// Call price on the AdS smile, C(K) = call_price(ctx, K, sigma(S/K)).
double ads_call_price(const PricingContext& ctx, double strike, const ads::AdsParams& params);

}  // namespace adsvol::pricing
