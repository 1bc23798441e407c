#pragma once

#include <cstdint>
#include <utility>

namespace adsvol::ads {

/// Parameters of the AdS smile for one expiry. `k_min` and `spot` fix the
/// smile's minimum at moneyness m_min = spot / k_min.
struct AdsParams {
    double alpha = 0.0;    // volatility scale, > 0
    double beta = 0.0;     // memory-decay coupling, [-1, 1] in the search space
    double delta = 0.5;    // H-shape steepness, admissible in (0, 1)
    double epsilon = 0.0;  // volatility floor, > 0
    double k_min = 1.0;
    double spot = 1.0;

    [[nodiscard]] double m_min() const { return spot / k_min; }
};

/// Throws InvalidArgument unless alpha, epsilon, k_min, spot > 0 and delta > 0.
/// Beta and delta ranges are checked by the arbitrage module, not here, so
/// that inadmissible parameter sets can still be evaluated.
void validate(const AdsParams& p);

/// Helper g = m - m_min.
struct MoneynessPoint {
    double m;
    double m_min;
    double g;

    MoneynessPoint(double m_, const AdsParams& p) : m(m_), m_min(p.m_min()), g(m_ - p.m_min()) {}
};

/// Exponent magnitude beyond which exp() is clamped in sigma().
inline constexpr double kExpClamp = 50.0;

/// Number of sigma() evaluations whose exponent hit the clamp since the last reset.
std::uint64_t exp_clamp_count();
void reset_exp_clamp_count();

/// Moneyness-dependent Hurst exponent
///   H(m) = 1/2 (1 + |1 - m_min|^delta) / (1 + |m - m_min|^delta).
/// H(1) = 1/2 for every parameter set; the maximum sits at m = m_min.
double hurst(double m, const AdsParams& p);

/// Implied volatility
///   sigma(m) = alpha (m - m_min)^2 exp(-beta H(m) (m - m_min)) + epsilon.
double sigma(double m, const AdsParams& p);

/// dH/dm = -sgn(g) H delta |g|^(delta-1) / (1 + |g|^delta).
/// Throws SingularPointError at m == m_min.
double hurst_derivative(double m, const AdsParams& p);

/// dsigma/dm = (sigma - epsilon) [2/g - beta H (1 + |g|^delta (1-delta)) / (1 + |g|^delta)].
/// Throws SingularPointError at m == m_min.
double sigma_derivative(double m, const AdsParams& p);

/// Right-hand side B(m) of the admissibility bound |beta| < B(m), with u = |m - m_min|:
///   B(m) = 2 (1 + u^delta) / (H(m) u (1 + u^delta (1 - delta))).
/// A non-positive value means delta is inadmissible at this m.
/// Throws SingularPointError at m == m_min.
double beta_admissible_bound(double m, const AdsParams& p);

/// Limits of H and sigma as K -> infinity (m -> 0).
struct Limits {
    double h_inf;
    double sigma_inf;
};
Limits sigma_limits(const AdsParams& p);

}  // namespace adsvol::ads
