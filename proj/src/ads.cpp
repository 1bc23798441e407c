#include "adsvol/ads.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

#include "adsvol/errors.hpp"

namespace adsvol::ads {

namespace {

std::atomic<std::uint64_t> g_clamp_count{0};

void require_off_kmin(double g, const char* what) {
    if (g == 0.0) {
        std::ostringstream os;
        os << what << " is singular at m == m_min";
        throw SingularPointError(os.str());
    }
}

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

void validate(const AdsParams& p) {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(p.alpha)) throw InvalidArgument("AdS alpha must be > 0");
    if (!positive(p.epsilon)) throw InvalidArgument("AdS epsilon must be > 0");
    if (!positive(p.delta)) throw InvalidArgument("AdS delta must be > 0");
    if (!std::isfinite(p.beta)) throw InvalidArgument("AdS beta must be finite");
    if (!positive(p.k_min) || !positive(p.spot))
        throw InvalidArgument("AdS k_min and spot must be > 0");
}

std::uint64_t exp_clamp_count() { return g_clamp_count.load(std::memory_order_relaxed); }
void reset_exp_clamp_count() { g_clamp_count.store(0, std::memory_order_relaxed); }

double hurst(double m, const AdsParams& p) {
    const double m_min = p.m_min();
    const double num = 0.5 * (1.0 + std::pow(std::abs(1.0 - m_min), p.delta));
    return num / (1.0 + std::pow(std::abs(m - m_min), p.delta));
}

double sigma(double m, const AdsParams& p) {
    const double g = m - p.m_min();
    double exponent = -p.beta * hurst(m, p) * g;
    if (std::abs(exponent) > kExpClamp) {
        g_clamp_count.fetch_add(1, std::memory_order_relaxed);
        exponent = std::copysign(kExpClamp, exponent);
    }
    return p.alpha * g * g * std::exp(exponent) + p.epsilon;
}

double hurst_derivative(double m, const AdsParams& p) {
    const double g = m - p.m_min();
    require_off_kmin(g, "hurst_derivative");
    const double u = std::abs(g);
    const double ud = std::pow(u, p.delta);
    return -sgn(g) * hurst(m, p) * p.delta * (ud / u) / (1.0 + ud);
}

double sigma_derivative(double m, const AdsParams& p) {
    const double g = m - p.m_min();
    require_off_kmin(g, "sigma_derivative");
    const double ud = std::pow(std::abs(g), p.delta);
    const double shape = (1.0 + ud * (1.0 - p.delta)) / (1.0 + ud);
    const double quad = sigma(m, p) - p.epsilon;
    return quad * (2.0 / g - p.beta * hurst(m, p) * shape);
}

double beta_admissible_bound(double m, const AdsParams& p) {
    const double g = m - p.m_min();
    require_off_kmin(g, "beta_admissible_bound");
    const double u = std::abs(g);
    const double ud = std::pow(u, p.delta);
    return 2.0 * (1.0 + ud) / (hurst(m, p) * u * (1.0 + ud * (1.0 - p.delta)));
}

Limits sigma_limits(const AdsParams& p) {
    const double m_min = p.m_min();
    const double h_inf = 0.5 * (1.0 + std::pow(std::abs(1.0 - m_min), p.delta)) /
                         (1.0 + std::pow(m_min, p.delta));
    const double sigma_inf = p.alpha * m_min * m_min * std::exp(p.beta * m_min * h_inf) + p.epsilon;
    return {h_inf, sigma_inf};
}

}  // namespace adsvol::ads
