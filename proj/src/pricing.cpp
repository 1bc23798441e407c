#include "adsvol/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "adsvol/errors.hpp"

namespace adsvol::pricing {

namespace {

struct D12 {
    double d1;
    double d2;
};

D12 d12(const PricingContext& ctx, double strike, double sigma) {
    const double tau = ctx.tau();
    const double sd = sigma * std::sqrt(tau);
    const double d1 = (std::log(ctx.spot / strike) + (ctx.rate + 0.5 * sigma * sigma) * tau) / sd;
    return {d1, d1 - sd};
}

void require_strike(double strike) {
    if (!(strike > 0.0) || !std::isfinite(strike)) throw InvalidArgument("strike must be > 0");
}

}  // namespace

double PricingContext::discount() const { return std::exp(-rate * tau()); }
double PricingContext::forward() const { return spot * std::exp(rate * tau()); }

void validate(const PricingContext& ctx) {
    if (!(ctx.spot > 0.0) || !std::isfinite(ctx.spot)) throw InvalidArgument("spot must be > 0");
    if (!std::isfinite(ctx.rate)) throw InvalidArgument("rate must be finite");
    if (!(ctx.T >= ctx.t)) throw InvalidArgument("expiry T must not precede t");
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double norm_pdf(double x) {
    return std::exp(-0.5 * x * x) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
}

double call_price(const PricingContext& ctx, double strike, double sigma) {
    validate(ctx);
    require_strike(strike);
    if (sigma < 0.0 || std::isnan(sigma)) throw InvalidArgument("sigma must be >= 0");
    const double tau = ctx.tau();
    if (tau == 0.0) return std::max(ctx.spot - strike, 0.0);
    const double df = ctx.discount();
    if (sigma == 0.0) return std::max(ctx.spot - strike * df, 0.0);
    const auto [d1, d2] = d12(ctx, strike, sigma);
    const double c = ctx.spot * norm_cdf(d1) - strike * df * norm_cdf(d2);
    return std::max(c, 0.0);
}

double vega(const PricingContext& ctx, double strike, double sigma) {
    validate(ctx);
    require_strike(strike);
    const double tau = ctx.tau();
    if (tau == 0.0 || sigma <= 0.0) return 0.0;
    const auto [d1, d2] = d12(ctx, strike, sigma);
    (void)d2;
    return ctx.spot * norm_pdf(d1) * std::sqrt(tau);
}

PriceBand price_band(const PricingContext& ctx, double strike) {
    return {std::max(ctx.spot - strike * ctx.discount(), 0.0), ctx.spot};
}

double implied_vol(const PricingContext& ctx, double strike, double price) {
    validate(ctx);
    require_strike(strike);
    if (ctx.tau() <= 0.0) throw InvalidArgument("implied_vol needs tau > 0");
    const auto band = price_band(ctx, strike);
    if (!(price > band.lower && price < band.upper)) {
        std::ostringstream os;
        os.precision(17);
        os << "price " << price << " outside no-arbitrage band (" << band.lower << ", "
           << band.upper << ") at K=" << strike;
        throw OutOfBandError(os.str());
    }
    constexpr double kPriceTol = 1e-10;
    constexpr int kMaxIter = 200;
    constexpr int kMaxNewton = 20;
    constexpr double kVegaFloor = 1e-12;
    constexpr double kVolTol = 1e-10;

    // Converged once the price residual is small and also maps to a negligible vol step;
    // the second test matters far out of the money where vega is tiny.
    auto converged = [&](double f, double x) {
        return std::abs(f) <= kPriceTol && std::abs(f) <= kVolTol * std::max(vega(ctx, strike, x), kVegaFloor);
    };

    double lo = 0.0;
    double hi = 1.0;
    int iter = 0;
    while (call_price(ctx, strike, hi) < price) {
        lo = hi;
        hi *= 2.0;
        if (++iter > 64) throw ConvergenceError("implied_vol: no upper bracket found");
    }
    auto bisect_to = [&](double width) {
        while (hi - lo > width && iter < kMaxIter) {
            const double mid = 0.5 * (lo + hi);
            const double f = call_price(ctx, strike, mid) - price;
            if (converged(f, mid)) return mid;
            (f < 0.0 ? lo : hi) = mid;
            ++iter;
        }
        return 0.5 * (lo + hi);
    };

    double x = bisect_to(1e-4);
    for (int n = 0; n < kMaxNewton && iter < kMaxIter; ++n, ++iter) {
        const double f = call_price(ctx, strike, x) - price;
        if (converged(f, x)) return x;
        (f < 0.0 ? lo : hi) = x;
        const double v = std::max(vega(ctx, strike, x), kVegaFloor);
        double next = x - f / v;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    while (iter < kMaxIter) {
        const double f = call_price(ctx, strike, x) - price;
        if (converged(f, x)) return x;
        (f < 0.0 ? lo : hi) = x;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return x;
        x = 0.5 * (lo + hi);
        ++iter;
    }
    throw ConvergenceError("implied_vol: no convergence after 200 iterations");
}

bool in_singular_band(double strike, const ads::AdsParams& params) {
    return std::abs(params.spot / strike - params.m_min()) < kSingularHalfWidth;
}

double ads_call_price(const PricingContext& ctx, double strike, const ads::AdsParams& params) {
    require_strike(strike);
    return call_price(ctx, strike, ads::sigma(params.spot / strike, params));
}

double dC_dK(const PricingContext& ctx, double strike, const ads::AdsParams& params) {
    validate(ctx);
    require_strike(strike);
    if (in_singular_band(strike, params))
        throw SingularPointError("dC_dK evaluated inside the K_min band");
    const double tau = ctx.tau();
    if (tau <= 0.0) throw InvalidArgument("dC_dK needs tau > 0");
    const double m = params.spot / strike;
    const double sig = ads::sigma(m, params);
    const double dsig_dK = ads::sigma_derivative(m, params) * (-params.spot / (strike * strike));
    const auto [d1, d2] = d12(ctx, strike, sig);
    (void)d1;
    const double df = ctx.discount();
    return -df * norm_cdf(d2) + strike * df * norm_pdf(d2) * std::sqrt(tau) * dsig_dK;
}

double d2C_dK2(const PricingContext& ctx, double strike, const ads::AdsParams& params) {
    const double h = strike * 1e-5;
    return (dC_dK(ctx, strike + h, params) - dC_dK(ctx, strike - h, params)) / (2.0 * h);
}

double dC_dT(const PricingContext& ctx, double strike, double sigma) {
    validate(ctx);
    require_strike(strike);
    const double tau = ctx.tau();
    if (tau <= 0.0) throw InvalidArgument("dC_dT needs tau > 0");
    if (sigma < 0.0) throw InvalidArgument("sigma must be >= 0");
    const double df = ctx.discount();
    if (sigma == 0.0)
        return ctx.spot > strike * df ? ctx.rate * strike * df : 0.0;
    const auto [d1, d2] = d12(ctx, strike, sigma);
    (void)d1;
    return ctx.rate * strike * df * norm_cdf(d2) +
           sigma * strike * df * norm_pdf(d2) / (2.0 * std::sqrt(tau));
}

}  // namespace adsvol::pricing
