#include <doctest.h>

#include <cmath>
#include <random>

#include "adsvol/errors.hpp"
#include "adsvol/pricing.hpp"

using namespace adsvol;
using pricing::PricingContext;

namespace {

double oracle_cdf(double x) { return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))); }

double oracle_call(double s, double k, double r, double tau, double sig) {
    const double d1 = (std::log(s / k) + (r + 0.5 * sig * sig) * tau) / (sig * std::sqrt(tau));
    const double d2 = d1 - sig * std::sqrt(tau);
    return s * oracle_cdf(d1) - k * std::exp(-r * tau) * oracle_cdf(d2);
}

}  // namespace

TEST_CASE("textbook call value") {
    PricingContext ctx{100.0, 0.05, 0.0, 1.0};
    CHECK(pricing::call_price(ctx, 100.0, 0.2) == doctest::Approx(10.450583572185565).epsilon(1e-12));
}

TEST_CASE("call matches the erf transcription and put-call parity") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double s = 50 + 100 * u(rng), k = 30 + 150 * u(rng), r = 0.08 * u(rng), tau = 0.01 + 2 * u(rng);
        const double sig = 0.05 + 0.8 * u(rng);
        PricingContext ctx{s, r, 0.0, tau};
        const double c = pricing::call_price(ctx, k, sig);
        CHECK(std::abs(c - oracle_call(s, k, r, tau, sig)) <= 1e-12 * s);
        const double put = k * std::exp(-r * tau) * oracle_cdf(-(std::log(s / k) + (r - 0.5 * sig * sig) * tau) /
                                                               (sig * std::sqrt(tau))) -
                           s * oracle_cdf(-(std::log(s / k) + (r + 0.5 * sig * sig) * tau) / (sig * std::sqrt(tau)));
        CHECK(c - put == doctest::Approx(s - k * std::exp(-r * tau)).epsilon(1e-10).scale(1e-9));
        const auto band = pricing::price_band(ctx, k);
        CHECK(c >= band.lower - 1e-12);
        CHECK(c <= band.upper + 1e-12);
    }
}

TEST_CASE("degenerate inputs") {
    PricingContext at_expiry{100.0, 0.05, 1.0, 1.0};
    CHECK(pricing::call_price(at_expiry, 90.0, 0.3) == 10.0);
    CHECK(pricing::call_price(at_expiry, 110.0, 0.3) == 0.0);
    PricingContext ctx{100.0, 0.05, 0.0, 1.0};
    CHECK(pricing::call_price(ctx, 90.0, 0.0) == doctest::Approx(100.0 - 90.0 * std::exp(-0.05)));
    CHECK(pricing::call_price(ctx, 120.0, 0.0) == 0.0);
    CHECK_THROWS_AS(pricing::validate(PricingContext{-1.0, 0.0, 0.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(pricing::validate(PricingContext{100.0, 0.0, 1.0, 0.5}), InvalidArgument);
}

TEST_CASE("implied vol inverts the price") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        PricingContext ctx{100.0, 0.05 * u(rng), 0.0, 0.05 + u(rng)};
        const double k = 70 + 60 * u(rng), sig = 0.05 + 1.0 * u(rng);
        const double c = pricing::call_price(ctx, k, sig);
        const auto band = pricing::price_band(ctx, k);
        if (c - band.lower < 1e-9 || band.upper - c < 1e-9) continue;  // flat region, vol not identified
        CHECK(pricing::implied_vol(ctx, k, c) == doctest::Approx(sig).epsilon(1e-6));
    }
}

TEST_CASE("implied vol rejects prices outside the band") {
    PricingContext ctx{100.0, 0.02, 0.0, 0.5};
    const auto band = pricing::price_band(ctx, 100.0);
    CHECK_THROWS_AS(pricing::implied_vol(ctx, 100.0, band.lower), OutOfBandError);
    CHECK_THROWS_AS(pricing::implied_vol(ctx, 100.0, band.upper + 1.0), OutOfBandError);
    CHECK_THROWS_AS(pricing::implied_vol(ctx, 100.0, -1.0), OutOfBandError);
}

TEST_CASE("vega matches a finite difference") {
    PricingContext ctx{100.0, 0.03, 0.0, 0.7};
    for (double k : {70.0, 95.0, 100.0, 130.0}) {
        const double h = 1e-6;
        const double fd = (pricing::call_price(ctx, k, 0.3 + h) - pricing::call_price(ctx, k, 0.3 - h)) / (2 * h);
        CHECK(pricing::vega(ctx, k, 0.3) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("AdS price derivatives agree with central differences") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    for (int i = 0; i < 300; ++i) {
        ads::AdsParams p{0.05 + 0.8 * u(rng), -1 + 2 * u(rng), 0.05 + 0.9 * u(rng), 0.05 + 0.4 * u(rng),
                         80 + 40 * u(rng), 100.0};
        PricingContext ctx{100.0, 0.04 * u(rng), 0.0, 0.05 + u(rng)};
        const double k = p.spot / (p.m_min() * (0.6 + 1.0 * u(rng)));
        if (pricing::in_singular_band(k, p) || std::fabs(p.spot / k - p.m_min()) < 1e-3) continue;
        const double h = k * 1e-5;
        const double fd_k = (pricing::ads_call_price(ctx, k + h, p) - pricing::ads_call_price(ctx, k - h, p)) / (2 * h);
        CHECK(pricing::dC_dK(ctx, k, p) == doctest::Approx(fd_k).epsilon(1e-4).scale(1e-6));

        const double sig = ads::sigma(p.spot / k, p);
        const double ht = 1e-6;
        PricingContext up = ctx, dn = ctx;
        up.T += ht;
        dn.T -= ht;
        const double fd_t = (pricing::call_price(up, k, sig) - pricing::call_price(dn, k, sig)) / (2 * ht);
        CHECK(pricing::dC_dT(ctx, k, sig) == doctest::Approx(fd_t).epsilon(1e-5).scale(1e-6));
        ++checked;
    }
    CHECK(checked > 200);
}

TEST_CASE("flat AdS surface reduces to Black-Scholes") {
    ads::AdsParams p{1e-12, 0.0, 0.5, 0.2, 100.0, 100.0};
    PricingContext ctx{100.0, 0.01, 0.0, 0.5};
    for (double k : {80.0, 90.0, 110.0, 120.0}) {
        CHECK(pricing::ads_call_price(ctx, k, p) == doctest::Approx(pricing::call_price(ctx, k, 0.2)).epsilon(1e-10));
        const double d2 = (std::log(100.0 / k) + (0.01 - 0.02) * 0.5) / (0.2 * std::sqrt(0.5));
        CHECK(pricing::dC_dK(ctx, k, p) == doctest::Approx(-std::exp(-0.005) * oracle_cdf(d2)).epsilon(1e-8));
        CHECK(pricing::d2C_dK2(ctx, k, p) > 0.0);
    }
}

TEST_CASE("singular band") {
    ads::AdsParams p{0.3, 0.1, 0.5, 0.2, 100.0, 100.0};
    CHECK(pricing::in_singular_band(100.0, p));
    CHECK(pricing::in_singular_band(100.0 / (1.0 + 4e-5), p));
    CHECK_FALSE(pricing::in_singular_band(100.0 / (1.0 + 6e-5), p));
    PricingContext ctx{100.0, 0.0, 0.0, 0.5};
    CHECK_THROWS_AS(pricing::dC_dK(ctx, 100.0, p), SingularPointError);
}
