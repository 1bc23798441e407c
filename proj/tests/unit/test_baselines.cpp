#include <doctest.h>

#include <cmath>
#include <numeric>

#include "adsvol/baselines.hpp"
#include "adsvol/errors.hpp"
#include "adsvol/parallel.hpp"

using namespace adsvol;
using namespace adsvol::baselines;
using pricing::PricingContext;

TEST_CASE("fBm covariance reduces to Brownian motion at H = 1/2") {
    for (double t : {0.1, 0.5, 2.0})
        for (double s : {0.2, 0.5, 3.0}) {
            CHECK(fbm_covariance(t, s, 0.5) == doctest::Approx(std::min(t, s)).epsilon(1e-14));
            CHECK(fbm_covariance(t, s, 0.5, 2.0) == doctest::Approx(4.0 * std::min(t, s)).epsilon(1e-14));
            CHECK(fbm_brownian_cross_covariance(t, s, 0.5) == doctest::Approx(std::min(t, s)).epsilon(1e-12));
        }
    CHECK(fbm_covariance(1.0, 1.0, 0.3, 1.5) == doctest::Approx(2.25));
}

TEST_CASE("fBm generator validates its grid") {
    CHECK_THROWS_AS(FbmGenerator({0.1, 0.2}, 0.3), InvalidArgument);
    CHECK_THROWS_AS(FbmGenerator({0.0, 0.2, 0.2}, 0.3), InvalidArgument);
    CHECK_THROWS_AS(FbmGenerator({0.0}, 0.3), InvalidArgument);
    CHECK_THROWS_AS(FbmGenerator({0.0, 1.0}, 1.0), InvalidArgument);
    std::vector<double> big(4097);
    std::iota(big.begin(), big.end(), 0.0);
    CHECK_THROWS_AS(FbmGenerator(big, 0.3), InvalidArgument);
}

TEST_CASE("fBm paths are deterministic in the seed") {
    std::vector<double> times{0.0, 0.25, 0.5, 0.75, 1.0};
    auto a = simulate_fbm(times, 0.3, 1.0, 11);
    auto b = simulate_fbm(times, 0.3, 1.0, 11);
    auto c = simulate_fbm(times, 0.3, 1.0, 12);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    CHECK(a.values.front() == 0.0);
}

TEST_CASE("fBm sample variance at the horizon") {
    std::vector<double> times;
    for (int i = 0; i <= 8; ++i) times.push_back(i / 8.0);
    FbmGenerator gen(times, 0.7, 1.3);
    CounterRng rng(5, 0);
    std::vector<double> path;
    double sum2 = 0.0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
        gen.sample(rng, path);
        sum2 += path.back() * path.back();
    }
    // sd of the estimator of E[X^2] is sqrt(2) k^2 / sqrt(n), about 0.012 here
    CHECK(sum2 / n == doctest::Approx(1.69).epsilon(0.03));
}

TEST_CASE("joint driver factor reproduces the joint covariance") {
    const double horizon = 0.5, h = 0.3;
    const std::size_t n = 6;
    const auto l = joint_driver_factor(horizon, n, h);
    const Eigen::MatrixXd cov = l * l.transpose();
    const double dt = horizon / n;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(cov(i, j) == doctest::Approx(i == j ? dt : 0.0).scale(1.0).epsilon(1e-12));
            const double tb = dt * (j + 1);
            CHECK(cov(n + j, n + i) ==
                  doctest::Approx(fbm_covariance(dt * (j + 1), dt * (i + 1), h)).epsilon(1e-9));
            const double cross = fbm_brownian_cross_covariance(dt * (i + 1), tb, h) -
                                 fbm_brownian_cross_covariance(dt * i, tb, h);
            CHECK(cov(n + j, i) == doctest::Approx(cross).epsilon(1e-9).scale(1e-12));
        }
    }
}

TEST_CASE("Hagan SABR: flat without vol-of-vol, ATM value and smoothness") {
    PricingContext ctx{100.0, 0.02, 0.0, 0.5};
    SabrParams flat{0.25, -0.4, 0.0};
    for (double k : {60.0, 100.0, 150.0}) CHECK(sabr_implied_vol(ctx, k, flat) == doctest::Approx(0.25).epsilon(1e-15));

    SabrParams p{0.2, -0.3, 0.8};
    const double atm = p.alpha0 * (1.0 + (p.rho * p.nu * p.alpha0 / 4.0 + (2.0 - 3.0 * p.rho * p.rho) / 24.0 * p.nu * p.nu) * 0.5);
    CHECK(sabr_implied_vol(ctx, ctx.forward(), p) == doctest::Approx(atm).epsilon(1e-14));
    // series branch and closed form meet smoothly
    const double f = ctx.forward();
    const double inside = sabr_implied_vol(ctx, f * std::exp(-(1e-6 - 1e-12)), p);
    const double outside = sabr_implied_vol(ctx, f * std::exp(-(1e-6 + 1e-12)), p);
    CHECK(inside == doctest::Approx(outside).epsilon(1e-9));
    // negative rho: downward skew
    CHECK(sabr_implied_vol(ctx, 80.0, p) > sabr_implied_vol(ctx, 120.0, p));
}

TEST_CASE("Hagan SABR with rho = 0 is symmetric in log-moneyness") {
    PricingContext ctx{100.0, 0.01, 0.0, 1.0};
    SabrParams p{0.3, 0.0, 1.1};
    const double f = ctx.forward();
    for (double x : {0.05, 0.2, 0.5})
        CHECK(sabr_implied_vol(ctx, f * std::exp(x), p) == doctest::Approx(sabr_implied_vol(ctx, f * std::exp(-x), p)).epsilon(1e-12));
}

TEST_CASE("fSABR without vol-of-vol prices at Black-Scholes") {
    PricingContext ctx{100.0, 0.03, 0.0, 0.25};
    FsabrParams p{{0.3, 0.5, 0.0}, 0.3};
    McConfig mc{20000, 16, 7, 0};
    std::vector<double> strikes{80, 90, 100, 110, 120};
    auto prices = fsabr_prices(ctx, strikes, p, mc);
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        const double bs = pricing::call_price(ctx, strikes[i], 0.3);
        CHECK(std::fabs(prices[i].price - bs) < 4.0 * prices[i].std_error + 1e-12);
        CHECK(prices[i].std_error > 0.0);
    }
}

TEST_CASE("fSABR results do not depend on the worker count") {
    PricingContext ctx{100.0, 0.01, 0.0, 0.5};
    FsabrParams p{{0.25, -0.5, 0.9}, 0.35};
    std::vector<double> strikes{85, 100, 115};
    McConfig one{3000, 12, 99, 1}, many{3000, 12, 99, 3};
    auto a = fsabr_prices(ctx, strikes, p, one);
    auto b = fsabr_prices(ctx, strikes, p, many);
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        CHECK(a[i].price == b[i].price);
        CHECK(a[i].std_error == b[i].std_error);
    }
}

TEST_CASE("fSABR smile recovers the flat vol and flags bad input") {
    PricingContext ctx{100.0, 0.0, 0.0, 0.5};
    FsabrParams p{{0.2, 0.0, 0.0}, 0.5};
    McConfig mc{20000, 8, 3, 0};
    auto smile = fsabr_smile(ctx, {90, 100, 110}, p, mc);
    REQUIRE(smile.points.size() == 3);
    for (const auto& pt : smile.points) CHECK(pt.implied_vol == doctest::Approx(0.2).epsilon(0.03));

    CHECK_THROWS_AS(fsabr_prices(ctx, {100}, FsabrParams{{0.2, 0.0, 0.1}, 1.2}, mc), InvalidArgument);
    CHECK_THROWS_AS(fsabr_prices(ctx, {100}, FsabrParams{{0.2, 1.0, 0.1}, 0.5}, mc), InvalidArgument);
    CHECK_THROWS_AS(fsabr_prices(ctx, {-1}, p, mc), InvalidArgument);
    CHECK_THROWS_AS(fsabr_prices(ctx, {100}, p, McConfig{1, 8, 3, 0}), InvalidArgument);
}
