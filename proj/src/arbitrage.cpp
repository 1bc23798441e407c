#include "adsvol/arbitrage.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "adsvol/errors.hpp"
#include "adsvol/parallel.hpp"

namespace adsvol::arbitrage {

namespace {

std::vector<double> log_space(double lo, double hi, std::size_t n, bool include_hi) {
    std::vector<double> out;
    if (n == 0) return out;
    const double step = (std::log(hi) - std::log(lo)) / static_cast<double>(include_hi ? n - 1 : n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(std::exp(std::log(lo) + step * static_cast<double>(i)));
    if (include_hi && n > 1) out.back() = hi;
    return out;
}

StrikeGrid grid_from_moneyness(std::vector<double> ms, const ads::AdsParams& params) {
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    StrikeGrid grid;
    for (double m : ms) {
        const double strike = params.spot / m;
        // Keep the central-difference stencil of d2C/dK2 out of the band too.
        if (pricing::in_singular_band(strike, params) ||
            pricing::in_singular_band(strike * (1 + 1e-5), params) ||
            pricing::in_singular_band(strike * (1 - 1e-5), params)) {
            ++grid.excluded;
            continue;
        }
        grid.strikes.push_back(strike);
    }
    std::sort(grid.strikes.begin(), grid.strikes.end());
    if (!grid.strikes.empty()) {
        grid.m_lo = params.spot / grid.strikes.back();
        grid.m_hi = params.spot / grid.strikes.front();
    }
    return grid;
}

void record(Verdict& v, double violation, double value, double strike, double maturity) {
    ++v.n_nodes;
    if (violation > 0.0) {
        ++v.n_failed;
        v.pass = false;
    }
    if (v.n_nodes == 1 || violation > v.worst_violation) {
        v.worst_violation = std::max(violation, 0.0);
        v.worst_value = value;
        v.strike = strike;
        v.maturity = maturity;
    }
}

struct NodeResult {
    double slope;
    double convexity;
    double price;
    double band_lo;
    double payoff_gap;
    double payoff_gap_bound;
};

}  // namespace

StrikeGrid default_strike_grid(const ads::AdsParams& params, std::size_t n_core, std::size_t n_tail) {
    const double m_min = params.m_min();
    std::vector<double> ms = log_space(0.5 * m_min, 2.0 * m_min, n_core, true);
    for (double m : log_space(0.2 * m_min, 0.5 * m_min, n_tail, false)) ms.push_back(m);
    auto upper = log_space(2.0 * m_min, 5.0 * m_min, n_tail + 1, true);
    ms.insert(ms.end(), upper.begin() + 1, upper.end());
    return grid_from_moneyness(std::move(ms), params);
}

StrikeGrid refine_grid(const StrikeGrid& grid, const ads::AdsParams& params, std::size_t factor) {
    if (factor < 1) throw InvalidArgument("refinement factor must be >= 1");
    std::vector<double> ms;
    for (std::size_t i = 0; i < grid.strikes.size(); ++i) {
        const double k = grid.strikes[i];
        ms.push_back(params.spot / k);
        if (i + 1 == grid.strikes.size()) break;
        const double ratio = grid.strikes[i + 1] / k;
        for (std::size_t j = 1; j < factor; ++j)
            ms.push_back(params.spot / (k * std::pow(ratio, static_cast<double>(j) / factor)));
    }
    return grid_from_moneyness(std::move(ms), params);
}

bool ArbReport::butterfly_pass() const {
    return i_monotone.pass && i_convex.pass && ii_limit.pass && iii_band.pass && iv_payoff.pass;
}

bool ArbReport::all_pass() const {
    bool ok = butterfly_pass() && v_calendar.pass;
    if (admissibility) ok = ok && admissibility->beta_ok && admissibility->delta_ok;
    return ok;
}

std::vector<const Verdict*> ArbReport::verdicts() const {
    return {&i_monotone, &i_convex, &ii_limit, &iii_band, &iv_payoff, &v_calendar};
}

ArbReport check_butterfly(const pricing::PricingContext& ctx, const ads::AdsParams& params,
                          const StrikeGrid& grid, const Tolerances& tol, unsigned workers) {
    pricing::validate(ctx);
    ads::validate(params);
    if (!(ctx.tau() > 0.0)) throw InvalidArgument("check_butterfly needs T > t");
    const double m_min = params.m_min();
    if (grid.strikes.size() < 50) throw InvalidArgument("strike grid needs at least 50 strikes");
    if (!std::is_sorted(grid.strikes.begin(), grid.strikes.end()))
        throw InvalidArgument("strike grid must be ascending");
    const double m_lo = params.spot / grid.strikes.back();
    const double m_hi = params.spot / grid.strikes.front();
    if (m_lo > 0.5 * m_min * (1 + 1e-9) || m_hi < 2.0 * m_min * (1 - 1e-9))
        throw InvalidArgument("strike grid must span m in [0.5, 2] * m_min");
    for (double k : grid.strikes)
        if (pricing::in_singular_band(k, params))
            throw InvalidArgument("strike grid enters the K_min band");

    const double s = ctx.spot;
    pricing::PricingContext ctx0 = ctx;
    ctx0.T = ctx.t + tol.payoff_tau;

    std::vector<NodeResult> nodes(grid.strikes.size());
    parallel_for(grid.strikes.size(), workers, [&](std::size_t i) {
        const double k = grid.strikes[i];
        NodeResult r{};
        r.slope = pricing::dC_dK(ctx, k, params);
        r.convexity = pricing::d2C_dK2(ctx, k, params);
        r.price = pricing::ads_call_price(ctx, k, params);
        r.band_lo = pricing::price_band(ctx, k).lower;
        const double sig = ads::sigma(s / k, params);
        const double c0 = pricing::call_price(ctx0, k, sig);
        const double payoff = std::max(s - k, 0.0);
        r.payoff_gap = std::abs(c0 - payoff);
        // Largest time value a call with this vol can carry, plus discounting.
        r.payoff_gap_bound =
            s * (2.0 * pricing::norm_cdf(0.5 * sig * std::sqrt(tol.payoff_tau)) - 1.0) +
            k * (1.0 - ctx0.discount());
        nodes[i] = r;
    });

    ArbReport rep;
    rep.grid_size = grid.strikes.size();
    rep.grid_m_lo = m_lo;
    rep.grid_m_hi = m_hi;
    for (auto* v : {&rep.i_monotone, &rep.i_convex, &rep.ii_limit, &rep.iii_band, &rep.iv_payoff})
        v->checked = true;

    const double slope_tol = tol.slope_rel * s;
    const double band_tol = tol.band_rel * s;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double k = grid.strikes[i];
        const auto& n = nodes[i];
        record(rep.i_monotone, n.slope > slope_tol ? n.slope : 0.0, n.slope, k, ctx.T);
        record(rep.i_convex, n.convexity < -tol.convex ? -n.convexity : 0.0, n.convexity, k, ctx.T);
        const double over = n.price - (s + band_tol);
        const double under = (n.band_lo - band_tol) - n.price;
        record(rep.iii_band, std::max({over, under, 0.0}), n.price, k, ctx.T);
        const double gap_excess = n.payoff_gap - (n.payoff_gap_bound + band_tol);
        record(rep.iv_payoff, std::max(gap_excess, 0.0), n.payoff_gap, k, ctx0.T);
    }

    // Exact limit point: C(t, K) = (S - K)^+.
    pricing::PricingContext at_t = ctx;
    at_t.T = ctx.t;
    for (double k : grid.strikes) {
        const double c = pricing::ads_call_price(at_t, k, params);
        const double gap = std::abs(c - std::max(s - k, 0.0));
        record(rep.iv_payoff, gap > band_tol ? gap : 0.0, gap, k, ctx.t);
    }

    const double far_strike = 1e6 * s;
    const double far_price = pricing::ads_call_price(ctx, far_strike, params);
    const double limit_tol = 1e-8 * s;
    record(rep.ii_limit, far_price >= limit_tol ? far_price : 0.0, far_price, far_strike, ctx.T);

    // Reproduce failed derivative checks with direct price differences.
    auto price_at = [&](double k) { return pricing::ads_call_price(ctx, k, params); };
    if (!rep.i_monotone.pass) {
        const double k = rep.i_monotone.strike;
        const double h = k * 1e-4;
        rep.i_monotone.confirmed_by_prices = price_at(k + h) - price_at(k - h) > 0.0;
    }
    if (!rep.i_convex.pass) {
        const double k = rep.i_convex.strike;
        const double h = k * 1e-4;
        rep.i_convex.confirmed_by_prices = price_at(k + h) - 2.0 * price_at(k) + price_at(k - h) < 0.0;
    }
    return rep;
}

Verdict check_calendar(const pricing::PricingContext& ctx, const ads::AdsParams& params,
                       const std::vector<double>& maturities, const StrikeGrid& grid,
                       const Tolerances& tol, unsigned workers) {
    pricing::validate(ctx);
    ads::validate(params);
    if (maturities.empty()) throw InvalidArgument("calendar check needs at least one maturity");
    for (std::size_t i = 0; i < maturities.size(); ++i) {
        if (!(maturities[i] > ctx.t)) throw InvalidArgument("maturities must be after t");
        if (i > 0 && !(maturities[i] > maturities[i - 1]))
            throw InvalidArgument("maturities must be ascending");
    }
    if (grid.strikes.empty()) throw InvalidArgument("calendar check needs strikes");

    const std::size_t nk = grid.strikes.size();
    std::vector<double> values(nk * maturities.size());
    parallel_for(values.size(), workers, [&](std::size_t idx) {
        const double k = grid.strikes[idx % nk];
        pricing::PricingContext c = ctx;
        c.T = maturities[idx / nk];
        values[idx] = pricing::dC_dT(c, k, ads::sigma(params.spot / k, params));
    });

    Verdict v{"v_calendar"};
    v.checked = true;
    const double cal_tol = tol.calendar_rel * ctx.spot;
    for (std::size_t idx = 0; idx < values.size(); ++idx) {
        const double d = values[idx];
        record(v, d < -cal_tol ? -d : 0.0, d, grid.strikes[idx % nk], maturities[idx / nk]);
    }
    return v;
}

Admissibility check_admissibility(const ads::AdsParams& params, const StrikeGrid& grid) {
    Admissibility a;
    a.delta_ok = params.delta > 0.0 && params.delta < 1.0;
    bool first = true;
    bool all_positive = true;
    for (double k : grid.strikes) {
        if (pricing::in_singular_band(k, params)) continue;
        const double m = params.spot / k;
        const double b = ads::beta_admissible_bound(m, params);
        if (!(b > 0.0)) all_positive = false;
        if (first || b < a.min_bound) {
            a.min_bound = b;
            a.min_bound_m = m;
            first = false;
        }
    }
    if (first) throw InvalidArgument("admissibility check needs strikes outside the K_min band");
    a.beta_margin = a.min_bound - std::abs(params.beta);
    a.beta_ok = all_positive && std::abs(params.beta) < a.min_bound;
    return a;
}

std::vector<double> default_maturities(const pricing::PricingContext& ctx) {
    const double tau = ctx.tau() > 0.0 ? ctx.tau() : 1.0 / 12.0;
    std::vector<double> out;
    for (double f : {0.25, 0.5, 1.0, 2.0, 4.0}) out.push_back(ctx.t + f * tau);
    return out;
}

ArbReport check_all(const pricing::PricingContext& ctx, const ads::AdsParams& params,
                    const Tolerances& tol, unsigned workers) {
    const auto grid = default_strike_grid(params);
    auto rep = check_butterfly(ctx, params, grid, tol, workers);
    rep.maturities = default_maturities(ctx);
    rep.v_calendar = check_calendar(ctx, params, rep.maturities, grid, tol, workers);
    rep.admissibility = check_admissibility(params, grid);
    return rep;
}

}  // namespace adsvol::arbitrage
