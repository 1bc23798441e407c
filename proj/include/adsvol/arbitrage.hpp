#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adsvol/ads.hpp"
#include "adsvol/pricing.hpp"

namespace adsvol::arbitrage {

/// Tolerances of the numeric checks. Slope and band tolerances scale with spot.
struct Tolerances {
    double slope_rel = 1e-8;   // dC/dK <= slope_rel * S
    double convex = 1e-8;      // d2C/dK2 >= -convex
    double band_rel = 1e-8;    // band and limit checks, times S
    double calendar_rel = 1e-8;
    double payoff_tau = 1e-6;  // maturity used for the tau -> 0+ payoff limit
};

struct StrikeGrid {
    std::vector<double> strikes;  // ascending
    double m_lo = 0.0;            // moneyness span actually covered
    double m_hi = 0.0;
    std::size_t excluded = 0;     // points dropped from the K_min band
};

/// 200 log-spaced moneyness points over [0.5, 2] m_min plus 50 in each tail
/// ([0.2, 0.5) and (2, 5] m_min); points in the K_min band are removed.
StrikeGrid default_strike_grid(const ads::AdsParams& params, std::size_t n_core = 200,
                               std::size_t n_tail = 50);

/// Refines `grid` by `factor`: factor - 1 log-spaced strikes between neighbours.
StrikeGrid refine_grid(const StrikeGrid& grid, const ads::AdsParams& params, std::size_t factor);

struct Verdict {
    explicit Verdict(std::string n = {}) : name(std::move(n)) {}

    std::string name;
    bool checked = false;
    bool pass = true;
    double worst_violation = 0.0;  // >= 0; 0 when nothing exceeds the bound
    double worst_value = 0.0;      // the checked quantity at the worst node
    double strike = 0.0;           // location of the worst node
    double maturity = 0.0;
    std::size_t n_nodes = 0;
    std::size_t n_failed = 0;
    /// For failed slope/convexity checks: direct price differences at the
    /// worst node reproduce the violated inequality.
    std::optional<bool> confirmed_by_prices;
};

struct Admissibility {
    bool delta_ok = false;
    bool beta_ok = false;
    double min_bound = 0.0;   // min over the grid of beta_admissible_bound
    double min_bound_m = 0.0; // where the minimum sits
    double beta_margin = 0.0; // min_bound - |beta|
};

struct ArbReport {
    Verdict i_monotone{"i_monotone"};
    Verdict i_convex{"i_convex"};
    Verdict ii_limit{"ii_limit"};
    Verdict iii_band{"iii_band"};
    Verdict iv_payoff{"iv_payoff"};
    Verdict v_calendar{"v_calendar"};
    std::optional<Admissibility> admissibility;
    std::size_t grid_size = 0;
    double grid_m_lo = 0.0;
    double grid_m_hi = 0.0;
    std::vector<double> maturities;

    [[nodiscard]] bool butterfly_pass() const;
    [[nodiscard]] bool all_pass() const;
    [[nodiscard]] std::vector<const Verdict*> verdicts() const;
};

/// Conditions i-iv on `grid`. Throws InvalidArgument if the grid has fewer
/// than 50 strikes, misses m in [0.5, 2] m_min, or enters the K_min band.
ArbReport check_butterfly(const pricing::PricingContext& ctx, const ads::AdsParams& params,
                          const StrikeGrid& grid, const Tolerances& tol = {}, unsigned workers = 0);

/// Condition v: dC/dT >= -tol at every (K, T) node. Maturities ascending, > t.
Verdict check_calendar(const pricing::PricingContext& ctx, const ads::AdsParams& params,
                       const std::vector<double>& maturities, const StrikeGrid& grid,
                       const Tolerances& tol = {}, unsigned workers = 0);

Admissibility check_admissibility(const ads::AdsParams& params, const StrikeGrid& grid);

/// Default maturity grid for condition v: tau * {0.25, 0.5, 1, 2, 4} after t.
std::vector<double> default_maturities(const pricing::PricingContext& ctx);

/// Runs all checks on default grids.
ArbReport check_all(const pricing::PricingContext& ctx, const ads::AdsParams& params,
                    const Tolerances& tol = {}, unsigned workers = 0);

}  // namespace adsvol::arbitrage
