#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adsvol/ads.hpp"
#include "adsvol/baselines.hpp"
#include "adsvol/errors.hpp"
#include "adsvol/marketdata.hpp"

namespace adsvol::calibration {

enum class Model { Ads, Sabr, Fsabr };

std::string to_string(Model m);
Model parse_model(const std::string& name);
inline constexpr Model kAllModels[] = {Model::Ads, Model::Sabr, Model::Fsabr};

/// Objective value recorded when a model evaluation fails.
inline constexpr double kPenalty = 1e6;

struct ParamBound {
    std::string name;
    double lo;
    double hi;
    bool log_scale;
};

/// Box constraints for one model's parameter vector.
///   ads:   alpha, beta, delta, epsilon
///   sabr:  alpha0, rho, nu
///   fsabr: alpha0, rho, nu, hurst
struct SearchSpace {
    Model model = Model::Ads;
    std::vector<ParamBound> bounds;

    static SearchSpace defaults(Model model);
    [[nodiscard]] std::size_t dim() const { return bounds.size(); }
    [[nodiscard]] bool contains(const std::vector<double>& params) const;
    /// Maps a point of the unit cube onto the box (log-uniform where flagged).
    [[nodiscard]] std::vector<double> from_unit(const std::vector<double>& u) const;
    [[nodiscard]] std::vector<double> to_unit(const std::vector<double>& params) const;
    [[nodiscard]] std::vector<std::string> names() const;
};

struct Trial {
    std::size_t index = 0;
    std::vector<double> params;
    double objective = 0.0;
    /// The final entry of a history is the polish result.
    bool polish = false;
};

struct FitResult {
    Model model = Model::Ads;
    std::vector<double> params;
    double rmse = 0.0;  // min over history
    /// RMSE reported for the fit: equals `rmse` except for fSABR, where it is
    /// re-evaluated with 4x the calibration paths.
    double reported_rmse = 0.0;
    std::vector<Trial> history;
    std::size_t n_trials = 0;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;  // not serialized
};

class CalibrationFailed : public Error {
public:
    CalibrationFailed(const std::string& what, std::vector<Trial> history)
        : Error(what), history_(std::move(history)) {}
    [[nodiscard]] const std::vector<Trial>& history() const { return history_; }

private:
    std::vector<Trial> history_;
};

struct Options {
    /// MC settings for fSABR objectives; seed is overridden by the run seed.
    baselines::McConfig mc{4096, 32, 0, 1};
    unsigned workers = 0;
    /// Nelder-Mead evaluation budget; 0 selects a per-model default.
    std::size_t polish_max_evals = 0;
    double gamma = 0.25;
    std::size_t n_candidates = 24;
};

/// Pricing context implied by a slice (t = 0, T = tau).
pricing::PricingContext context_of(const marketdata::QuoteSlice& slice);

ads::AdsParams ads_params(const marketdata::QuoteSlice& slice, const std::vector<double>& v);
baselines::SabrParams sabr_params(const std::vector<double>& v);
baselines::FsabrParams fsabr_params(const std::vector<double>& v);

/// Model implied vols at every slice point. For fSABR, strikes the MC
/// smile drops come back as NaN.
std::vector<double> model_smile(const marketdata::QuoteSlice& slice, Model model,
                                const std::vector<double>& params,
                                const baselines::McConfig& mc = {});

/// RMSE between model and observed implied vols. Evaluation failures give
/// kPenalty. fSABR uses the strikes its MC smile keeps and is penalized when
/// fewer than 3 survive.
double rmse_objective(const marketdata::QuoteSlice& slice, Model model,
                      const std::vector<double>& params, const baselines::McConfig& mc = {});

/// Bounded Nelder-Mead on the unit cube. Never returns a point worse than `start`.
struct PolishResult {
    std::vector<double> x;
    double value;
    std::size_t evaluations;
};
PolishResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                         std::vector<double> start, double start_value, std::size_t max_evals,
                         double step = 0.05);

/// Quasi-random exploration (ceil(n_trials/4) shifted-Halton trials), then
/// TPE sampling with a gamma-quantile good/bad split, then a Nelder-Mead
/// polish from the best trial. Deterministic in seed.
FitResult calibrate(const marketdata::QuoteSlice& slice, const SearchSpace& space,
                    std::size_t n_trials, std::uint64_t seed, const Options& options = {});

struct ModelOutcome {
    std::optional<FitResult> fit;
    std::string error;
};

/// Runs calibrate for each model with the same budget and seed.
std::map<Model, ModelOutcome> calibrate_all(const marketdata::QuoteSlice& slice,
                                            std::size_t n_trials, std::uint64_t seed,
                                            const Options& options = {},
                                            const std::vector<Model>& models = {Model::Ads,
                                                                                Model::Sabr,
                                                                                Model::Fsabr});

}  // namespace adsvol::calibration
