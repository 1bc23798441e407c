#include "adsvol/calibration.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "adsvol/parallel.hpp"
#include "adsvol/pricing.hpp"

namespace adsvol::calibration {

namespace {

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};

// Stream ids for the run's RNG streams.
constexpr std::uint64_t kExploreStream = 0x4558504cULL;
constexpr std::uint64_t kTpeStream = 0x545045ULL;

double radical_inverse(std::size_t index, unsigned base) {
    double result = 0.0;
    double f = 1.0 / base;
    while (index > 0) {
        result += f * static_cast<double>(index % base);
        index /= base;
        f /= base;
    }
    return result;
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

/// Product of per-dimension Gaussians truncated to [0, 1].
struct ParzenEstimator {
    std::vector<std::vector<double>> means;  // component centers; the last one is the prior
    std::vector<double> sigmas;              // per-component bandwidth (shared across dims)

    ParzenEstimator(const std::vector<std::vector<double>>& points, std::size_t dim) {
        const auto n = static_cast<double>(points.size());
        const double bw = std::max(0.2 * std::pow(std::max(n, 1.0), -1.0 / (dim + 4.0)), 1e-3);
        for (const auto& p : points) {
            means.push_back(p);
            sigmas.push_back(bw);
        }
        means.emplace_back(dim, 0.5);
        sigmas.push_back(1.0);
    }

    static double log_truncated_normal(double x, double mu, double s) {
        const double z = (x - mu) / s;
        const double mass = pricing::norm_cdf((1.0 - mu) / s) - pricing::norm_cdf(-mu / s);
        return -0.5 * z * z - std::log(s * std::sqrt(2.0 * std::numbers::pi)) - std::log(std::max(mass, 1e-300));
    }

    [[nodiscard]] double log_density(const std::vector<double>& x) const {
        const auto k = static_cast<double>(means.size());
        double max_term = -std::numeric_limits<double>::infinity();
        std::vector<double> terms(means.size());
        for (std::size_t c = 0; c < means.size(); ++c) {
            double lp = 0.0;
            for (std::size_t d = 0; d < x.size(); ++d)
                lp += log_truncated_normal(x[d], means[c][d], sigmas[c]);
            terms[c] = lp;
            max_term = std::max(max_term, lp);
        }
        double sum = 0.0;
        for (double t : terms) sum += std::exp(t - max_term);
        return max_term + std::log(sum / k);
    }

    std::vector<double> sample(CounterRng& rng) const {
        const auto c = static_cast<std::size_t>(rng.uniform() * static_cast<double>(means.size()));
        const auto& mu = means[std::min(c, means.size() - 1)];
        const double s = sigmas[std::min(c, means.size() - 1)];
        std::vector<double> x(mu.size());
        for (std::size_t d = 0; d < mu.size(); ++d) {
            double v = mu[d] + s * rng.normal();
            for (int attempt = 0; attempt < 64 && (v < 0.0 || v > 1.0); ++attempt)
                v = mu[d] + s * rng.normal();
            x[d] = clamp01(v);
        }
        return x;
    }
};

std::size_t default_polish_budget(Model m) {
    switch (m) {
        case Model::Ads: return 4000;
        case Model::Sabr: return 2000;
        case Model::Fsabr: return 300;
    }
    return 1000;
}

}  // namespace

std::string to_string(Model m) {
    switch (m) {
        case Model::Ads: return "ads";
        case Model::Sabr: return "sabr";
        case Model::Fsabr: return "fsabr";
    }
    return "unknown";
}

Model parse_model(const std::string& name) {
    if (name == "ads") return Model::Ads;
    if (name == "sabr") return Model::Sabr;
    if (name == "fsabr") return Model::Fsabr;
    throw InvalidArgument("unknown model '" + name + "' (ads|sabr|fsabr)");
}

SearchSpace SearchSpace::defaults(Model model) {
    SearchSpace s;
    s.model = model;
    switch (model) {
        case Model::Ads:
            s.bounds = {{"alpha", 1e-6, 10.0, true},
                        {"beta", -1.0, 1.0, false},
                        {"delta", 1e-6, 1.0 - 1e-6, false},
                        {"epsilon", 1e-6, 1.0, true}};
            break;
        case Model::Sabr:
            s.bounds = {{"alpha0", 1e-4, 5.0, true},
                        {"rho", -0.999, 0.999, false},
                        {"nu", 0.0, 5.0, false}};
            break;
        case Model::Fsabr:
            s.bounds = {{"alpha0", 1e-4, 5.0, true},
                        {"rho", -0.999, 0.999, false},
                        {"nu", 0.0, 5.0, false},
                        {"hurst", 0.01, 0.99, false}};
            break;
    }
    return s;
}

bool SearchSpace::contains(const std::vector<double>& params) const {
    if (params.size() != bounds.size()) return false;
    for (std::size_t i = 0; i < params.size(); ++i)
        if (!(params[i] >= bounds[i].lo && params[i] <= bounds[i].hi)) return false;
    return true;
}

std::vector<double> SearchSpace::from_unit(const std::vector<double>& u) const {
    std::vector<double> out(bounds.size());
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        const auto& b = bounds[i];
        const double x = clamp01(u[i]);
        double v = b.log_scale ? std::exp(std::log(b.lo) + x * (std::log(b.hi) - std::log(b.lo)))
                               : b.lo + x * (b.hi - b.lo);
        out[i] = std::clamp(v, b.lo, b.hi);
    }
    return out;
}

std::vector<double> SearchSpace::to_unit(const std::vector<double>& params) const {
    std::vector<double> out(bounds.size());
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        const auto& b = bounds[i];
        const double v = std::clamp(params[i], b.lo, b.hi);
        out[i] = b.log_scale ? (std::log(v) - std::log(b.lo)) / (std::log(b.hi) - std::log(b.lo))
                             : (v - b.lo) / (b.hi - b.lo);
    }
    return out;
}

std::vector<std::string> SearchSpace::names() const {
    std::vector<std::string> out;
    for (const auto& b : bounds) out.push_back(b.name);
    return out;
}

pricing::PricingContext context_of(const marketdata::QuoteSlice& slice) {
    return {slice.spot, slice.rate, 0.0, slice.tau};
}

ads::AdsParams ads_params(const marketdata::QuoteSlice& slice, const std::vector<double>& v) {
    if (v.size() != 4) throw InvalidArgument("AdS parameter vector needs 4 entries");
    return {v[0], v[1], v[2], v[3], slice.k_min, slice.spot};
}

baselines::SabrParams sabr_params(const std::vector<double>& v) {
    if (v.size() != 3) throw InvalidArgument("SABR parameter vector needs 3 entries");
    return {v[0], v[1], v[2]};
}

baselines::FsabrParams fsabr_params(const std::vector<double>& v) {
    if (v.size() != 4) throw InvalidArgument("fSABR parameter vector needs 4 entries");
    return {{v[0], v[1], v[2]}, v[3]};
}

std::vector<double> model_smile(const marketdata::QuoteSlice& slice, Model model,
                                const std::vector<double>& params, const baselines::McConfig& mc) {
    std::vector<double> out;
    out.reserve(slice.points.size());
    const auto ctx = context_of(slice);
    switch (model) {
        case Model::Ads: {
            const auto p = ads_params(slice, params);
            ads::validate(p);
            for (const auto& pt : slice.points) out.push_back(ads::sigma(pt.moneyness, p));
            break;
        }
        case Model::Sabr: {
            const auto p = sabr_params(params);
            for (const auto& pt : slice.points)
                out.push_back(baselines::sabr_implied_vol(ctx, pt.strike, p));
            break;
        }
        case Model::Fsabr: {
            const auto p = fsabr_params(params);
            const auto strikes = slice.strikes();
            const auto smile = baselines::fsabr_smile(ctx, strikes, p, mc);
            std::size_t j = 0;
            for (double k : strikes) {
                if (j < smile.points.size() && smile.points[j].strike == k) {
                    out.push_back(smile.points[j].implied_vol);
                    ++j;
                } else {
                    out.push_back(std::numeric_limits<double>::quiet_NaN());
                }
            }
            break;
        }
    }
    return out;
}

double rmse_objective(const marketdata::QuoteSlice& slice, Model model,
                      const std::vector<double>& params, const baselines::McConfig& mc) {
    try {
        const auto fit = model_smile(slice, model, params, mc);
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < fit.size(); ++i) {
            if (std::isnan(fit[i])) continue;
            const double d = fit[i] - slice.points[i].iv;
            sum += d * d;
            ++n;
        }
        if (n < 3) return kPenalty;
        const double r = std::sqrt(sum / static_cast<double>(n));
        return std::isfinite(r) ? r : kPenalty;
    } catch (const Error&) {
        return kPenalty;
    }
}

PolishResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                         std::vector<double> start, double start_value, std::size_t max_evals,
                         double step) {
    const std::size_t d = start.size();
    std::size_t evals = 0;
    auto eval = [&](std::vector<double>& x) {
        for (auto& v : x) v = clamp01(v);
        ++evals;
        return f(x);
    };

    std::vector<std::vector<double>> simplex{start};
    std::vector<double> values{start_value};
    for (std::size_t i = 0; i < d; ++i) {
        auto x = start;
        x[i] += x[i] + step <= 1.0 ? step : -step;
        values.push_back(eval(x));
        simplex.push_back(std::move(x));
    }

    std::vector<std::size_t> order(d + 1);
    while (evals < max_evals) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[d - 1];
        double spread = 0.0;
        for (std::size_t i = 0; i <= d; ++i)
            for (std::size_t k = 0; k < d; ++k)
                spread = std::max(spread, std::abs(simplex[i][k] - simplex[best][k]));
        if (spread < 1e-12 || values[worst] - values[best] <= 1e-15 * std::abs(values[best]))
            break;

        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i <= d; ++i)
            if (i != worst)
                for (std::size_t k = 0; k < d; ++k) centroid[k] += simplex[i][k] / static_cast<double>(d);
        auto along = [&](double coef) {
            std::vector<double> x(d);
            for (std::size_t k = 0; k < d; ++k)
                x[k] = centroid[k] + coef * (simplex[worst][k] - centroid[k]);
            return x;
        };

        auto xr = along(-1.0);
        const double fr = eval(xr);
        if (fr < values[best]) {
            auto xe = along(-2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[worst] = std::move(xe);
                values[worst] = fe;
            } else {
                simplex[worst] = std::move(xr);
                values[worst] = fr;
            }
            continue;
        }
        if (fr < values[second]) {
            simplex[worst] = std::move(xr);
            values[worst] = fr;
            continue;
        }
        const bool outside = fr < values[worst];
        auto xc = along(outside ? -0.5 : 0.5);
        const double fc = eval(xc);
        if (fc < (outside ? fr : values[worst])) {
            simplex[worst] = std::move(xc);
            values[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= d; ++i) {
            if (i == best) continue;
            for (std::size_t k = 0; k < d; ++k)
                simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
            values[i] = eval(simplex[i]);
        }
    }
    const auto it = std::min_element(values.begin(), values.end());
    const auto idx = static_cast<std::size_t>(it - values.begin());
    if (values[idx] < start_value) return {simplex[idx], values[idx], evals};
    return {start, start_value, evals};
}

FitResult calibrate(const marketdata::QuoteSlice& slice, const SearchSpace& space,
                    std::size_t n_trials, std::uint64_t seed, const Options& options) {
    if (n_trials < 1) throw InvalidArgument("n_trials must be >= 1");
    if (space.dim() == 0 || space.dim() > std::size(kPrimes))
        throw InvalidArgument("search space dimension out of range");
    const auto started = std::chrono::steady_clock::now();
    const std::size_t dim = space.dim();
    baselines::McConfig mc = options.mc;
    mc.seed = seed;

    auto objective_unit = [&](const std::vector<double>& u, unsigned mc_workers) {
        baselines::McConfig local = mc;
        local.workers = mc_workers;
        return rmse_objective(slice, space.model, space.from_unit(u), local);
    };

    std::vector<Trial> history;
    std::vector<std::vector<double>> unit_points;
    history.reserve(n_trials + 1);

    // Exploration: shifted Halton points, evaluated in parallel.
    const std::size_t n_explore = std::min(n_trials, (n_trials + 3) / 4);
    CounterRng explore_rng(seed, kExploreStream);
    std::vector<double> shift(dim);
    for (auto& s : shift) s = explore_rng.uniform();
    unit_points.resize(n_explore);
    for (std::size_t i = 0; i < n_explore; ++i) {
        unit_points[i].resize(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            double u = radical_inverse(i + 1, kPrimes[d]) + shift[d];
            unit_points[i][d] = u - std::floor(u);
        }
    }
    std::vector<double> explore_values(n_explore);
    parallel_for(n_explore, options.workers,
                 [&](std::size_t i) { explore_values[i] = objective_unit(unit_points[i], 1); });
    for (std::size_t i = 0; i < n_explore; ++i)
        history.push_back({i, space.from_unit(unit_points[i]), explore_values[i], false});

    // TPE phase.
    CounterRng tpe_rng(seed, kTpeStream);
    for (std::size_t t = n_explore; t < n_trials; ++t) {
        std::vector<std::size_t> order(history.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return history[a].objective < history[b].objective;
        });
        const auto n_good = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(options.gamma * static_cast<double>(order.size()))));
        std::vector<std::vector<double>> good, bad;
        for (std::size_t r = 0; r < order.size(); ++r)
            (r < n_good ? good : bad).push_back(unit_points[order[r]]);
        const ParzenEstimator l(good, dim);
        const ParzenEstimator g(bad, dim);

        std::vector<double> best_x;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < options.n_candidates; ++c) {
            auto x = l.sample(tpe_rng);
            const double score = l.log_density(x) - g.log_density(x);
            if (score > best_score) {
                best_score = score;
                best_x = std::move(x);
            }
        }
        const double value = objective_unit(best_x, mc.workers);
        history.push_back({t, space.from_unit(best_x), value, false});
        unit_points.push_back(std::move(best_x));
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < history.size(); ++i)
        if (history[i].objective < history[best].objective) best = i;
    if (history[best].objective >= kPenalty)
        throw CalibrationFailed(to_string(space.model) + " calibration failed: every trial was penalized",
                                history);

    // Polish, restarting from the incumbent while it keeps improving.
    const std::size_t budget =
        options.polish_max_evals ? options.polish_max_evals : default_polish_budget(space.model);
    std::vector<double> x = unit_points[best];
    double fx = history[best].objective;
    std::size_t used = 0;
    double step = 0.05;
    while (used < budget) {
        auto res = nelder_mead([&](const std::vector<double>& u) { return objective_unit(u, mc.workers); },
                               x, fx, budget - used, step);
        used += res.evaluations;
        const bool improved = res.value < fx * (1.0 - 1e-9);
        x = std::move(res.x);
        fx = res.value;
        if (!improved) {
            if (step < 1e-3) break;
            step *= 0.1;
        }
    }
    history.push_back({n_trials, space.from_unit(x), fx, true});

    FitResult result;
    result.model = space.model;
    result.params = history.back().params;
    result.rmse = fx;
    result.reported_rmse = fx;
    if (space.model == Model::Fsabr) {
        baselines::McConfig final_mc = mc;
        final_mc.n_paths *= 4;
        result.reported_rmse = rmse_objective(slice, space.model, result.params, final_mc);
    }
    result.history = std::move(history);
    result.n_trials = n_trials;
    result.seed = seed;
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

std::map<Model, ModelOutcome> calibrate_all(const marketdata::QuoteSlice& slice,
                                            std::size_t n_trials, std::uint64_t seed,
                                            const Options& options, const std::vector<Model>& models) {
    if (n_trials < 1) throw InvalidArgument("n_trials must be >= 1");
    std::map<Model, ModelOutcome> out;
    for (Model m : models) {
        ModelOutcome outcome;
        try {
            outcome.fit = calibrate(slice, SearchSpace::defaults(m), n_trials, seed, options);
        } catch (const Error& e) {
            outcome.error = e.what();
        }
        out.emplace(m, std::move(outcome));
    }
    return out;
}

}  // namespace adsvol::calibration
