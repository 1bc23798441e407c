#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "adsvol/ads.hpp"
#include "adsvol/arbitrage.hpp"
#include "adsvol/baselines.hpp"
#include "adsvol/calibration.hpp"
#include "adsvol/metrics.hpp"

namespace adsvol::io {

using nlohmann::ordered_json;

/// Flat object {alpha, beta, delta, epsilon, k_min, spot}.
ordered_json to_json(const ads::AdsParams& p);
ads::AdsParams ads_params_from_json(const ordered_json& j);

ordered_json to_json(const baselines::SabrParams& p);
ordered_json to_json(const baselines::FsabrParams& p);
baselines::FsabrParams fsabr_params_from_json(const ordered_json& j);

ordered_json to_json(const baselines::McConfig& mc);
/// Overlays the keys present in `j` (n_paths, n_steps, seed) onto `base`.
baselines::McConfig mc_config_from_json(const ordered_json& j, baselines::McConfig base);

/// {model, params, rmse, n_trials, seed, history:[{index, params, objective}]}
/// plus reported_rmse. Wall time is left out so reruns compare byte-equal.
ordered_json to_json(const calibration::FitResult& fit);
calibration::FitResult fit_result_from_json(const ordered_json& j);

ordered_json to_json(const metrics::MetricReport& r);
ordered_json to_json(const arbitrage::Verdict& v);
ordered_json to_json(const arbitrage::ArbReport& r);

/// Reads a whole file; throws ParseError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
ordered_json read_json(const std::filesystem::path& path);

/// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

}  // namespace adsvol::io
