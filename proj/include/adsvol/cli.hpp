#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "adsvol/baselines.hpp"
#include "adsvol/calibration.hpp"
#include "adsvol/metrics.hpp"

namespace adsvol::cli {

enum ExitCode : int { kOk = 0, kPartialFailure = 1, kConfigError = 2 };

struct GridOverrides {
    std::size_t n_core = 200;
    std::size_t n_tail = 50;
};

/// Everything a run depends on. Precedence: flags > JSON config > defaults.
struct RunConfig {
    std::string command;
    std::vector<std::filesystem::path> inputs;
    std::filesystem::path outdir = "out";
    std::vector<calibration::Model> models{calibration::Model::Ads, calibration::Model::Sabr,
                                           calibration::Model::Fsabr};
    std::size_t n_trials = 100;
    std::uint64_t seed = 42;
    /// n_paths 0 picks the command default (4096 for calibrate, 10000 for simulate).
    baselines::McConfig mc{0, 32, 42, 0};
    metrics::CurvatureMode curvature = metrics::CurvatureMode::Printed;
    GridOverrides grid;
    // simulate / check context
    std::optional<double> spot;
    std::optional<double> rate;
    std::optional<double> tau;
    std::vector<double> strikes;
    std::optional<std::filesystem::path> params;
    std::optional<baselines::FsabrParams> fsabr;
    /// Thread count; never serialized, outputs do not depend on it.
    unsigned workers = 0;

    /// Throws InvalidArgument on n_trials < 1, empty model set, bad MC sizes.
    void validate() const;
};

/// Provenance form of the config (workers omitted).
nlohmann::ordered_json to_json(const RunConfig& cfg);
/// Overlays the keys of a JSON config file onto `cfg`.
void apply_json(RunConfig& cfg, const nlohmann::ordered_json& j);

/// Per-ticker calibration: `<outdir>/<ticker>/<model>.fit.json`,
/// `<ticker>/metrics.csv`, `<ticker>/smile.csv`, plus `<outdir>/metrics.csv`.
/// Returns kOk unless every slice failed.
int cmd_calibrate(const RunConfig& cfg, std::ostream& log);

/// Summary table, per-metric long-format CSVs and smile SVGs from metric files.
int cmd_report(const RunConfig& cfg, std::ostream& log);

/// fSABR Monte Carlo smile with standard errors and the Hagan column.
int cmd_simulate(const RunConfig& cfg, std::ostream& log);

/// Arbitrage report for an AdS surface. kOk iff every check passes.
int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& log);

/// Parses argv and dispatches. Errors in parsing or configuration give kConfigError.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Display name used in tables: AdS, SABR, fSABR.
std::string display_name(calibration::Model m);

/// Column header of metric tables: Ticker, AdS_MSE, ..., fSABR_ACE.
std::vector<std::string> metric_columns();

struct MetricRow {
    std::string ticker;
    std::vector<std::optional<double>> values;  // 12 cells, model-major
};

/// Reads a metric table; lines starting with '#' are skipped.
std::vector<MetricRow> read_metric_table(const std::filesystem::path& path);

}  // namespace adsvol::cli
