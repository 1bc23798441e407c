#include "adsvol/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "adsvol/arbitrage.hpp"
#include "adsvol/errors.hpp"
#include "adsvol/io.hpp"
#include "adsvol/marketdata.hpp"
#include "adsvol/parallel.hpp"
#include "adsvol/pricing.hpp"
#include "adsvol/svg.hpp"

namespace adsvol::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr std::size_t kCalibratePaths = 4096;
constexpr std::size_t kSimulatePaths = 10000;

std::size_t resolved_paths(const RunConfig& cfg) {
    if (cfg.mc.n_paths > 0) return cfg.mc.n_paths;
    return cfg.command == "simulate" ? kSimulatePaths : kCalibratePaths;
}

std::string cell(double v) { return std::isfinite(v) ? io::format_double(v) : std::string(); }

std::string provenance_line(const RunConfig& cfg) {
    return "# adsvol " + cfg.command + " config=" + to_json(cfg).dump() + "\n";
}

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ParseError("cannot parse " + what + " '" + text + "'");
    }
}

std::vector<calibration::Model> parse_models(const std::string& list) {
    std::vector<calibration::Model> out;
    for (const auto& raw : split(list, ',')) {
        const auto name = trim(raw);
        if (name.empty()) continue;
        const auto m = calibration::parse_model(name);
        if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    return out;
}

std::vector<double> parse_strikes(const std::string& list) {
    std::vector<double> out;
    for (const auto& raw : split(list, ',')) {
        const auto t = trim(raw);
        if (!t.empty()) out.push_back(parse_number(t, "strike"));
    }
    return out;
}

std::string safe_name(const std::string& s) {
    std::string out;
    for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
    return out.empty() ? "_" : out;
}

class Log {
public:
    explicit Log(std::ostream& os) : os_(os) {}
    void operator()(const std::string& line) {
        std::lock_guard lock(mu_);
        os_ << line << '\n';
    }

private:
    std::ostream& os_;
    std::mutex mu_;
};

}  // namespace

std::string display_name(calibration::Model m) {
    switch (m) {
        case calibration::Model::Ads: return "AdS";
        case calibration::Model::Sabr: return "SABR";
        case calibration::Model::Fsabr: return "fSABR";
    }
    return "unknown";
}

std::vector<std::string> metric_columns() {
    std::vector<std::string> cols{"Ticker"};
    for (auto m : calibration::kAllModels)
        for (const char* metric : metrics::kMetricNames) cols.push_back(display_name(m) + "_" + metric);
    return cols;
}

void RunConfig::validate() const {
    if (n_trials < 1) throw InvalidArgument("n_trials must be >= 1");
    if (models.empty()) throw InvalidArgument("model set is empty");
    if (mc.n_steps < 1) throw InvalidArgument("n_steps must be >= 1");
    if (grid.n_core < 50) throw InvalidArgument("grid core size must be >= 50");
    if (spot && !(*spot > 0.0)) throw InvalidArgument("spot must be > 0");
    if (tau && !(*tau > 0.0)) throw InvalidArgument("tau must be > 0");
    if (rate && !std::isfinite(*rate)) throw InvalidArgument("rate must be finite");
    for (double k : strikes)
        if (!(k > 0.0)) throw InvalidArgument("strikes must be > 0");
    if (fsabr) baselines::validate(*fsabr);
}

ordered_json to_json(const RunConfig& cfg) {
    ordered_json inputs = ordered_json::array();
    for (const auto& p : cfg.inputs) inputs.push_back(p.generic_string());
    ordered_json models = ordered_json::array();
    for (auto m : cfg.models) models.push_back(calibration::to_string(m));
    ordered_json j{{"command", cfg.command},
                   {"input", std::move(inputs)},
                   {"outdir", cfg.outdir.generic_string()},
                   {"models", std::move(models)},
                   {"trials", cfg.n_trials},
                   {"seed", cfg.seed},
                   {"paths", resolved_paths(cfg)},
                   {"steps", cfg.mc.n_steps},
                   {"curvature", metrics::to_string(cfg.curvature)},
                   {"grid", {{"n_core", cfg.grid.n_core}, {"n_tail", cfg.grid.n_tail}}}};
    if (cfg.spot) j["spot"] = *cfg.spot;
    if (cfg.rate) j["rate"] = *cfg.rate;
    if (cfg.tau) j["tau"] = *cfg.tau;
    if (!cfg.strikes.empty()) j["strikes"] = cfg.strikes;
    if (cfg.params) j["params"] = cfg.params->generic_string();
    if (cfg.fsabr) j["fsabr"] = io::to_json(*cfg.fsabr);
    return j;
}

void apply_json(RunConfig& cfg, const ordered_json& j) {
    if (!j.is_object()) throw ParseError("config must be a JSON object");
    try {
        if (j.contains("input")) {
            cfg.inputs.clear();
            if (j["input"].is_array())
                for (const auto& p : j["input"]) cfg.inputs.emplace_back(p.get<std::string>());
            else
                cfg.inputs.emplace_back(j["input"].get<std::string>());
        }
        if (j.contains("outdir")) cfg.outdir = j["outdir"].get<std::string>();
        if (j.contains("models")) {
            if (j["models"].is_array()) {
                cfg.models.clear();
                for (const auto& m : j["models"]) {
                    const auto model = calibration::parse_model(m.get<std::string>());
                    if (std::find(cfg.models.begin(), cfg.models.end(), model) == cfg.models.end())
                        cfg.models.push_back(model);
                }
            } else {
                cfg.models = parse_models(j["models"].get<std::string>());
            }
        }
        if (j.contains("trials")) {
            const auto v = j["trials"].get<long long>();
            if (v < 1) throw InvalidArgument("trials must be >= 1");
            cfg.n_trials = static_cast<std::size_t>(v);
        }
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("paths")) cfg.mc.n_paths = j["paths"].get<std::size_t>();
        if (j.contains("steps")) cfg.mc.n_steps = j["steps"].get<std::size_t>();
        if (j.contains("mc")) cfg.mc = io::mc_config_from_json(j["mc"], cfg.mc);
        if (j.contains("curvature")) cfg.curvature = metrics::parse_curvature_mode(j["curvature"].get<std::string>());
        if (j.contains("grid")) {
            cfg.grid.n_core = j["grid"].value("n_core", cfg.grid.n_core);
            cfg.grid.n_tail = j["grid"].value("n_tail", cfg.grid.n_tail);
        }
        if (j.contains("spot")) cfg.spot = j["spot"].get<double>();
        if (j.contains("rate")) cfg.rate = j["rate"].get<double>();
        if (j.contains("tau")) cfg.tau = j["tau"].get<double>();
        if (j.contains("strikes")) cfg.strikes = j["strikes"].get<std::vector<double>>();
        if (j.contains("params")) cfg.params = fs::path(j["params"].get<std::string>());
        if (j.contains("fsabr")) cfg.fsabr = io::fsabr_params_from_json(j["fsabr"]);
        if (j.contains("workers")) cfg.workers = j["workers"].get<unsigned>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad config value: ") + e.what());
    }
}

std::vector<MetricRow> read_metric_table(const fs::path& path) {
    std::istringstream in(io::read_file(path));
    const auto cols = metric_columns();
    std::vector<MetricRow> rows;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto fields = split(line, ',');
        if (!header_seen) {
            for (auto& f : fields) f = trim(f);
            if (fields != cols)
                throw ParseError(path.string() + ": header must be " + join(cols, ','));
            header_seen = true;
            continue;
        }
        if (fields.size() != cols.size())
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(cols.size()) + " fields");
        MetricRow row{trim(fields[0]), {}};
        for (std::size_t i = 1; i < fields.size(); ++i) {
            const auto t = trim(fields[i]);
            if (t.empty()) {
                row.values.emplace_back();
                continue;
            }
            const double v = parse_number(t, path.string() + ":" + std::to_string(lineno) + " " + cols[i]);
            if (!(v >= 0.0)) throw ParseError(path.string() + ":" + std::to_string(lineno) + ": negative metric");
            row.values.emplace_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (!header_seen) throw ParseError(path.string() + ": no header row");
    return rows;
}

// ---------------------------------------------------------------- calibrate

namespace {

struct SliceJob {
    marketdata::SliceKey key;
    std::string dir;
};

struct SliceOutcome {
    bool ok = false;
    std::string row;  // metrics row, empty on failure
};

std::string metrics_header() { return join(metric_columns(), ',') + "\n"; }

SliceOutcome run_slice(const RunConfig& cfg, const std::vector<marketdata::OptionQuoteRow>& rows,
                       const SliceJob& job, unsigned inner_workers, Log& log) {
    SliceOutcome outcome;
    const auto label = job.key.ticker + " " + marketdata::format_date(job.key.expiry);
    marketdata::QuoteSlice slice;
    try {
        slice = marketdata::build_slice(marketdata::filter_ticker(rows, job.key.ticker), job.key.expiry);
    } catch (const Error& e) {
        log("skip " + label + ": " + e.what());
        return outcome;
    }
    if (!slice.duplicate_strikes.empty())
        log("note " + label + ": dropped " + std::to_string(slice.duplicate_strikes.size()) + " duplicate strike(s)");

    calibration::Options opts;
    opts.mc.n_paths = resolved_paths(cfg);
    opts.mc.n_steps = cfg.mc.n_steps;
    opts.workers = inner_workers;
    opts.mc.workers = inner_workers;
    const auto outcomes = calibration::calibrate_all(slice, cfg.n_trials, cfg.seed, opts, cfg.models);

    const fs::path dir = cfg.outdir / job.dir;
    const auto obs_m = slice.moneyness();
    const auto obs_iv = slice.ivs();
    const auto config_json = to_json(cfg);

    std::map<calibration::Model, std::vector<double>> smiles;
    std::map<calibration::Model, metrics::MetricReport> reports;
    for (auto model : cfg.models) {
        const auto& oc = outcomes.at(model);
        const auto name = calibration::to_string(model);
        if (!oc.fit) {
            log("fail " + label + " " + name + ": " + oc.error);
            continue;
        }
        const auto& fit = *oc.fit;
        baselines::McConfig eval_mc = opts.mc;
        eval_mc.seed = cfg.seed;
        eval_mc.n_paths *= 4;
        std::vector<double> smile;
        try {
            smile = calibration::model_smile(slice, model, fit.params, eval_mc);
        } catch (const Error& e) {
            log("fail " + label + " " + name + ": " + e.what());
            continue;
        }
        metrics::SmileCurve obs, mod;
        for (std::size_t i = 0; i < smile.size(); ++i) {
            if (!std::isfinite(smile[i])) continue;
            obs.m.push_back(obs_m[i]);
            obs.sigma.push_back(obs_iv[i]);
            mod.m.push_back(obs_m[i]);
            mod.sigma.push_back(smile[i]);
        }
        if (obs.size() < 3) {
            log("fail " + label + " " + name + ": fewer than 3 strikes priced");
            continue;
        }
        reports[model] = metrics::evaluate(obs, mod, cfg.curvature);
        smiles[model] = smile;

        ordered_json doc{{"config", config_json},
                         {"ticker", slice.ticker},
                         {"quote_date", marketdata::format_date(slice.quote_date)},
                         {"expiry", marketdata::format_date(slice.expiry)}};
        const auto fit_json = io::to_json(fit);
        for (const auto& [k, v] : fit_json.items()) doc[k] = v;
        doc["metrics"] = io::to_json(reports[model]);
        if (model == calibration::Model::Ads) {
            auto surface = io::to_json(calibration::ads_params(slice, fit.params));
            surface["rate"] = slice.rate;
            surface["tau"] = slice.tau;
            doc["surface"] = std::move(surface);
        }
        io::write_file_atomic(dir / (name + ".fit.json"), doc.dump(2) + "\n");
    }
    if (reports.empty()) return outcome;

    std::vector<std::string> cells{slice.ticker};
    for (auto model : calibration::kAllModels) {
        auto it = reports.find(model);
        const auto& r = it == reports.end() ? metrics::MetricReport{} : it->second;
        const bool have = it != reports.end();
        for (double v : {r.mse, r.mae, r.rmsce, r.ace}) cells.push_back(have ? cell(v) : std::string());
    }
    outcome.row = join(cells, ',') + "\n";
    io::write_file_atomic(dir / "metrics.csv", provenance_line(cfg) + metrics_header() + outcome.row);

    std::ostringstream smile_csv;
    smile_csv << provenance_line(cfg) << "strike,moneyness,observed_iv";
    for (auto model : calibration::kAllModels)
        if (smiles.count(model)) smile_csv << ',' << display_name(model);
    smile_csv << '\n';
    for (std::size_t i = 0; i < slice.points.size(); ++i) {
        smile_csv << cell(slice.points[i].strike) << ',' << cell(obs_m[i]) << ',' << cell(obs_iv[i]);
        for (auto model : calibration::kAllModels)
            if (smiles.count(model)) smile_csv << ',' << cell(smiles[model][i]);
        smile_csv << '\n';
    }
    io::write_file_atomic(dir / "smile.csv", smile_csv.str());
    outcome.ok = true;
    log("done " + label + " -> " + dir.generic_string());
    return outcome;
}

}  // namespace

int cmd_calibrate(const RunConfig& cfg, std::ostream& log_stream) {
    Log log(log_stream);
    if (cfg.inputs.size() != 1) {
        log("calibrate needs exactly one --input option chain");
        return kConfigError;
    }
    std::vector<marketdata::OptionQuoteRow> rows;
    try {
        rows = marketdata::load_chain(cfg.inputs.front());
    } catch (const Error& e) {
        log(std::string("error: ") + e.what());
        return kConfigError;
    }
    if (rows.empty()) {
        log("error: " + cfg.inputs.front().string() + " has no option rows");
        return kConfigError;
    }

    const auto keys = marketdata::slice_keys(rows);
    std::map<std::string, int> expiries_per_ticker;
    for (const auto& k : keys) ++expiries_per_ticker[k.ticker];
    std::vector<SliceJob> jobs;
    for (const auto& k : keys) {
        auto dir = safe_name(k.ticker);
        if (expiries_per_ticker[k.ticker] > 1) dir += "_" + marketdata::format_date(k.expiry);
        jobs.push_back({k, dir});
    }

    const unsigned workers = cfg.workers ? cfg.workers : default_workers();
    const unsigned outer = static_cast<unsigned>(std::min<std::size_t>(workers, jobs.size()));
    const unsigned inner = std::max(1u, workers / std::max(1u, outer));
    std::vector<SliceOutcome> results(jobs.size());
    parallel_for(jobs.size(), outer, [&](std::size_t i) {
        try {
            results[i] = run_slice(cfg, rows, jobs[i], inner, log);
        } catch (const std::exception& e) {
            log("fail " + jobs[i].key.ticker + ": " + e.what());
        }
    });

    std::string table = provenance_line(cfg) + metrics_header();
    std::size_t n_ok = 0;
    for (const auto& r : results)
        if (r.ok) {
            ++n_ok;
            table += r.row;
        }
    io::write_file_atomic(cfg.outdir / "metrics.csv", table);
    log(std::to_string(n_ok) + "/" + std::to_string(jobs.size()) + " slices calibrated");
    return n_ok == 0 ? kPartialFailure : kOk;
}

// ------------------------------------------------------------------- report

namespace {

std::vector<fs::path> metric_files(const std::vector<fs::path>& inputs) {
    std::vector<fs::path> files;
    for (const auto& in : inputs) {
        if (fs::is_directory(in)) {
            if (fs::exists(in / "metrics.csv")) {
                files.push_back(in / "metrics.csv");
                continue;
            }
            std::vector<fs::path> found;
            for (const auto& e : fs::directory_iterator(in))
                if (e.is_directory() && fs::exists(e.path() / "metrics.csv")) found.push_back(e.path() / "metrics.csv");
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.push_back(in);
        }
    }
    return files;
}

// Smile CSVs for a ticker: next to a per-ticker metric file, or in the ticker
// subdirectories of an aggregate one.
std::vector<fs::path> smile_files(const fs::path& metric_file, const std::string& ticker) {
    const auto dir = metric_file.parent_path();
    if (fs::exists(dir / "smile.csv")) return {dir / "smile.csv"};
    std::vector<fs::path> found;
    if (!fs::is_directory(dir.empty() ? fs::path(".") : dir)) return found;
    const auto prefix = safe_name(ticker);
    for (const auto& e : fs::directory_iterator(dir.empty() ? fs::path(".") : dir)) {
        const auto name = e.path().filename().string();
        if (e.is_directory() && (name == prefix || name.rfind(prefix + "_", 0) == 0) &&
            fs::exists(e.path() / "smile.csv"))
            found.push_back(e.path() / "smile.csv");
    }
    std::sort(found.begin(), found.end());
    return found;
}

// Smile CSV next to a metric file, if the calibrate run wrote one.
std::optional<svg::SmilePlot> smile_plot(const fs::path& smile_path, const std::string& ticker) {
    if (!fs::exists(smile_path)) return std::nullopt;
    std::istringstream in(io::read_file(smile_path));
    std::string line;
    std::vector<std::string> header;
    svg::SmilePlot plot;
    plot.title = ticker + " implied volatility smile";
    plot.observed.label = "observed";
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto f = split(line, ',');
        if (header.empty()) {
            header = f;
            if (header.size() < 3) return std::nullopt;
            for (std::size_t i = 3; i < header.size(); ++i) plot.curves.push_back({header[i], {}, {}});
            continue;
        }
        if (f.size() != header.size()) throw ParseError(smile_path.string() + ": ragged row");
        const double m = parse_number(f[1], "moneyness");
        plot.observed.x.push_back(m);
        plot.observed.y.push_back(parse_number(f[2], "observed_iv"));
        for (std::size_t i = 3; i < f.size(); ++i) {
            plot.curves[i - 3].x.push_back(m);
            plot.curves[i - 3].y.push_back(f[i].empty() ? std::nan("") : parse_number(f[i], header[i]));
        }
    }
    if (header.empty()) return std::nullopt;
    return plot;
}

}  // namespace

int cmd_report(const RunConfig& cfg, std::ostream& log_stream) {
    Log log(log_stream);
    const auto files = metric_files(cfg.inputs);
    if (files.empty()) {
        log("error: report needs at least one metric file (--input)");
        return kConfigError;
    }
    std::vector<MetricRow> rows;
    std::vector<std::pair<fs::path, std::string>> plot_sources;
    try {
        for (const auto& f : files) {
            auto part = read_metric_table(f);
            for (const auto& r : part)
                for (const auto& smile : smile_files(f, r.ticker)) plot_sources.emplace_back(smile, r.ticker);
            rows.insert(rows.end(), part.begin(), part.end());
        }
    } catch (const Error& e) {
        log(std::string("error: ") + e.what());
        return kConfigError;
    }
    if (rows.empty()) {
        log("error: metric files contain no rows");
        return kConfigError;
    }

    const auto cols = metric_columns();
    const std::string prov = provenance_line(cfg);

    std::vector<metrics::ColumnSummary> summaries(cols.size() - 1);
    std::vector<bool> present(cols.size() - 1, false);
    for (std::size_t c = 0; c + 1 < cols.size(); ++c) {
        std::vector<double> values;
        for (const auto& r : rows)
            if (r.values[c]) values.push_back(*r.values[c]);
        if (values.empty()) continue;
        summaries[c] = metrics::summarize_column(values);
        present[c] = true;
    }
    std::ostringstream summary;
    summary << prov << "Statistic";
    for (std::size_t c = 1; c < cols.size(); ++c) summary << ',' << cols[c];
    summary << '\n';
    for (std::size_t s = 0; s < metrics::kStatisticNames.size(); ++s) {
        summary << metrics::kStatisticNames[s];
        for (std::size_t c = 0; c + 1 < cols.size(); ++c) {
            summary << ',';
            if (!present[c]) continue;
            const auto& cs = summaries[c];
            const double v[] = {cs.mean, cs.std, cs.min, cs.q25, cs.q50, cs.q75, cs.max};
            summary << cell(v[s]);
        }
        summary << '\n';
    }
    io::write_file_atomic(cfg.outdir / "summary.csv", summary.str());

    for (std::size_t k = 0; k < metrics::kMetricNames.size(); ++k) {
        std::ostringstream longf;
        longf << prov << "ticker,model,value\n";
        for (std::size_t mi = 0; mi < std::size(calibration::kAllModels); ++mi)
            for (const auto& r : rows) {
                const auto& v = r.values[mi * metrics::kMetricNames.size() + k];
                if (v) longf << r.ticker << ',' << display_name(calibration::kAllModels[mi]) << ',' << cell(*v) << '\n';
            }
        io::write_file_atomic(cfg.outdir / (std::string("violin_") + metrics::kMetricNames[k] + ".csv"), longf.str());
    }

    std::set<std::string> plotted;
    for (const auto& [path, ticker] : plot_sources) {
        try {
            auto plot = smile_plot(path, ticker);
            if (!plot || !plotted.insert(path.generic_string()).second) continue;
            plot->comment = prov.substr(2, prov.size() - 3);
            const auto name = safe_name(path.parent_path().filename().string());
            io::write_file_atomic(cfg.outdir / "plots" / (name + ".svg"), svg::render(*plot));
        } catch (const Error& e) {
            log("skip plot for " + ticker + ": " + e.what());
        }
    }
    log("summarized " + std::to_string(rows.size()) + " row(s) from " + std::to_string(files.size()) + " file(s)");
    return kOk;
}

// ----------------------------------------------------------------- simulate

int cmd_simulate(const RunConfig& cfg, std::ostream& log_stream) {
    Log log(log_stream);
    baselines::FsabrParams p;
    try {
        if (cfg.fsabr) {
            p = *cfg.fsabr;
        } else if (cfg.params) {
            auto j = io::read_json(*cfg.params);
            p = io::fsabr_params_from_json(j.contains("params") ? j["params"] : j);
        } else {
            log("error: simulate needs fSABR parameters (--params or --alpha0/--rho/--nu/--hurst)");
            return kConfigError;
        }
        baselines::validate(p);
    } catch (const Error& e) {
        log(std::string("error: ") + e.what());
        return kConfigError;
    }
    const double spot = cfg.spot.value_or(100.0);
    const pricing::PricingContext ctx{spot, cfg.rate.value_or(0.0), 0.0, cfg.tau.value_or(1.0 / 12.0)};
    std::vector<double> strikes = cfg.strikes;
    if (strikes.empty())
        for (int i = 0; i <= 10; ++i) strikes.push_back(spot * (0.8 + 0.04 * i));
    std::sort(strikes.begin(), strikes.end());

    baselines::McConfig mc = cfg.mc;
    mc.n_paths = resolved_paths(cfg);
    mc.seed = cfg.seed;
    mc.workers = cfg.workers;

    baselines::Smile smile;
    try {
        smile = baselines::fsabr_smile(ctx, strikes, p, mc);
    } catch (const Error& e) {
        log(std::string("error: Monte Carlo failed: ") + e.what());
        return kPartialFailure;
    }
    std::ostringstream os;
    os << provenance_line(cfg) << "strike,moneyness,price,std_error,implied_vol,hagan_iv,status\n";
    std::size_t next = 0;
    for (double k : strikes) {
        const double hagan = baselines::sabr_implied_vol(ctx, k, p.sabr);
        os << cell(k) << ',' << cell(spot / k) << ',';
        if (next < smile.points.size() && smile.points[next].strike == k) {
            const auto& pt = smile.points[next++];
            os << cell(pt.price) << ',' << cell(pt.std_error) << ',' << cell(pt.implied_vol) << ',' << cell(hagan)
               << ",ok\n";
        } else {
            os << ",,," << cell(hagan) << ",dropped\n";
        }
    }
    io::write_file_atomic(cfg.outdir / "simulate.csv", os.str());
    if (!smile.dropped.empty()) {
        log(std::to_string(smile.dropped.size()) + " strike(s) outside the invertible price band");
        return kPartialFailure;
    }
    return kOk;
}

// -------------------------------------------------------------------- check

int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& log_stream) {
    Log log(log_stream);
    const auto params_path = cfg.params ? *cfg.params : (cfg.inputs.empty() ? fs::path() : cfg.inputs.front());
    if (params_path.empty()) {
        log("error: check needs an AdS parameter file (--params)");
        return kConfigError;
    }
    ads::AdsParams params;
    double rate = 0.0, tau = 1.0 / 12.0;
    try {
        auto j = io::read_json(params_path);
        const auto& surface = j.contains("surface") ? j["surface"] : j;
        params = io::ads_params_from_json(surface);
        if (surface.contains("rate")) rate = surface["rate"].get<double>();
        if (surface.contains("tau")) tau = surface["tau"].get<double>();
        if (cfg.spot) params.spot = *cfg.spot;
        if (cfg.rate) rate = *cfg.rate;
        if (cfg.tau) tau = *cfg.tau;
        ads::validate(params);
    } catch (const std::exception& e) {
        log(std::string("error: ") + e.what());
        return kConfigError;
    }

    const pricing::PricingContext ctx{params.spot, rate, 0.0, tau};
    arbitrage::ArbReport rep;
    try {
        const auto grid = arbitrage::default_strike_grid(params, cfg.grid.n_core, cfg.grid.n_tail);
        rep = arbitrage::check_butterfly(ctx, params, grid, {}, cfg.workers);
        rep.maturities = arbitrage::default_maturities(ctx);
        rep.v_calendar = arbitrage::check_calendar(ctx, params, rep.maturities, grid, {}, cfg.workers);
        rep.admissibility = arbitrage::check_admissibility(params, grid);
    } catch (const Error& e) {
        log(std::string("error: ") + e.what());
        return kConfigError;
    }

    ordered_json doc{{"config", to_json(cfg)},
                     {"params", io::to_json(params)},
                     {"rate", rate},
                     {"tau", tau}};
    const auto rep_json = io::to_json(rep);
    for (const auto& [k, v] : rep_json.items()) doc[k] = v;
    io::write_file_atomic(cfg.outdir / "check.json", doc.dump(2) + "\n");

    out << std::left << std::setw(14) << "condition" << std::setw(8) << "verdict" << std::setw(16)
        << "worst" << std::setw(14) << "strike" << std::setw(12) << "maturity" << "failed/nodes\n";
    for (const auto* v : rep.verdicts()) {
        out << std::setw(14) << v->name << std::setw(8) << (v->pass ? "PASS" : "FAIL") << std::setw(16)
            << io::format_double(v->worst_violation) << std::setw(14) << io::format_double(v->strike)
            << std::setw(12) << io::format_double(v->maturity) << v->n_failed << "/" << v->n_nodes;
        if (v->confirmed_by_prices) out << (*v->confirmed_by_prices ? "  confirmed by prices" : "  not confirmed");
        out << '\n';
    }
    const auto& a = *rep.admissibility;
    out << std::setw(14) << "delta_ok" << (a.delta_ok ? "PASS" : "FAIL") << '\n';
    out << std::setw(14) << "beta_ok" << std::setw(8) << (a.beta_ok ? "PASS" : "FAIL")
        << "margin " << io::format_double(a.beta_margin) << " (bound " << io::format_double(a.min_bound) << " at m "
        << io::format_double(a.min_bound_m) << ")\n";
    out << (rep.all_pass() ? "arbitrage-free on the checked grid\n" : "violations found\n");
    return rep.all_pass() ? kOk : kPartialFailure;
}

// ---------------------------------------------------------------------- run

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"AdS implied volatility toolkit: calibration, metrics, fSABR simulation, arbitrage checks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "adsvol 0.1.0");

    struct Flags {
        std::vector<std::string> input;
        std::string outdir, models, curvature, config, strikes, params;
        long long trials = 0;
        std::uint64_t seed = 0;
        std::size_t paths = 0, steps = 0, grid_core = 0, grid_tail = 0;
        unsigned workers = 0;
        double spot = 0, rate = 0, tau = 0, alpha0 = 0, rho = 0, nu = 0, hurst = 0;
    } f;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--input,-i", f.input, "input file(s) or directories");
        sub->add_option("--outdir,-o", f.outdir, "output directory");
        sub->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", f.seed, "random seed");
        sub->add_option("--workers", f.workers, "worker threads (0 = all cores)");
    };
    auto add_mc = [&](CLI::App* sub) {
        sub->add_option("--paths", f.paths, "Monte Carlo paths")->check(CLI::PositiveNumber);
        sub->add_option("--steps", f.steps, "Monte Carlo time steps")->check(CLI::PositiveNumber);
    };

    auto* cal = app.add_subcommand("calibrate", "calibrate AdS, SABR and fSABR per ticker slice");
    add_common(cal);
    add_mc(cal);
    cal->add_option("--models", f.models, "comma list of ads,sabr,fsabr");
    cal->add_option("--trials", f.trials, "optimizer trials per model (>= 1)");
    cal->add_option("--curvature", f.curvature, "printed | weighted");

    auto* rep = app.add_subcommand("report", "summary statistics, violin data and smile plots");
    add_common(rep);

    auto* sim = app.add_subcommand("simulate", "fSABR Monte Carlo smile");
    add_common(sim);
    add_mc(sim);
    sim->add_option("--params", f.params, "JSON file with alpha0, rho, nu, hurst");
    sim->add_option("--alpha0", f.alpha0);
    sim->add_option("--rho", f.rho);
    sim->add_option("--nu", f.nu);
    sim->add_option("--hurst", f.hurst);
    sim->add_option("--spot", f.spot);
    sim->add_option("--rate", f.rate);
    sim->add_option("--tau", f.tau, "time to expiry in years");
    sim->add_option("--strikes", f.strikes, "comma list of strikes");

    auto* chk = app.add_subcommand("check", "arbitrage checks for an AdS surface");
    add_common(chk);
    chk->add_option("--params", f.params, "AdS parameter or fit JSON file");
    chk->add_option("--spot", f.spot);
    chk->add_option("--rate", f.rate);
    chk->add_option("--tau", f.tau, "time to expiry in years");
    chk->add_option("--grid-core", f.grid_core, "strikes over [0.5, 2] m_min");
    chk->add_option("--grid-tail", f.grid_tail, "strikes in each tail");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    CLI::App* used = app.get_subcommands().front();
    auto given = [&](const std::string& name) {
        try {
            return used->get_option("--" + name)->count() > 0;
        } catch (const CLI::OptionNotFound&) {
            return false;
        }
    };

    RunConfig cfg;
    cfg.command = used->get_name();
    try {
        if (given("config")) apply_json(cfg, io::read_json(f.config));
        cfg.command = used->get_name();
        if (given("input")) {
            cfg.inputs.clear();
            for (const auto& p : f.input) cfg.inputs.emplace_back(p);
        }
        if (given("outdir")) cfg.outdir = f.outdir;
        if (given("seed")) cfg.seed = f.seed;
        if (given("workers")) cfg.workers = f.workers;
        if (given("paths")) cfg.mc.n_paths = f.paths;
        if (given("steps")) cfg.mc.n_steps = f.steps;
        if (given("models")) cfg.models = parse_models(f.models);
        if (given("trials")) {
            if (f.trials < 1) throw InvalidArgument("--trials must be >= 1");
            cfg.n_trials = static_cast<std::size_t>(f.trials);
        }
        if (given("curvature")) cfg.curvature = metrics::parse_curvature_mode(f.curvature);
        if (given("params")) cfg.params = fs::path(f.params);
        if (given("spot")) cfg.spot = f.spot;
        if (given("rate")) cfg.rate = f.rate;
        if (given("tau")) cfg.tau = f.tau;
        if (given("strikes")) cfg.strikes = parse_strikes(f.strikes);
        if (given("grid-core")) cfg.grid.n_core = f.grid_core;
        if (given("grid-tail")) cfg.grid.n_tail = f.grid_tail;
        const bool any_sabr_flag = given("alpha0") || given("rho") || given("nu") || given("hurst");
        if (any_sabr_flag) {
            baselines::FsabrParams p = cfg.fsabr.value_or(baselines::FsabrParams{});
            if (given("alpha0")) p.sabr.alpha0 = f.alpha0;
            if (given("rho")) p.sabr.rho = f.rho;
            if (given("nu")) p.sabr.nu = f.nu;
            if (given("hurst")) p.hurst = f.hurst;
            cfg.fsabr = p;
        }
        cfg.validate();
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        if (cfg.command == "calibrate") return cmd_calibrate(cfg, err);
        if (cfg.command == "report") return cmd_report(cfg, err);
        if (cfg.command == "simulate") return cmd_simulate(cfg, err);
        return cmd_check(cfg, out, err);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kPartialFailure;
    }
}

}  // namespace adsvol::cli
