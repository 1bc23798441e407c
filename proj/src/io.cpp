#include "adsvol/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "adsvol/errors.hpp"

namespace adsvol::io {

namespace {

double number(const ordered_json& j, const char* key) {
    if (!j.contains(key)) throw ParseError(std::string("missing key '") + key + "'");
    const auto& v = j.at(key);
    if (!v.is_number()) throw ParseError(std::string("key '") + key + "' must be a number");
    return v.get<double>();
}

ordered_json named_params(calibration::Model model, const std::vector<double>& values) {
    const auto names = calibration::SearchSpace::defaults(model).names();
    ordered_json out = ordered_json::object();
    for (std::size_t i = 0; i < names.size() && i < values.size(); ++i) out[names[i]] = values[i];
    return out;
}

std::vector<double> unnamed_params(calibration::Model model, const ordered_json& j) {
    std::vector<double> out;
    for (const auto& name : calibration::SearchSpace::defaults(model).names())
        out.push_back(number(j, name.c_str()));
    return out;
}

}  // namespace

ordered_json to_json(const ads::AdsParams& p) {
    return {{"alpha", p.alpha}, {"beta", p.beta},   {"delta", p.delta},
            {"epsilon", p.epsilon}, {"k_min", p.k_min}, {"spot", p.spot}};
}

ads::AdsParams ads_params_from_json(const ordered_json& j) {
    if (!j.is_object()) throw ParseError("AdS parameters must be a JSON object");
    return {number(j, "alpha"), number(j, "beta"),  number(j, "delta"),
            number(j, "epsilon"), number(j, "k_min"), number(j, "spot")};
}

ordered_json to_json(const baselines::SabrParams& p) {
    return {{"alpha0", p.alpha0}, {"rho", p.rho}, {"nu", p.nu}};
}

ordered_json to_json(const baselines::FsabrParams& p) {
    auto j = to_json(p.sabr);
    j["hurst"] = p.hurst;
    return j;
}

baselines::FsabrParams fsabr_params_from_json(const ordered_json& j) {
    if (!j.is_object()) throw ParseError("fSABR parameters must be a JSON object");
    return {{number(j, "alpha0"), number(j, "rho"), number(j, "nu")}, number(j, "hurst")};
}

ordered_json to_json(const baselines::McConfig& mc) {
    return {{"n_paths", mc.n_paths}, {"n_steps", mc.n_steps}, {"seed", mc.seed}};
}

baselines::McConfig mc_config_from_json(const ordered_json& j, baselines::McConfig base) {
    if (j.contains("n_paths")) base.n_paths = j.at("n_paths").get<std::size_t>();
    if (j.contains("n_steps")) base.n_steps = j.at("n_steps").get<std::size_t>();
    if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
    return base;
}

ordered_json to_json(const calibration::FitResult& fit) {
    ordered_json history = ordered_json::array();
    for (const auto& t : fit.history) {
        ordered_json entry{{"index", t.index},
                           {"params", named_params(fit.model, t.params)},
                           {"objective", t.objective}};
        if (t.polish) entry["polish"] = true;
        history.push_back(std::move(entry));
    }
    return {{"model", calibration::to_string(fit.model)},
            {"params", named_params(fit.model, fit.params)},
            {"rmse", fit.rmse},
            {"reported_rmse", fit.reported_rmse},
            {"n_trials", fit.n_trials},
            {"seed", fit.seed},
            {"history", std::move(history)}};
}

calibration::FitResult fit_result_from_json(const ordered_json& j) {
    calibration::FitResult fit;
    try {
        fit.model = calibration::parse_model(j.at("model").get<std::string>());
        fit.params = unnamed_params(fit.model, j.at("params"));
        fit.rmse = j.at("rmse").get<double>();
        fit.reported_rmse = j.value("reported_rmse", fit.rmse);
        fit.n_trials = j.at("n_trials").get<std::size_t>();
        fit.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& h : j.at("history")) {
            calibration::Trial t;
            t.index = h.at("index").get<std::size_t>();
            t.params = unnamed_params(fit.model, h.at("params"));
            t.objective = h.at("objective").get<double>();
            t.polish = h.value("polish", false);
            fit.history.push_back(std::move(t));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed fit result: ") + e.what());
    }
    return fit;
}

ordered_json to_json(const metrics::MetricReport& r) {
    return {{"mse", r.mse},       {"mae", r.mae},           {"rmsce", r.rmsce},
            {"ace", r.ace},       {"n_points", r.n_points}, {"n_interior", r.n_interior}};
}

ordered_json to_json(const arbitrage::Verdict& v) {
    ordered_json j{{"checked", v.checked},
                   {"pass", v.pass},
                   {"worst_violation", v.worst_violation},
                   {"worst_value", v.worst_value},
                   {"strike", v.strike},
                   {"maturity", v.maturity},
                   {"n_nodes", v.n_nodes},
                   {"n_failed", v.n_failed}};
    if (v.confirmed_by_prices) j["confirmed_by_prices"] = *v.confirmed_by_prices;
    return j;
}

ordered_json to_json(const arbitrage::ArbReport& r) {
    ordered_json conditions = ordered_json::object();
    for (const auto* v : r.verdicts()) conditions[v->name] = to_json(*v);
    ordered_json j{{"conditions", std::move(conditions)}};
    if (r.admissibility) {
        const auto& a = *r.admissibility;
        j["admissibility"] = {{"delta_ok", a.delta_ok},
                              {"beta_ok", a.beta_ok},
                              {"min_bound", a.min_bound},
                              {"min_bound_m", a.min_bound_m},
                              {"beta_margin", a.beta_margin}};
    }
    j["grid"] = {{"n_strikes", r.grid_size},
                 {"m_lo", r.grid_m_lo},
                 {"m_hi", r.grid_m_hi},
                 {"maturities", r.maturities}};
    j["butterfly_pass"] = r.butterfly_pass();
    j["all_pass"] = r.all_pass();
    return j;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

ordered_json read_json(const std::filesystem::path& path) {
    try {
        return ordered_json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw Error("format_double failed");
    return std::string(buf, ptr);
}

}  // namespace adsvol::io
