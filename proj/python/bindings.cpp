#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "adsvol/ads.hpp"
#include "adsvol/arbitrage.hpp"
#include "adsvol/baselines.hpp"
#include "adsvol/calibration.hpp"
#include "adsvol/cli.hpp"
#include "adsvol/errors.hpp"
#include "adsvol/io.hpp"
#include "adsvol/marketdata.hpp"
#include "adsvol/metrics.hpp"
#include "adsvol/pricing.hpp"

namespace py = pybind11;
using namespace adsvol;

namespace {

// JSON documents cross the boundary as plain dicts.
py::object to_py(const nlohmann::ordered_json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_adsvol, m) {
    m.doc() = "AdS implied volatility model, baselines, calibration and arbitrage checks";

    py::register_exception<Error>(m, "AdsvolError", PyExc_ValueError);

    py::class_<ads::AdsParams>(m, "AdsParams")
        .def(py::init([](double alpha, double beta, double delta, double epsilon, double k_min, double spot) {
                 return ads::AdsParams{alpha, beta, delta, epsilon, k_min, spot};
             }),
             py::arg("alpha"), py::arg("beta"), py::arg("delta"), py::arg("epsilon"), py::arg("k_min"),
             py::arg("spot"))
        .def_readwrite("alpha", &ads::AdsParams::alpha)
        .def_readwrite("beta", &ads::AdsParams::beta)
        .def_readwrite("delta", &ads::AdsParams::delta)
        .def_readwrite("epsilon", &ads::AdsParams::epsilon)
        .def_readwrite("k_min", &ads::AdsParams::k_min)
        .def_readwrite("spot", &ads::AdsParams::spot)
        .def_property_readonly("m_min", &ads::AdsParams::m_min)
        .def("__repr__", [](const ads::AdsParams& p) { return "AdsParams(" + io::to_json(p).dump() + ")"; });

    m.def("hurst", &ads::hurst, py::arg("m"), py::arg("params"));
    m.def("sigma", &ads::sigma, py::arg("m"), py::arg("params"));
    m.def("hurst_derivative", &ads::hurst_derivative, py::arg("m"), py::arg("params"));
    m.def("sigma_derivative", &ads::sigma_derivative, py::arg("m"), py::arg("params"));
    m.def("beta_admissible_bound", &ads::beta_admissible_bound, py::arg("m"), py::arg("params"));

    py::class_<pricing::PricingContext>(m, "PricingContext")
        .def(py::init([](double spot, double rate, double tau) { return pricing::PricingContext{spot, rate, 0.0, tau}; }),
             py::arg("spot"), py::arg("rate"), py::arg("tau"))
        .def_readwrite("spot", &pricing::PricingContext::spot)
        .def_readwrite("rate", &pricing::PricingContext::rate)
        .def_property_readonly("tau", &pricing::PricingContext::tau)
        .def_property_readonly("forward", &pricing::PricingContext::forward);

    m.def("call_price", &pricing::call_price, py::arg("ctx"), py::arg("strike"), py::arg("sigma"));
    m.def("implied_vol", &pricing::implied_vol, py::arg("ctx"), py::arg("strike"), py::arg("price"));
    m.def("ads_call_price", &pricing::ads_call_price, py::arg("ctx"), py::arg("strike"), py::arg("params"));
    m.def("dC_dK", &pricing::dC_dK, py::arg("ctx"), py::arg("strike"), py::arg("params"));
    m.def("dC_dT", &pricing::dC_dT, py::arg("ctx"), py::arg("strike"), py::arg("sigma"));

    m.def(
        "sabr_implied_vol",
        [](const pricing::PricingContext& ctx, double strike, double alpha0, double rho, double nu) {
            return baselines::sabr_implied_vol(ctx, strike, {alpha0, rho, nu});
        },
        py::arg("ctx"), py::arg("strike"), py::arg("alpha0"), py::arg("rho"), py::arg("nu"));
    m.def(
        "fsabr_prices",
        [](const pricing::PricingContext& ctx, const std::vector<double>& strikes, double alpha0, double rho,
           double nu, double hurst, std::size_t n_paths, std::size_t n_steps, std::uint64_t seed, unsigned workers) {
            const auto prices =
                baselines::fsabr_prices(ctx, strikes, {{alpha0, rho, nu}, hurst}, {n_paths, n_steps, seed, workers});
            std::vector<std::pair<double, double>> out;
            for (const auto& p : prices) out.emplace_back(p.price, p.std_error);
            return out;
        },
        py::arg("ctx"), py::arg("strikes"), py::arg("alpha0"), py::arg("rho"), py::arg("nu"), py::arg("hurst"),
        py::arg("n_paths") = 10000, py::arg("n_steps") = 32, py::arg("seed") = 42, py::arg("workers") = 0,
        "(price, std_error) pairs for each strike");
    m.def(
        "simulate_fbm",
        [](const std::vector<double>& times, double hurst, double k, std::uint64_t seed) {
            return baselines::simulate_fbm(times, hurst, k, seed).values;
        },
        py::arg("times"), py::arg("hurst"), py::arg("k") = 1.0, py::arg("seed") = 42);
    m.def("fbm_covariance", &baselines::fbm_covariance, py::arg("t"), py::arg("s"), py::arg("hurst"),
          py::arg("k") = 1.0);

    m.def(
        "curvature",
        [](const std::vector<double>& mny, const std::vector<double>& iv, const std::string& mode) {
            std::vector<std::pair<double, double>> out;
            for (const auto& p : metrics::curvature({mny, iv}, metrics::parse_curvature_mode(mode)))
                out.emplace_back(p.m, p.c);
            return out;
        },
        py::arg("m"), py::arg("sigma"), py::arg("mode") = "printed");
    m.def(
        "evaluate",
        [](const std::vector<double>& mny, const std::vector<double>& observed, const std::vector<double>& model,
           const std::string& mode) {
            return to_py(io::to_json(
                metrics::evaluate({mny, observed}, {mny, model}, metrics::parse_curvature_mode(mode))));
        },
        py::arg("m"), py::arg("observed"), py::arg("model"), py::arg("mode") = "printed");
    m.def(
        "summarize_column",
        [](const std::vector<double>& values) {
            const auto s = metrics::summarize_column(values);
            py::dict d;
            d["mean"] = s.mean;
            d["std"] = s.std;
            d["min"] = s.min;
            d["25%"] = s.q25;
            d["50%"] = s.q50;
            d["75%"] = s.q75;
            d["max"] = s.max;
            return d;
        },
        py::arg("values"));

    py::class_<marketdata::QuoteSlice>(m, "QuoteSlice")
        .def_readonly("ticker", &marketdata::QuoteSlice::ticker)
        .def_readonly("spot", &marketdata::QuoteSlice::spot)
        .def_readonly("rate", &marketdata::QuoteSlice::rate)
        .def_readonly("tau", &marketdata::QuoteSlice::tau)
        .def_readonly("k_min", &marketdata::QuoteSlice::k_min)
        .def_property_readonly("expiry", [](const marketdata::QuoteSlice& s) { return marketdata::format_date(s.expiry); })
        .def_property_readonly("strikes", &marketdata::QuoteSlice::strikes)
        .def_property_readonly("moneyness", &marketdata::QuoteSlice::moneyness)
        .def_property_readonly("ivs", &marketdata::QuoteSlice::ivs);

    m.def(
        "load_slices",
        [](const std::filesystem::path& path) {
            const auto rows = marketdata::load_chain(path);
            std::vector<marketdata::QuoteSlice> out;
            for (const auto& k : marketdata::slice_keys(rows))
                out.push_back(marketdata::build_slice(marketdata::filter_ticker(rows, k.ticker), k.expiry));
            return out;
        },
        py::arg("path"), "One slice per (ticker, expiry) in an option-chain CSV");

    m.def(
        "calibrate",
        [](const marketdata::QuoteSlice& slice, const std::string& model, std::size_t n_trials, std::uint64_t seed,
           std::size_t n_paths, std::size_t n_steps, unsigned workers) {
            calibration::Options opts;
            opts.mc = {n_paths, n_steps, seed, 1};
            opts.workers = workers;
            const auto mdl = calibration::parse_model(model);
            calibration::FitResult fit;
            {
                py::gil_scoped_release release;
                fit = calibration::calibrate(slice, calibration::SearchSpace::defaults(mdl), n_trials, seed, opts);
            }
            return to_py(io::to_json(fit));
        },
        py::arg("slice"), py::arg("model") = "ads", py::arg("n_trials") = 100, py::arg("seed") = 42,
        py::arg("n_paths") = 4096, py::arg("n_steps") = 32, py::arg("workers") = 0);

    m.def(
        "check_arbitrage",
        [](const pricing::PricingContext& ctx, const ads::AdsParams& params, unsigned workers) {
            arbitrage::ArbReport rep;
            {
                py::gil_scoped_release release;
                rep = arbitrage::check_all(ctx, params, {}, workers);
            }
            return to_py(io::to_json(rep));
        },
        py::arg("ctx"), py::arg("params"), py::arg("workers") = 0);

    m.def(
        "cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "adsvol");
            std::vector<const char*> argv;
            for (const auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release release;
                code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr)");
}
