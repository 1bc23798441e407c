#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "adsvol/errors.hpp"
#include "adsvol/io.hpp"

using namespace adsvol;
namespace fs = std::filesystem;

TEST_CASE("AdS parameters round-trip through JSON") {
    ads::AdsParams p{0.5, -0.3, 0.4, 0.08, 105.0, 100.0};
    auto j = io::to_json(p);
    CHECK(j.dump() == R"({"alpha":0.5,"beta":-0.3,"delta":0.4,"epsilon":0.08,"k_min":105.0,"spot":100.0})");
    auto back = io::ads_params_from_json(io::ordered_json::parse(j.dump()));
    CHECK(back.alpha == p.alpha);
    CHECK(back.beta == p.beta);
    CHECK(back.k_min == p.k_min);
    CHECK_THROWS_AS(io::ads_params_from_json(io::ordered_json::parse(R"({"alpha":1})")), ParseError);
    CHECK_THROWS_AS(io::ads_params_from_json(io::ordered_json::parse(
                        R"({"alpha":"x","beta":0,"delta":0.5,"epsilon":0.1,"k_min":1,"spot":1})")),
                    ParseError);
}

TEST_CASE("fit results round-trip through JSON") {
    calibration::FitResult fit;
    fit.model = calibration::Model::Fsabr;
    fit.params = {0.2, -0.5, 0.7, 0.3};
    fit.rmse = 0.0123;
    fit.reported_rmse = 0.0131;
    fit.n_trials = 2;
    fit.seed = 42;
    fit.wall_seconds = 3.5;
    fit.history = {{0, {0.1, 0.0, 0.5, 0.4}, 0.05, false},
                   {1, {0.2, -0.5, 0.7, 0.3}, 0.0123, false},
                   {2, {0.2, -0.5, 0.7, 0.3}, 0.0123, true}};
    auto j = io::to_json(fit);
    CHECK(j["params"]["hurst"] == 0.3);
    CHECK(j["history"][2]["polish"] == true);
    CHECK_FALSE(j.contains("wall_seconds"));
    auto back = io::fit_result_from_json(io::ordered_json::parse(j.dump()));
    CHECK(back.model == fit.model);
    CHECK(back.params == fit.params);
    CHECK(back.reported_rmse == fit.reported_rmse);
    REQUIRE(back.history.size() == 3);
    CHECK(back.history[2].polish);
    CHECK(back.history[0].params == fit.history[0].params);
    CHECK(io::to_json(back).dump() == j.dump());
    CHECK_THROWS_AS(io::fit_result_from_json(io::ordered_json::parse(R"({"model":"ads"})")), ParseError);
}

TEST_CASE("MC config overlay") {
    baselines::McConfig base{10, 4, 1, 0};
    auto mc = io::mc_config_from_json(io::ordered_json::parse(R"({"n_paths":500})"), base);
    CHECK(mc.n_paths == 500);
    CHECK(mc.n_steps == 4);
    CHECK(io::to_json(mc).dump() == R"({"n_paths":500,"n_steps":4,"seed":1})");
}

TEST_CASE("doubles print in shortest round-trip form") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng);
        CHECK(std::stod(io::format_double(v)) == v);
    }
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(2.0) == "2");
}

TEST_CASE("atomic writes create directories and leave no temp file") {
    const fs::path dir = fs::temp_directory_path() / "adsvol_io_test";
    fs::remove_all(dir);
    const fs::path file = dir / "a" / "b.txt";
    io::write_file_atomic(file, "first\n");
    io::write_file_atomic(file, "second\n");
    CHECK(io::read_file(file) == "second\n");
    CHECK_FALSE(fs::exists(dir / "a" / "b.txt.tmp"));
    CHECK_THROWS_AS(io::read_file(dir / "missing"), ParseError);
    io::write_file_atomic(dir / "bad.json", "{not json");
    CHECK_THROWS_AS(io::read_json(dir / "bad.json"), ParseError);
    fs::remove_all(dir);
}
