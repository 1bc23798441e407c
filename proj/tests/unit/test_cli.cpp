#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "adsvol/cli.hpp"
#include "adsvol/io.hpp"

using namespace adsvol;
namespace fs = std::filesystem;

namespace {

const fs::path kData = ADSVOL_TEST_DATA;

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "adsvol");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("adsvol_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<std::string> csv_lines(const fs::path& p) {
    std::istringstream in(io::read_file(p));
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line[0] != '#') lines.push_back(line);
    return lines;
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
}

void write_params(const fs::path& p, const std::string& json) { io::write_file_atomic(p, json); }

}  // namespace

TEST_CASE("calibrate writes per-ticker outputs and AdS beats SABR on an AdS smile") {
    const auto dir = scratch("calibrate");
    auto r = run({"calibrate", "-i", (kData / "synthetic_chain.csv").string(), "-o", (dir / "a").string(),
                  "--trials", "40", "--paths", "256", "--steps", "8", "--workers", "1"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    for (const char* t : {"SYN", "SYN2"}) {
        for (const char* f : {"ads.fit.json", "sabr.fit.json", "fsabr.fit.json", "metrics.csv", "smile.csv"})
            CHECK(fs::exists(dir / "a" / t / f));
    }
    const auto lines = csv_lines(dir / "a" / "metrics.csv");
    REQUIRE(lines.size() == 3);
    CHECK(lines[0].rfind("Ticker,AdS_MSE,AdS_MAE", 0) == 0);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split(lines[i]);
        REQUIRE(cells.size() == 13);
        CHECK(std::stod(cells[1]) < std::stod(cells[5]));
    }
    const auto fit = io::read_json(dir / "a" / "SYN" / "ads.fit.json");
    CHECK(fit["config"]["seed"] == 42);
    CHECK_FALSE(fit["config"].contains("workers"));
    CHECK(fit["surface"].contains("k_min"));
    CHECK(fit["history"].size() == 41);

    SUBCASE("reruns are byte-identical across worker counts") {
        std::map<fs::path, std::string> before;
        for (const auto& e : fs::recursive_directory_iterator(dir / "a"))
            if (e.is_regular_file()) before[e.path()] = io::read_file(e.path());
        auto r2 = run({"calibrate", "-i", (kData / "synthetic_chain.csv").string(), "-o", (dir / "a").string(),
                       "--trials", "40", "--paths", "256", "--steps", "8", "--workers", "2"});
        REQUIRE(r2.code == 0);
        for (const auto& [path, content] : before) CHECK_MESSAGE(io::read_file(path) == content, path.string());
    }
}

TEST_CASE("calibrate rejects bad configuration with exit code 2") {
    const auto dir = scratch("calibrate_bad");
    io::write_file_atomic(dir / "empty.csv",
                          "ticker,quote_date,expiry,strike,implied_vol,underlying_close,rate\n");
    CHECK(run({"calibrate", "-i", (dir / "empty.csv").string(), "-o", dir.string()}).code == 2);
    CHECK(run({"calibrate", "-i", (dir / "missing.csv").string(), "-o", dir.string()}).code == 2);
    CHECK(run({"calibrate", "-i", (kData / "synthetic_chain.csv").string(), "--trials", "0"}).code == 2);
    CHECK(run({"calibrate", "-i", (kData / "synthetic_chain.csv").string(), "--models", "heston"}).code == 2);
    CHECK(run({"calibrate", "--no-such-flag"}).code == 2);
    CHECK(run({}).code == 2);
}

TEST_CASE("flags override the JSON config") {
    const auto dir = scratch("precedence");
    io::write_file_atomic(dir / "cfg.json", R"({"trials": 3, "seed": 5, "models": ["ads"]})");
    auto r = run({"calibrate", "-i", (kData / "synthetic_chain.csv").string(), "-o", dir.string(), "--config",
                  (dir / "cfg.json").string(), "--seed", "9"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto fit = io::read_json(dir / "SYN" / "ads.fit.json");
    CHECK(fit["config"]["trials"] == 3);
    CHECK(fit["config"]["seed"] == 9);
    CHECK(fit["seed"] == 9);
    CHECK_FALSE(fs::exists(dir / "SYN" / "sabr.fit.json"));
}

TEST_CASE("report summarizes metric tables") {
    const auto dir = scratch("report");
    auto r = run({"report", "-i", (kData / "published_metrics.csv").string(), "-o", dir.string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto lines = csv_lines(dir / "summary.csv");
    REQUIRE(lines.size() == 8);
    CHECK(lines[0].rfind("Statistic,AdS_MSE", 0) == 0);
    CHECK(lines[1].rfind("mean,", 0) == 0);
    CHECK(lines[7].rfind("max,", 0) == 0);
    for (const char* m : {"MSE", "MAE", "RMSCE", "ACE"}) {
        const auto v = csv_lines(dir / (std::string("violin_") + m + ".csv"));
        CHECK(v.size() == 1 + 3 * 40);
    }

    SUBCASE("a single ticker has zero standard deviation") {
        const auto all = io::read_file(kData / "published_metrics.csv");
        std::istringstream in(all);
        std::string comment, header, first;
        std::getline(in, comment);
        std::getline(in, header);
        std::getline(in, first);
        io::write_file_atomic(dir / "one" / "metrics.csv", header + "\n" + first + "\n");
        auto r1 = run({"report", "-i", (dir / "one" / "metrics.csv").string(), "-o", (dir / "one_out").string()});
        REQUIRE(r1.code == 0);
        const auto std_row = split(csv_lines(dir / "one_out" / "summary.csv")[2]);
        CHECK(std_row[0] == "std");
        for (std::size_t i = 1; i < std_row.size(); ++i) CHECK(std::stod(std_row[i]) == 0.0);
    }

    SUBCASE("malformed tables are config errors") {
        io::write_file_atomic(dir / "bad.csv", "Ticker,Foo\nX,1\n");
        CHECK(run({"report", "-i", (dir / "bad.csv").string(), "-o", dir.string()}).code == 2);
        CHECK(run({"report", "-o", dir.string()}).code == 2);
    }
}

TEST_CASE("report renders smile plots from calibrate output") {
    const auto dir = scratch("report_plot");
    auto c = run({"calibrate", "-i", (kData / "synthetic_chain.csv").string(), "-o", (dir / "cal").string(),
                  "--trials", "5", "--paths", "128", "--steps", "4"});
    REQUIRE(c.code == 0);
    auto r = run({"report", "-i", (dir / "cal").string(), "-o", (dir / "rep").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto svg = io::read_file(dir / "rep" / "plots" / "SYN.svg");
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("<svg") != std::string::npos);
    std::size_t groups = 0;
    for (auto pos = svg.find("class=\"curve\""); pos != std::string::npos; pos = svg.find("class=\"curve\"", pos + 1))
        ++groups;
    CHECK(groups == 3);
    CHECK(svg.find("class=\"observed\"") != std::string::npos);
    CHECK(svg.find("moneyness") != std::string::npos);
    CHECK(svg.find(">IV<") != std::string::npos);
    // Rendering the same inputs again is byte-identical.
    auto r2 = run({"report", "-i", (dir / "cal").string(), "-o", (dir / "rep").string()});
    REQUIRE(r2.code == 0);
    CHECK(io::read_file(dir / "rep" / "plots" / "SYN.svg") == svg);
}

TEST_CASE("simulate with nu = 0 gives a flat smile at alpha0") {
    const auto dir = scratch("simulate");
    auto r = run({"simulate", "--alpha0", "0.25", "--rho", "0", "--nu", "0", "--hurst", "0.3", "--tau", "0.25",
                  "--paths", "4000", "--steps", "8", "-o", dir.string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto lines = csv_lines(dir / "simulate.csv");
    REQUIRE(lines.size() == 12);
    CHECK(lines[0] == "strike,moneyness,price,std_error,implied_vol,hagan_iv,status");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto c = split(lines[i]);
        CHECK(c[6] == "ok");
        CHECK(std::stod(c[4]) == doctest::Approx(0.25).epsilon(0.02));
        CHECK(std::stod(c[5]) == doctest::Approx(0.25).epsilon(1e-12));
    }
    CHECK(run({"simulate", "-o", dir.string()}).code == 2);
    CHECK(run({"simulate", "--alpha0", "0.2", "--rho", "2", "--nu", "0.1", "--hurst", "0.3", "-o", dir.string()})
              .code == 2);
}

TEST_CASE("check reports verdicts and exit codes") {
    const auto dir = scratch("check");
    write_params(dir / "flat.json",
                 R"({"alpha":1e-12,"beta":0.0,"delta":0.5,"epsilon":0.2,"k_min":100,"spot":100,"rate":0.01,"tau":0.25})");
    auto ok = run({"check", "--params", (dir / "flat.json").string(), "-o", (dir / "flat").string()});
    CHECK_MESSAGE(ok.code == 0, (ok.out + ok.err));
    CHECK(ok.out.find("arbitrage-free") != std::string::npos);
    const auto doc = io::read_json(dir / "flat" / "check.json");
    CHECK(doc["all_pass"] == true);
    CHECK(doc["admissibility"]["delta_ok"] == true);
    CHECK(doc["grid"]["n_strikes"] == 300);

    write_params(dir / "steep.json",
                 R"({"alpha":0.5,"beta":0.3,"delta":1.2,"epsilon":0.1,"k_min":100,"spot":100})");
    auto bad = run({"check", "--params", (dir / "steep.json").string(), "-o", (dir / "steep").string()});
    CHECK(bad.code == 1);
    CHECK(io::read_json(dir / "steep" / "check.json")["admissibility"]["delta_ok"] == false);

    write_params(dir / "broken.json", R"({"alpha":0.5})");
    CHECK(run({"check", "--params", (dir / "broken.json").string(), "-o", dir.string()}).code == 2);
    CHECK(run({"check", "-o", dir.string()}).code == 2);
    CHECK(run({"check", "--params", (dir / "flat.json").string(), "--grid-core", "1", "-o", dir.string()}).code ==
          2);
}

TEST_CASE("the installed binary returns the documented exit codes") {
    const char* bin = std::getenv("ADSVOL_BIN");
    if (!bin) return;
    const auto dir = scratch("binary");
    const std::string quiet = " >/dev/null 2>&1";
    auto status = [&](const std::string& args) {
        const int s = std::system((std::string(bin) + " " + args + quiet).c_str());
        return WEXITSTATUS(s);
    };
    CHECK(status("--help") == 0);
    CHECK(status("calibrate --trials 0 -i " + (kData / "synthetic_chain.csv").string()) == 2);
    CHECK(status("report -i " + (kData / "published_metrics.csv").string() + " -o " + dir.string()) == 0);
}
