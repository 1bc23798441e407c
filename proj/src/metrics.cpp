#include "adsvol/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adsvol/errors.hpp"

namespace adsvol::metrics {

namespace {

void require_same_grid(const SmileCurve& a, const SmileCurve& b) {
    a.validate();
    b.validate();
    if (a.m != b.m) throw InvalidArgument("smile curves are on different moneyness grids");
}

void require_same_grid(const std::vector<CurvaturePoint>& a, const std::vector<CurvaturePoint>& b) {
    if (a.size() != b.size()) throw InvalidArgument("curvature grids differ in length");
    if (a.empty()) throw InvalidArgument("curvature grids are empty");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].m != b[i].m) throw InvalidArgument("curvature grids differ in moneyness");
}

}  // namespace

void SmileCurve::validate() const {
    if (m.size() != sigma.size()) throw InvalidArgument("smile curve size mismatch");
    if (m.empty()) throw InvalidArgument("smile curve is empty");
    for (std::size_t i = 1; i < m.size(); ++i)
        if (!(m[i] > m[i - 1])) throw InvalidArgument("smile moneyness must be strictly ascending");
}

CurvatureMode parse_curvature_mode(const std::string& name) {
    if (name == "printed") return CurvatureMode::Printed;
    if (name == "weighted") return CurvatureMode::Weighted;
    throw InvalidArgument("unknown curvature mode '" + name + "' (printed|weighted)");
}

std::string to_string(CurvatureMode mode) {
    return mode == CurvatureMode::Printed ? "printed" : "weighted";
}

double mse(const SmileCurve& obs, const SmileCurve& mod) {
    require_same_grid(obs, mod);
    double sum = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double d = mod.sigma[i] - obs.sigma[i];
        sum += d * d;
    }
    return sum / static_cast<double>(obs.size());
}

double mae(const SmileCurve& obs, const SmileCurve& mod) {
    require_same_grid(obs, mod);
    double sum = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) sum += std::abs(mod.sigma[i] - obs.sigma[i]);
    return sum / static_cast<double>(obs.size());
}

std::vector<CurvaturePoint> curvature(const SmileCurve& curve, CurvatureMode mode) {
    curve.validate();
    if (curve.size() < 3) throw InvalidArgument("curvature needs at least 3 points");
    const auto& m = curve.m;
    const auto& s = curve.sigma;
    std::vector<CurvaturePoint> out;
    out.reserve(curve.size() - 2);
    for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
        double c;
        if (mode == CurvatureMode::Printed) {
            const double h = m[i + 1] - m[i];
            c = (s[i + 1] - 2.0 * s[i] + s[i - 1]) / (h * h);
        } else {
            const double hl = m[i] - m[i - 1];
            const double hr = m[i + 1] - m[i];
            c = 2.0 * (hl * s[i + 1] - (hl + hr) * s[i] + hr * s[i - 1]) / (hl * hr * (hl + hr));
        }
        out.push_back({m[i], c});
    }
    return out;
}

double ace(const std::vector<CurvaturePoint>& obs, const std::vector<CurvaturePoint>& mod) {
    require_same_grid(obs, mod);
    double sum = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) sum += std::abs(mod[i].c - obs[i].c);
    return sum / static_cast<double>(obs.size());
}

double rmsce(const std::vector<CurvaturePoint>& obs, const std::vector<CurvaturePoint>& mod) {
    require_same_grid(obs, mod);
    double sum = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double d = mod[i].c - obs[i].c;
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(obs.size()));
}

MetricReport evaluate(const SmileCurve& obs, const SmileCurve& mod, CurvatureMode mode) {
    MetricReport r;
    r.mse = mse(obs, mod);
    r.mae = mae(obs, mod);
    const auto c_obs = curvature(obs, mode);
    const auto c_mod = curvature(mod, mode);
    r.rmsce = rmsce(c_obs, c_mod);
    r.ace = ace(c_obs, c_mod);
    r.n_points = obs.size();
    r.n_interior = c_obs.size();
    return r;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw InvalidArgument("quantile of an empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile level must be in [0, 1]");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

ColumnSummary summarize_column(const std::vector<double>& values) {
    if (values.empty()) throw InvalidArgument("cannot summarize an empty column");
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    // Sum in sorted order so the result is independent of input order.
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : sorted) ss += (v - mean) * (v - mean);
    ColumnSummary s{};
    s.mean = mean;
    s.std = sorted.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    s.min = sorted.front();
    s.max = sorted.back();
    s.q25 = quantile(sorted, 0.25);
    s.q50 = quantile(sorted, 0.50);
    s.q75 = quantile(sorted, 0.75);
    return s;
}

std::array<ColumnSummary, 4> summarize(const std::vector<MetricReport>& reports) {
    if (reports.empty()) throw InvalidArgument("summarize needs at least one report");
    std::array<std::vector<double>, 4> cols;
    for (const auto& r : reports) {
        cols[0].push_back(r.mse);
        cols[1].push_back(r.mae);
        cols[2].push_back(r.rmsce);
        cols[3].push_back(r.ace);
    }
    return {summarize_column(cols[0]), summarize_column(cols[1]), summarize_column(cols[2]),
            summarize_column(cols[3])};
}

RegularityFit estimate_implied_regularity(const std::vector<double>& scales,
                                          const std::vector<double>& sigmas) {
    if (scales.size() != sigmas.size()) throw InvalidArgument("scales and sigmas differ in length");
    if (scales.size() < 3) throw InvalidArgument("implied regularity needs at least 3 scales");
    const auto n = static_cast<double>(scales.size());
    double mx = 0.0, my = 0.0;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (!(scales[i] > 0.0) || !(sigmas[i] > 0.0))
            throw InvalidArgument("scales and sigmas must be positive");
        x.push_back(std::log(scales[i]));
        y.push_back(std::log(sigmas[i]));
        mx += x.back();
        my += y.back();
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw InvalidArgument("degenerate design: all scales are equal");
    const double slope = sxy / sxx;
    return {-slope, std::exp(my - slope * mx)};
}

}  // namespace adsvol::metrics
