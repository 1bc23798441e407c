#pragma once

#include <array>
#include <string>
#include <vector>

namespace adsvol::metrics {

/// (M_i, sigma_i) pairs, strictly ascending in M.
struct SmileCurve {
    std::vector<double> m;
    std::vector<double> sigma;

    /// Throws InvalidArgument on size mismatch or non-ascending moneyness.
    void validate() const;
    [[nodiscard]] std::size_t size() const { return m.size(); }
};

struct CurvaturePoint {
    double m;
    double c;
};

enum class CurvatureMode {
    /// (s[i+1] - 2 s[i] + s[i-1]) / (M[i+1] - M[i])^2, forward spacing only.
    Printed,
    /// Three-point stencil exact for quadratics on non-uniform grids.
    Weighted,
};

CurvatureMode parse_curvature_mode(const std::string& name);
std::string to_string(CurvatureMode mode);

double mse(const SmileCurve& obs, const SmileCurve& mod);
double mae(const SmileCurve& obs, const SmileCurve& mod);

std::vector<CurvaturePoint> curvature(const SmileCurve& curve,
                                      CurvatureMode mode = CurvatureMode::Printed);

/// Mean |C_mod - C_obs| over matching interior grids.
double ace(const std::vector<CurvaturePoint>& obs, const std::vector<CurvaturePoint>& mod);
/// sqrt(mean (C_mod - C_obs)^2).
double rmsce(const std::vector<CurvaturePoint>& obs, const std::vector<CurvaturePoint>& mod);

struct MetricReport {
    double mse = 0.0;
    double mae = 0.0;
    double rmsce = 0.0;
    double ace = 0.0;
    std::size_t n_points = 0;
    std::size_t n_interior = 0;
};

MetricReport evaluate(const SmileCurve& obs, const SmileCurve& mod,
                      CurvatureMode mode = CurvatureMode::Printed);

/// One column of a summary table.
struct ColumnSummary {
    double mean;
    double std;  // sample standard deviation (n - 1); 0 for a single value
    double min;
    double q25;
    double q50;
    double q75;
    double max;
};

/// Quantile with linear interpolation between order statistics (type 7).
double quantile(std::vector<double> values, double q);

ColumnSummary summarize_column(const std::vector<double>& values);

inline constexpr std::array<const char*, 4> kMetricNames = {"MSE", "MAE", "RMSCE", "ACE"};
inline constexpr std::array<const char*, 7> kStatisticNames = {"mean", "std", "min", "25%",
                                                               "50%",  "75%", "max"};

/// Per-metric summaries in the order MSE, MAE, RMSCE, ACE.
std::array<ColumnSummary, 4> summarize(const std::vector<MetricReport>& reports);

struct RegularityFit {
    double hurst;
    double scale;  // C
};

/// OLS fit of log sigma(n) = log C - H log n.
RegularityFit estimate_implied_regularity(const std::vector<double>& scales,
                                          const std::vector<double>& sigmas);

}  // namespace adsvol::metrics
