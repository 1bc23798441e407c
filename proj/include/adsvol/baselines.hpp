#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adsvol/pricing.hpp"

namespace adsvol::baselines {

struct SabrParams {
    double alpha0 = 0.2;  // initial vol level, > 0
    double rho = 0.0;     // spot-vol correlation, |rho| < 1
    double nu = 0.0;      // vol-of-vol, >= 0
};

struct FsabrParams {
    SabrParams sabr;
    double hurst = 0.5;  // in (0, 1)
};

void validate(const SabrParams& p);
void validate(const FsabrParams& p);

/// Monte-Carlo settings shared by the fSABR pricer and the CLI.
struct McConfig {
    std::size_t n_paths = 10'000;
    std::size_t n_steps = 32;
    std::uint64_t seed = 42;
    unsigned workers = 0;  // 0 = hardware concurrency; results do not depend on it
};

/// Paths are simulated in fixed-size blocks, each with its own RNG stream.
inline constexpr std::size_t kPathBlock = 1024;
inline constexpr std::size_t kMaxFbmGrid = 4096;

/// fBm covariance k^2/2 (|t|^2H + |s|^2H - |t-s|^2H).
double fbm_covariance(double t, double s, double hurst, double k = 1.0);

struct FbmPath {
    std::vector<double> times;
    std::vector<double> values;
    double hurst = 0.5;
    double k = 1.0;
};

/// Exact fBm sampler on a fixed grid: Cholesky factor of the covariance
/// matrix at the grid's positive times. Reusable across many draws.
class FbmGenerator {
public:
    /// `times` must start at 0 and be strictly ascending, length <= 4096.
    /// Throws NumericalError if the matrix is not positive definite even
    /// after diagonal jitter.
    FbmGenerator(std::vector<double> times, double hurst, double k = 1.0);

    [[nodiscard]] const std::vector<double>& times() const { return times_; }
    [[nodiscard]] double hurst() const { return hurst_; }
    [[nodiscard]] double k() const { return k_; }
    /// Diagonal jitter that was needed to factor the matrix (0 if none).
    [[nodiscard]] double jitter() const { return jitter_; }

    /// Writes B^H at every grid time into `out` (out[0] = 0).
    template <class Rng>
    void sample(Rng& rng, std::vector<double>& out) const {
        const auto n = static_cast<Eigen::Index>(times_.size()) - 1;
        Eigen::VectorXd z(n);
        for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();
        out.assign(times_.size(), 0.0);
        Eigen::Map<Eigen::VectorXd> values(out.data() + 1, n);
        values.noalias() = factor_.triangularView<Eigen::Lower>() * z;
    }

private:
    std::vector<double> times_;
    double hurst_;
    double k_;
    double jitter_ = 0.0;
    Eigen::MatrixXd factor_;
};

/// One fBm path on `times`, deterministic in `seed`.
FbmPath simulate_fbm(const std::vector<double>& times, double hurst, double k, std::uint64_t seed);

/// Hagan lognormal (beta = 1) SABR implied vol. Uses the series
/// z/x(z) = 1 - rho z/2 + (2 - 3 rho^2) z^2 / 12 when |ln(F/K)| < 1e-6.
double sabr_implied_vol(const pricing::PricingContext& ctx, double strike, const SabrParams& p);

struct McPrice {
    double price;
    double std_error;
};

/// Monte-Carlo call prices under the lognormal fSABR dynamics
///   dS/S = r dt + alpha_t (rho dW1 + sqrt(1-rho^2) dW2),  alpha_t = alpha0 exp(nu B^H_t),
/// with B^H built from the same Gaussian increments as W1 and log-Euler
/// steps of S. Strikes below the forward are priced through the put payoff
/// and put-call parity. Deterministic in (seed, n_paths, n_steps).
std::vector<McPrice> fsabr_prices(const pricing::PricingContext& ctx,
                                  const std::vector<double>& strikes, const FsabrParams& p,
                                  const McConfig& mc);

McPrice fsabr_price(const pricing::PricingContext& ctx, double strike, const FsabrParams& p,
                    const McConfig& mc);

struct SmilePoint {
    double strike;
    double implied_vol;
    double price;
    double std_error;
};

struct Smile {
    std::vector<SmilePoint> points;
    /// Strikes whose MC price fell outside the inversion band.
    std::vector<double> dropped;
};

/// MC prices inverted to implied vols. Throws NumericalError if every
/// strike is dropped.
Smile fsabr_smile(const pricing::PricingContext& ctx, const std::vector<double>& strikes,
                  const FsabrParams& p, const McConfig& mc);

/// Lower-triangular factor of the joint covariance of the W1 increments and
/// B^H on a uniform grid of `n_steps` steps over `horizon`, laid out as
/// [dW_1..dW_n, B_{t_1}..B_{t_n}].
Eigen::MatrixXd joint_driver_factor(double horizon, std::size_t n_steps, double hurst);

/// Cov(W_t, B^H_s) for the Mandelbrot-Van Ness fBm (k = 1) driven by W.
double fbm_brownian_cross_covariance(double t, double s, double hurst);

}  // namespace adsvol::baselines
