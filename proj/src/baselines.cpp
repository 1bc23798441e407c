#include "adsvol/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "adsvol/errors.hpp"
#include "adsvol/parallel.hpp"

namespace adsvol::baselines {

namespace {

/// Cholesky with escalating diagonal jitter. Returns the jitter used.
double cholesky_with_jitter(const Eigen::MatrixXd& cov, Eigen::MatrixXd& factor, double scale) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) {
        factor = llt.matrixL();
        return 0.0;
    }
    const auto n = cov.rows();
    for (double rel = 1e-14; rel <= 1e-8; rel *= 10.0) {
        const double jitter = rel * scale;
        llt.compute(cov + jitter * Eigen::MatrixXd::Identity(n, n));
        if (llt.info() == Eigen::Success) {
            factor = llt.matrixL();
            return jitter;
        }
    }
    throw NumericalError("covariance matrix is not positive definite after jitter");
}

}  // namespace

void validate(const SabrParams& p) {
    if (!(p.alpha0 > 0.0) || !std::isfinite(p.alpha0)) throw InvalidArgument("SABR alpha0 must be > 0");
    if (!(std::abs(p.rho) < 1.0)) throw InvalidArgument("SABR rho must satisfy |rho| < 1");
    if (!(p.nu >= 0.0) || !std::isfinite(p.nu)) throw InvalidArgument("SABR nu must be >= 0");
}

void validate(const FsabrParams& p) {
    validate(p.sabr);
    if (!(p.hurst > 0.0 && p.hurst < 1.0)) throw InvalidArgument("fSABR hurst must be in (0, 1)");
}

double fbm_covariance(double t, double s, double hurst, double k) {
    const double h2 = 2.0 * hurst;
    return 0.5 * k * k *
           (std::pow(std::abs(t), h2) + std::pow(std::abs(s), h2) - std::pow(std::abs(t - s), h2));
}

double fbm_brownian_cross_covariance(double t, double s, double hurst) {
    if (t <= 0.0 || s <= 0.0) return 0.0;
    const double a = hurst + 0.5;
    const double c = std::sqrt(std::tgamma(2.0 * hurst + 1.0) * std::sin(std::numbers::pi * hurst)) /
                     std::tgamma(a);
    return c / a * (std::pow(s, a) - std::pow(s - std::min(t, s), a));
}

FbmGenerator::FbmGenerator(std::vector<double> times, double hurst, double k)
    : times_(std::move(times)), hurst_(hurst), k_(k) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw InvalidArgument("fBm hurst must be in (0, 1)");
    if (!(k > 0.0)) throw InvalidArgument("fBm scale k must be > 0");
    if (times_.size() < 2 || times_.size() > kMaxFbmGrid)
        throw InvalidArgument("fBm grid must hold between 2 and 4096 times");
    if (times_.front() != 0.0) throw InvalidArgument("fBm grid must start at 0");
    for (std::size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1])) throw InvalidArgument("fBm grid must be strictly ascending");

    const auto n = static_cast<Eigen::Index>(times_.size()) - 1;
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j)
            cov(i, j) = cov(j, i) = fbm_covariance(times_[i + 1], times_[j + 1], hurst, k);
    jitter_ = cholesky_with_jitter(cov, factor_, cov.diagonal().maxCoeff());
}

FbmPath simulate_fbm(const std::vector<double>& times, double hurst, double k, std::uint64_t seed) {
    FbmGenerator gen(times, hurst, k);
    CounterRng rng(seed, 0);
    FbmPath path{times, {}, hurst, k};
    gen.sample(rng, path.values);
    return path;
}

double sabr_implied_vol(const pricing::PricingContext& ctx, double strike, const SabrParams& p) {
    validate(p);
    pricing::validate(ctx);
    if (!(strike > 0.0)) throw InvalidArgument("strike must be > 0");
    const double tau = ctx.tau();
    if (!(tau > 0.0)) throw InvalidArgument("sabr_implied_vol needs tau > 0");
    const double log_fk = std::log(ctx.forward() / strike);
    const double correction =
        1.0 + ((2.0 - 3.0 * p.rho * p.rho) / 24.0 * p.nu * p.nu + p.rho * p.nu * p.alpha0 / 4.0) * tau;
    const double z = p.nu / p.alpha0 * log_fk;
    double z_over_x;
    if (std::abs(log_fk) < 1e-6 || p.nu == 0.0) {
        z_over_x = 1.0 - 0.5 * p.rho * z + (2.0 - 3.0 * p.rho * p.rho) * z * z / 12.0;
    } else {
        const double x =
            std::log((std::sqrt(1.0 - 2.0 * p.rho * z + z * z) + z - p.rho) / (1.0 - p.rho));
        z_over_x = z / x;
    }
    return p.alpha0 * z_over_x * correction;
}

Eigen::MatrixXd joint_driver_factor(double horizon, std::size_t n_steps, double hurst) {
    if (n_steps == 0 || n_steps > 512) throw InvalidArgument("n_steps must be in [1, 512]");
    const auto n = static_cast<Eigen::Index>(n_steps);
    const double dt = horizon / static_cast<double>(n_steps);
    const double sqdt = std::sqrt(dt);
    auto time = [&](Eigen::Index i) { return dt * static_cast<double>(i); };

    // cross(j, i) = Cov(B_{t_{j+1}}, dW_{i+1})
    Eigen::MatrixXd cross(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            cross(j, i) = fbm_brownian_cross_covariance(time(i + 1), time(j + 1), hurst) -
                          fbm_brownian_cross_covariance(time(i), time(j + 1), hurst);
    Eigen::MatrixXd cov_b(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j)
            cov_b(i, j) = cov_b(j, i) = fbm_covariance(time(i + 1), time(j + 1), hurst);

    // Block Cholesky: dW = sqrt(dt) z1, B = (cross / sqrt(dt)) z1 + L_schur z2.
    Eigen::MatrixXd lower_left = cross / sqdt;
    Eigen::MatrixXd schur = cov_b - lower_left * lower_left.transpose();
    schur = 0.5 * (schur + schur.transpose());
    Eigen::MatrixXd l_schur;
    cholesky_with_jitter(schur, l_schur, cov_b.diagonal().maxCoeff());

    Eigen::MatrixXd factor = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    factor.topLeftCorner(n, n).diagonal().setConstant(sqdt);
    factor.bottomLeftCorner(n, n) = lower_left;
    factor.bottomRightCorner(n, n) = l_schur;
    return factor;
}

std::vector<McPrice> fsabr_prices(const pricing::PricingContext& ctx,
                                  const std::vector<double>& strikes, const FsabrParams& p,
                                  const McConfig& mc) {
    validate(p);
    pricing::validate(ctx);
    const double tau = ctx.tau();
    if (!(tau > 0.0)) throw InvalidArgument("fsabr_price needs tau > 0");
    if (mc.n_paths < 2) throw InvalidArgument("n_paths must be >= 2");
    for (double k : strikes)
        if (!(k > 0.0)) throw InvalidArgument("strike must be > 0");

    const std::size_t n = mc.n_steps;
    const Eigen::MatrixXd factor = joint_driver_factor(tau, n, p.hurst);
    const auto ni = static_cast<Eigen::Index>(n);
    const Eigen::MatrixXd b_from_w = factor.bottomLeftCorner(ni, ni);
    const Eigen::MatrixXd b_own = factor.bottomRightCorner(ni, ni);
    const double dt = tau / static_cast<double>(n);
    const double sqdt = std::sqrt(dt);
    const double df = ctx.discount();
    const double fwd = ctx.forward();
    const double rho = p.sabr.rho;
    const double rho_c = std::sqrt(1.0 - rho * rho);
    const std::size_t n_strikes = strikes.size();

    const std::size_t n_blocks = (mc.n_paths + kPathBlock - 1) / kPathBlock;
    // Per block: [sum_0, sumsq_0, sum_1, sumsq_1, ...]
    std::vector<std::vector<double>> partial(n_blocks, std::vector<double>(2 * n_strikes, 0.0));

    parallel_for(n_blocks, mc.workers, [&](std::size_t b) {
        CounterRng rng(mc.seed, b);
        const std::size_t begin = b * kPathBlock;
        const std::size_t count = std::min(kPathBlock, mc.n_paths - begin);
        Eigen::VectorXd z1(ni), z2(ni), fbm(ni);
        auto& acc = partial[b];
        for (std::size_t path = 0; path < count; ++path) {
            for (Eigen::Index i = 0; i < ni; ++i) z1[i] = rng.normal();
            for (Eigen::Index i = 0; i < ni; ++i) z2[i] = rng.normal();
            fbm.noalias() = b_from_w * z1;
            fbm.noalias() += b_own.triangularView<Eigen::Lower>() * z2;
            double log_s = std::log(ctx.spot);
            double b_prev = 0.0;
            for (Eigen::Index i = 0; i < ni; ++i) {
                const double alpha = p.sabr.alpha0 * std::exp(p.sabr.nu * b_prev);
                const double dw1 = sqdt * z1[i];
                const double dw2 = sqdt * rng.normal();
                log_s += (ctx.rate - 0.5 * alpha * alpha) * dt + alpha * (rho * dw1 + rho_c * dw2);
                b_prev = fbm[i];
            }
            const double s_t = std::exp(log_s);
            if (!std::isfinite(s_t)) {
                std::ostringstream os;
                os << "fSABR simulation produced a non-finite terminal price (block " << b
                   << ", path " << path << ", alpha0=" << p.sabr.alpha0 << ", nu=" << p.sabr.nu
                   << ", H=" << p.hurst << ")";
                throw NumericalError(os.str());
            }
            for (std::size_t k = 0; k < n_strikes; ++k) {
                const double strike = strikes[k];
                const double payoff = strike < fwd ? std::max(strike - s_t, 0.0)
                                                   : std::max(s_t - strike, 0.0);
                const double v = df * payoff;
                acc[2 * k] += v;
                acc[2 * k + 1] += v * v;
            }
        }
    });

    std::vector<double> total(2 * n_strikes, 0.0);
    for (const auto& acc : partial)
        for (std::size_t i = 0; i < total.size(); ++i) total[i] += acc[i];

    const auto count = static_cast<double>(mc.n_paths);
    std::vector<McPrice> out;
    out.reserve(n_strikes);
    for (std::size_t k = 0; k < n_strikes; ++k) {
        const double mean = total[2 * k] / count;
        const double var = std::max(total[2 * k + 1] / count - mean * mean, 0.0) * count / (count - 1.0);
        double price = mean;
        if (strikes[k] < fwd) price += ctx.spot - strikes[k] * df;
        out.push_back({price, std::sqrt(var / count)});
    }
    return out;
}

McPrice fsabr_price(const pricing::PricingContext& ctx, double strike, const FsabrParams& p,
                    const McConfig& mc) {
    return fsabr_prices(ctx, {strike}, p, mc).front();
}

Smile fsabr_smile(const pricing::PricingContext& ctx, const std::vector<double>& strikes,
                  const FsabrParams& p, const McConfig& mc) {
    const auto prices = fsabr_prices(ctx, strikes, p, mc);
    Smile smile;
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        try {
            const double iv = pricing::implied_vol(ctx, strikes[i], prices[i].price);
            smile.points.push_back({strikes[i], iv, prices[i].price, prices[i].std_error});
        } catch (const OutOfBandError&) {
            smile.dropped.push_back(strikes[i]);
        } catch (const ConvergenceError&) {
            smile.dropped.push_back(strikes[i]);
        }
    }
    if (smile.points.empty()) throw NumericalError("fSABR smile is empty: every strike was dropped");
    return smile;
}

}  // namespace adsvol::baselines
