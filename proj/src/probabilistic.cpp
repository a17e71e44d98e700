#include "cinglear/probabilistic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cinglear/errors.hpp"
#include "cinglear/random.hpp"

namespace cinglear {

namespace {

double sorted_quantile(const std::vector<double>& sorted, double prob) {
    const double pos = prob * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

} // namespace

Matrix estimate_covariance(const Matrix& residuals) {
    if (residuals.rows() == 0) throw Error(Errc::EmptyResiduals, "no residual rows");
    Matrix cov = residuals.transpose() * residuals / static_cast<double>(residuals.rows());
    // Symmetrize away rounding from the product.
    return 0.5 * (cov + cov.transpose());
}

Vector PredictiveDistribution::point_forecast() const {
    return mean.unaryExpr([this](double t) { return transform.backward(t); });
}

Matrix sample(const PredictiveDistribution& dist, int n, std::uint64_t seed, SampleInfo* info) {
    const int H = dist.hours();
    if (n < 1) throw Error(Errc::TooFewSamples, "need at least one sample");
    if (dist.covariance.rows() != H || dist.covariance.cols() != H)
        throw Error(Errc::ShapeMismatch, "covariance does not match the mean");
    if (!dist.covariance.allFinite() || !dist.mean.allFinite())
        throw Error(Errc::NonFiniteInput, "distribution has non-finite entries");
    const double asym = (dist.covariance - dist.covariance.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(1.0, dist.covariance.cwiseAbs().maxCoeff()))
        throw Error(Errc::NonPSD, "covariance is not symmetric");

    Matrix draws(H, n);
    const double trace = dist.covariance.trace();
    SampleInfo local;
    if (trace > 0.0) {
        double jitter = 1e-8 * trace / H;
        Eigen::LLT<Matrix> llt;
        int attempt = 0;
        for (;; ++attempt) {
            llt.compute(dist.covariance + jitter * Matrix::Identity(H, H));
            if (llt.info() == Eigen::Success) break;
            if (attempt == 3) throw Error(Errc::NonPSD, "Cholesky failed after jitter escalation");
            jitter *= 10.0;
        }
        local = {jitter, attempt};
        Rng rng(seed);
        for (int m = 0; m < n; ++m)
            for (int h = 0; h < H; ++h) draws(h, m) = rng.normal();
        draws = llt.matrixL() * draws;
    } else if (trace < 0.0) {
        throw Error(Errc::NonPSD, "negative covariance trace");
    } else {
        draws.setZero();
    }
    if (info) *info = local;

    Matrix out(n, H);
    for (int h = 0; h < H; ++h) {
        const double mu = dist.mean(h);
        for (int m = 0; m < n; ++m) out(m, h) = dist.transform.backward(mu + draws(h, m));
    }
    return out;
}

Interval interval_from_samples(const Matrix& samples, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::InvalidLevel, "alpha must lie in (0, 1)");
    if (samples.rows() < 1) throw Error(Errc::TooFewSamples, "no samples");
    Interval out{Vector(samples.cols()), Vector(samples.cols())};
    std::vector<double> column(static_cast<std::size_t>(samples.rows()));
    for (Eigen::Index h = 0; h < samples.cols(); ++h) {
        for (Eigen::Index m = 0; m < samples.rows(); ++m) column[m] = samples(m, h);
        std::sort(column.begin(), column.end());
        out.lower(h) = sorted_quantile(column, alpha / 2.0);
        out.upper(h) = sorted_quantile(column, 1.0 - alpha / 2.0);
    }
    return out;
}

Interval prediction_interval(const PredictiveDistribution& dist, double alpha, int n,
                             std::uint64_t seed) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::InvalidLevel, "alpha must lie in (0, 1)");
    return interval_from_samples(sample(dist, n, seed), alpha);
}

double crps_sample(std::span<const double> samples, double y) {
    const auto n = samples.size();
    if (n < 2) throw Error(Errc::TooFewSamples, "CRPS needs at least two samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double nd = static_cast<double>(n);
    double abs_error = 0.0;
    double spread = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        abs_error += std::abs(sorted[i] - y);
        // sum_{m,m'} |x_m - x_m'| = 2 sum_i (2i - n - 1) x_(i), i 1-based.
        spread += (2.0 * static_cast<double>(i + 1) - nd - 1.0) * sorted[i];
    }
    return abs_error / nd - spread / (nd * nd);
}

double crps_gaussian_closed_form(double mu, double sigma, double y) {
    if (!(sigma >= 0.0)) throw Error(Errc::InvalidSpec, "sigma must be non-negative");
    if (sigma == 0.0) return std::abs(y - mu);
    const double z = (y - mu) / sigma;
    const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
    const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    return sigma * (z * (2.0 * cdf - 1.0) + 2.0 * pdf - 1.0 / std::sqrt(std::numbers::pi));
}

} // namespace cinglear
