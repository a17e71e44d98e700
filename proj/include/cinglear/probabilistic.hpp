#pragma once

#include <cstdint>
#include <span>

#include "cinglear/preprocess.hpp"
#include "cinglear/types.hpp"

namespace cinglear {

/// Monte Carlo draws per scored day.
inline constexpr int kDefaultSamples = 20000;

/// (1/N) sum_d e_d e_d^T, uncentered.
Matrix estimate_covariance(const Matrix& residuals);

/// Gaussian law of the next day's price vector in transformed space;
/// `transform` maps draws back to $/MWh.
struct PredictiveDistribution {
    Vector mean;
    Matrix covariance;
    SeriesTransform transform;

    [[nodiscard]] int hours() const { return static_cast<int>(mean.size()); }
    /// Back-transformed mean vector.
    [[nodiscard]] Vector point_forecast() const;
};

struct SampleInfo {
    double jitter = 0.0;
    int escalations = 0;
};

/// n x H draws in price units. The covariance is factored as
/// chol(Sigma + jitter I) with jitter = 1e-8 trace/H, escalated 10x up to
/// three times before giving up with NonPSD.
Matrix sample(const PredictiveDistribution& dist, int n = kDefaultSamples, std::uint64_t seed = 0,
              SampleInfo* info = nullptr);

struct Interval {
    Vector lower;
    Vector upper;
};

/// Per-column empirical (alpha/2, 1 - alpha/2) quantiles (linear interpolation).
Interval interval_from_samples(const Matrix& samples, double alpha);

Interval prediction_interval(const PredictiveDistribution& dist, double alpha,
                             int n = kDefaultSamples, std::uint64_t seed = 0);

/// (1/n) sum |x_m - y| - (1/(2 n^2)) sum_m sum_m' |x_m - x_m'|, evaluated
/// exactly in O(n log n) through the sorted-sample identity.
double crps_sample(std::span<const double> samples, double y);

/// CRPS of N(mu, sigma^2) at y; reduces to |y - mu| when sigma = 0.
double crps_gaussian_closed_form(double mu, double sigma, double y);

} // namespace cinglear
