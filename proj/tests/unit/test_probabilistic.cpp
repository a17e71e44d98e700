#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cinglear/errors.hpp"
#include "cinglear/probabilistic.hpp"

using namespace cinglear;

namespace {

PredictiveDistribution gaussian(const Vector& mean, const Matrix& cov) {
    PredictiveDistribution d;
    d.mean = mean;
    d.covariance = cov;
    return d;
}

Errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::Io;
}

// O(n^2) form of the sample CRPS, straight from its definition.
double crps_pairwise(const std::vector<double>& x, double y) {
    const double n = static_cast<double>(x.size());
    double a = 0.0, b = 0.0;
    for (double xi : x) {
        a += std::abs(xi - y);
        for (double xj : x) b += std::abs(xi - xj);
    }
    return a / n - b / (2.0 * n * n);
}

} // namespace

TEST(Probabilistic, CovarianceExamples) {
    EXPECT_EQ(estimate_covariance(Matrix::Zero(5, 3)), Matrix::Zero(3, 3));
    Matrix r(2, 1);
    r << 1, -1;
    EXPECT_DOUBLE_EQ(estimate_covariance(r)(0, 0), 1.0);
    // Uncentered: a constant residual is not removed.
    Matrix c = Matrix::Constant(4, 2, 2.0);
    EXPECT_DOUBLE_EQ(estimate_covariance(c)(0, 1), 4.0);
    EXPECT_EQ(code_of([] { estimate_covariance(Matrix(0, 3)); }), Errc::EmptyResiduals);
}

TEST(Probabilistic, CovarianceSymmetricPsd) {
    std::mt19937 gen(1);
    std::normal_distribution<double> normal;
    Matrix r(3, 6); // fewer rows than columns: rank deficient
    for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = normal(gen);
    const Matrix s = estimate_covariance(r);
    EXPECT_LE((s - s.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);
}

TEST(Probabilistic, ZeroCovarianceSamplesAtMean) {
    Vector mean(3);
    mean << 0.1, -0.2, 0.3;
    auto dist = gaussian(mean, Matrix::Zero(3, 3));
    dist.transform.enabled = true;
    dist.transform.scaler = {40.0, 10.0};
    SampleInfo info;
    const Matrix s = sample(dist, 100, 3, &info);
    EXPECT_EQ(info.jitter, 0.0);
    for (Eigen::Index i = 0; i < s.rows(); ++i) EXPECT_EQ(s.row(i), dist.point_forecast().transpose());
    const auto band = prediction_interval(dist, 0.1, 100, 3);
    EXPECT_EQ(band.lower, dist.point_forecast());
    EXPECT_EQ(band.upper, dist.point_forecast());
}

TEST(Probabilistic, SampleMeanWithinCltBound) {
    Matrix cov(2, 2);
    cov << 4.0, 1.2, 1.2, 1.0;
    Vector mean(2);
    mean << 5.0, -1.0;
    const Matrix s = sample(gaussian(mean, cov), kDefaultSamples, 99);
    ASSERT_EQ(s.rows(), 20000);
    for (int h = 0; h < 2; ++h)
        EXPECT_LE(std::abs(s.col(h).mean() - mean(h)), 3.0 * std::sqrt(cov(h, h) / 20000.0));
    const Matrix centered = s.rowwise() - s.colwise().mean();
    const Matrix empirical = centered.transpose() * centered / 20000.0;
    EXPECT_NEAR(empirical(0, 1), 1.2, 0.1);
}

TEST(Probabilistic, SamplingIsDeterministicPerSeed) {
    Matrix cov = Matrix::Identity(3, 3);
    const auto d = gaussian(Vector::Zero(3), cov);
    EXPECT_EQ(sample(d, 50, 7), sample(d, 50, 7));
    EXPECT_NE(sample(d, 50, 7), sample(d, 50, 8));
}

TEST(Probabilistic, JitterRescuesRankDeficientCovariance) {
    Matrix cov = Matrix::Ones(3, 3); // rank one
    SampleInfo info;
    const Matrix s = sample(gaussian(Vector::Zero(3), cov), 10, 1, &info);
    EXPECT_TRUE(s.allFinite());
    EXPECT_GE(info.jitter, 1e-8);
}

TEST(Probabilistic, IndefiniteCovarianceFails) {
    Matrix cov = Matrix::Zero(2, 2);
    cov(0, 0) = 2.0;
    cov(1, 1) = -1.0;
    EXPECT_EQ(code_of([&] { sample(gaussian(Vector::Zero(2), cov), 10, 1); }), Errc::NonPSD);
}

TEST(Probabilistic, IntervalsNest) {
    Matrix cov(2, 2);
    cov << 1.0, 0.3, 0.3, 2.0;
    auto dist = gaussian(Vector::Zero(2), cov);
    dist.transform.enabled = true;
    dist.transform.scaler = {30.0, 8.0};
    const auto ninety = prediction_interval(dist, 0.1, 5000, 4);
    const auto fifty = prediction_interval(dist, 0.5, 5000, 4);
    for (int h = 0; h < 2; ++h) {
        EXPECT_LE(ninety.lower(h), fifty.lower(h));
        EXPECT_GE(ninety.upper(h), fifty.upper(h));
    }
    EXPECT_EQ(code_of([&] { prediction_interval(dist, 1.0); }), Errc::InvalidLevel);
    EXPECT_EQ(code_of([&] { prediction_interval(dist, 0.0); }), Errc::InvalidLevel);
}

TEST(Probabilistic, IntervalQuantilesInterpolate) {
    Matrix s(5, 1);
    s << 5, 1, 4, 2, 3;
    const auto band = interval_from_samples(s, 0.5);
    EXPECT_DOUBLE_EQ(band.lower(0), 2.0);
    EXPECT_DOUBLE_EQ(band.upper(0), 4.0);
}

TEST(Probabilistic, CrpsSampleExamples) {
    const std::vector<double> two = {1.0, 3.0};
    EXPECT_DOUBLE_EQ(crps_sample(two, 2.0), 0.5);
    const std::vector<double> same = {4.0, 4.0, 4.0};
    EXPECT_EQ(crps_sample(same, 4.0), 0.0);
    const std::vector<double> one = {1.0};
    EXPECT_EQ(code_of([&] { crps_sample(one, 0.0); }), Errc::TooFewSamples);
}

TEST(Probabilistic, CrpsSampleMatchesPairwiseDefinition) {
    std::mt19937 gen(5);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> x(37 + trial);
        for (auto& v : x) v = 3.0 * normal(gen);
        const double y = normal(gen);
        EXPECT_NEAR(crps_sample(x, y), crps_pairwise(x, y), 1e-12);
        EXPECT_GE(crps_sample(x, y), 0.0);
    }
}

TEST(Probabilistic, ClosedFormExamples) {
    EXPECT_EQ(crps_gaussian_closed_form(2.0, 0.0, 2.0), 0.0);
    EXPECT_EQ(crps_gaussian_closed_form(2.0, 0.0, 5.0), 3.0);
    EXPECT_NEAR(crps_gaussian_closed_form(0.0, 1.0, 0.0), 0.23370, 1e-5);
    const double base = crps_gaussian_closed_form(1.0, 2.0, -0.5);
    EXPECT_NEAR(crps_gaussian_closed_form(3.0, 6.0, -1.5), 3.0 * base, 1e-12);
}

TEST(Probabilistic, SampleCrpsConvergesToClosedForm) {
    const Matrix s = sample(gaussian(Vector::Zero(1), Matrix::Identity(1, 1)), 20000, 123);
    const Vector col = s.col(0);
    const double estimate = crps_sample(std::span<const double>(col.data(), col.size()), 0.0);
    EXPECT_NEAR(estimate, 0.23370, 0.01 * 0.23370);
}

TEST(Probabilistic, BackTransformPreservesRanks) {
    auto dist = gaussian(Vector::Zero(1), Matrix::Identity(1, 1));
    const Matrix raw = sample(dist, 200, 17);
    dist.transform.enabled = true;
    dist.transform.scaler = {50.0, 5.0};
    const Matrix priced = sample(dist, 200, 17);
    for (int i = 0; i < 199; ++i)
        EXPECT_EQ(raw(i, 0) < raw(i + 1, 0), priced(i, 0) < priced(i + 1, 0));
}
