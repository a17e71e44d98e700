#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cinglear/diagnostics.hpp"
#include "cinglear/errors.hpp"
#include "cinglear/solver.hpp"
#include "oracle.hpp"

using namespace cinglear;

namespace {

Errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::Io;
}

Matrix random_matrix(int rows, int cols, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> normal;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(gen);
    return m;
}

} // namespace

TEST(Diagnostics, SupportRules) {
    EXPECT_EQ(support(Matrix::Zero(4, 3), SupportRule::Threshold).size(), 0);
    Matrix one = Matrix::Zero(4, 3);
    one(2, 1) = 1e-300;
    EXPECT_EQ(support(one, SupportRule::Threshold).indices, std::vector<int>{2});
    Matrix norms = Matrix::Zero(3, 1);
    norms << 3, 1, 2;
    EXPECT_EQ(support(norms, SupportRule::TopS, 2).indices, (std::vector<int>{0, 2}));
    Matrix tied = Matrix::Ones(4, 2);
    EXPECT_EQ(support(tied, SupportRule::TopS, 2).indices, (std::vector<int>{0, 1}));
    EXPECT_EQ(code_of([&] { support(tied, SupportRule::TopS, 5); }), Errc::InvalidRule);
}

TEST(Diagnostics, ThresholdSupportMatchesSolverRows) {
    const Matrix X = random_matrix(40, 8, 1), P = random_matrix(40, 3, 2);
    const auto fit = fit_group_lasso(X, P, 0.3 * lambda_max(X, P));
    const auto S = support(fit.B, SupportRule::Threshold);
    for (int j = 0; j < 8; ++j) {
        const bool in = std::find(S.indices.begin(), S.indices.end(), j) != S.indices.end();
        EXPECT_EQ(in, fit.B.row(j).norm() > 0.0);
    }
}

TEST(Diagnostics, JacobiEigenvalues) {
    const Matrix A = oracle::random_spd(7, 0.1, 10.0, 3);
    Eigen::SelfAdjointEigenSolver<Matrix> ref(A);
    EXPECT_LE((jacobi_eigenvalues(A) - ref.eigenvalues()).cwiseAbs().maxCoeff(), 1e-12);
    Matrix indefinite(2, 2);
    indefinite << 0, 2, 2, 0;
    EXPECT_NEAR(symmetric_spectral_norm(indefinite), 2.0, 1e-14);
}

TEST(Diagnostics, PowerIterationForLargeMatrices) {
    const Matrix A = oracle::random_spd(300, 0.5, 3.0, 4);
    Eigen::SelfAdjointEigenSolver<Matrix> ref(A, Eigen::EigenvaluesOnly);
    EXPECT_NEAR(symmetric_spectral_norm(A), ref.eigenvalues().maxCoeff(), 1e-8);
}

TEST(Diagnostics, PsiExamples) {
    Matrix b(1, 3);
    b << 0.3, -1.2, 2.0;
    const SupportSet S{{0}, SupportRule::Threshold};
    EXPECT_NEAR(sparsity_overlap(b, Matrix::Identity(1, 1), S), 1.0, 1e-15);
    EXPECT_NEAR(sparsity_overlap(b, Matrix::Constant(1, 1, 4.0), S), 0.25, 1e-15);
    Matrix unit(1, 2);
    unit << 0.6, 0.8;
    EXPECT_EQ(sparsity_overlap(unit, Matrix::Identity(1, 1), S), 1.0);

    Matrix same(3, 4);
    for (int i = 0; i < 3; ++i) same.row(i) << 1, 2, -2, 4;
    same.row(1) *= 7.0;
    const SupportSet all{{0, 1, 2}, SupportRule::Threshold};
    EXPECT_NEAR(sparsity_overlap(same, Matrix::Identity(3, 3), all), 3.0, 1e-12);
}

TEST(Diagnostics, PsiErrors) {
    Matrix b = Matrix::Ones(2, 2);
    EXPECT_EQ(code_of([&] { sparsity_overlap(b, Matrix::Identity(1, 1), SupportSet{}); }), Errc::EmptySupport);
    const SupportSet S{{0, 1}, SupportRule::Threshold};
    EXPECT_EQ(code_of([&] { sparsity_overlap(b, Matrix::Ones(2, 2), S); }), Errc::SingularCovariance);
    Matrix ill(2, 2);
    ill << 1, 0, 0, 1e-13;
    EXPECT_EQ(code_of([&] { sparsity_overlap(b, ill, S); }), Errc::SingularCovariance);
}

TEST(Diagnostics, PsiInvariantToRowRescaling) {
    const Matrix B = random_matrix(5, 4, 6);
    const Matrix sigma = oracle::random_spd(5, 0.5, 2.0, 7);
    const SupportSet S{{0, 1, 2, 3, 4}, SupportRule::Threshold};
    Matrix scaled = B;
    scaled.row(1) *= 13.0;
    scaled.row(4) *= 0.01;
    EXPECT_NEAR(sparsity_overlap(B, sigma, S), sparsity_overlap(scaled, sigma, S), 1e-12);
}

TEST(Diagnostics, SampleComplexityExamples) {
    EXPECT_NEAR(sample_complexity(100, 1.0 + std::exp(1.0), 1.0, 1.0), 50.0, 1e-12);
    EXPECT_NEAR(sample_complexity(100, 11, 1, 1), 100.0 / (2.0 * std::log(10.0)), 1e-12);
    EXPECT_NEAR(sample_complexity(100, 11, 1, 1), 21.715, 5e-4);
    EXPECT_DOUBLE_EQ(sample_complexity(200, 11, 1, 1), 2.0 * sample_complexity(100, 11, 1, 1));
    EXPECT_EQ(code_of([] { sample_complexity(100, 3, 2, 1); }), Errc::InvalidDimensions);
    EXPECT_EQ(code_of([] { sample_complexity(100, 11, 1, 0); }), Errc::InvalidDimensions);
}

TEST(Diagnostics, ThetaCurveMatchesDenseReference) {
    const Matrix B = random_matrix(12, 4, 8);
    const Matrix cov = oracle::random_spd(12, 0.2, 5.0, 9);
    const std::vector<int> s_values = {1, 2, 3, 5, 8, 10};
    const auto curve = theta_curve(B, cov, 150, s_values);
    ASSERT_EQ(curve.size(), s_values.size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double ref = oracle::reference_theta(B, cov, 150, s_values[i]);
        EXPECT_NEAR(curve[i].theta, ref, 1e-10 * std::max(1.0, std::abs(ref)));
    }
    EXPECT_EQ(code_of([&] { theta_curve(B, cov, 150, std::vector<int>{11}); }), Errc::InvalidDimensions);
}

TEST(Diagnostics, ErrorCovarianceMode) {
    const Matrix B = random_matrix(6, 3, 10);
    const Matrix err = oracle::random_spd(3, 0.5, 2.0, 11);
    const auto curve = theta_curve(B, err, 80, std::vector<int>{2}, CovarianceMode::Error);
    const auto S = support(B, SupportRule::TopS, 2);
    Matrix Z(2, 3);
    for (int i = 0; i < 2; ++i) Z.row(i) = B.row(S.indices[i]) / B.row(S.indices[i]).norm();
    const Matrix K = Z * err.inverse() * Z.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (K + K.transpose()));
    EXPECT_NEAR(curve[0].psi, eig.eigenvalues().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Diagnostics, CoefficientCorrelation) {
    std::vector<Matrix> constant(3, Matrix::Ones(4, 3));
    const auto flat = coefficient_correlation(constant, std::vector<int>{0, 1});
    EXPECT_EQ(flat.correlation, Matrix::Zero(3, 3));
    EXPECT_EQ(flat.degenerate, std::vector<bool>(3, true));

    std::vector<Matrix> moving;
    for (int l = 0; l < 5; ++l) {
        Matrix B = Matrix::Zero(4, 3);
        B.row(1) << l, 2.0 * l + 1.0, -l;
        moving.push_back(B);
    }
    const auto co = coefficient_correlation(moving, std::vector<int>{1});
    EXPECT_NEAR(co.correlation(0, 1), 1.0, 1e-15);
    EXPECT_NEAR(co.correlation(0, 2), -1.0, 1e-15);
    for (int h = 0; h < 3; ++h) EXPECT_EQ(co.correlation(h, h), 1.0);
    EXPECT_LE((co.correlation - co.correlation.transpose()).cwiseAbs().maxCoeff(), 0.0);

    EXPECT_EQ(code_of([&] { coefficient_correlation(std::span<const Matrix>(moving.data(), 1), std::vector<int>{1}); }),
              Errc::TooFewMatrices);
}
