#pragma once

#include <span>
#include <string>
#include <vector>

#include "cinglear/types.hpp"

namespace cinglear {

enum class SupportRule {
    Threshold, // rows with a strictly positive l2 norm
    TopS,      // the s rows of largest norm, ties to the lower index
};

struct SupportSet {
    std::vector<int> indices; // sorted ascending, 0-based rows of B
    SupportRule rule = SupportRule::Threshold;

    [[nodiscard]] int size() const { return static_cast<int>(indices.size()); }
};

SupportSet support(const Matrix& B, SupportRule rule, int s = 0);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
Vector jacobi_eigenvalues(Matrix A, double tol = 1e-15, int max_sweeps = 100);

/// max |eigenvalue| of a symmetric matrix; Jacobi up to 256 x 256, power
/// iteration above.
double symmetric_spectral_norm(const Matrix& A);

/// psi(B) = || Z_S^T Sigma_SS^{-1} Z_S ||_2 with Z_S the row-normalized
/// rows of B in S and Sigma_SS an |S| x |S| covariance block.
double sparsity_overlap(const Matrix& B, const Matrix& sigma_ss, const SupportSet& S);

/// Variant pairing the H x H forecast-error covariance with the outputs:
/// || Z_S Sigma^{-1} Z_S^T ||_2.
double sparsity_overlap_error_covariance(const Matrix& B, const Matrix& error_cov, const SupportSet& S);

/// theta = N / (2 psi log(M - s)).
double sample_complexity(double n_rows, double n_features, double s, double psi);

enum class CovarianceMode { Design, Error };

struct ThetaPoint {
    int s = 0;
    double psi = 0.0;
    double theta = 0.0;
};

/// For each s: top-s support of B, psi against `covariance` (M x M feature
/// covariance in Design mode, H x H error covariance in Error mode), theta.
std::vector<ThetaPoint> theta_curve(const Matrix& B, const Matrix& covariance, int n_rows,
                                    std::span<const int> s_values,
                                    CovarianceMode mode = CovarianceMode::Design);

struct CoefficientCorrelation {
    Matrix correlation;           // H x H
    std::vector<bool> degenerate; // hours with zero variance (rows/cols reported as 0)
};

/// Pearson correlation between hourly coefficient series of the rows in
/// `block`, pooled over the L matrices in `history`.
CoefficientCorrelation coefficient_correlation(std::span<const Matrix> history,
                                               std::span<const int> block);

} // namespace cinglear
