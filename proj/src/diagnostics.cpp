#include "cinglear/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cinglear/errors.hpp"

namespace cinglear {

SupportSet support(const Matrix& B, SupportRule rule, int s) {
    if (!B.allFinite()) throw Error(Errc::NonFiniteInput, "coefficients are not finite");
    SupportSet out;
    out.rule = rule;
    Vector norms(B.rows());
    for (Eigen::Index j = 0; j < B.rows(); ++j) norms(j) = B.row(j).stableNorm();
    switch (rule) {
    case SupportRule::Threshold:
        for (Eigen::Index j = 0; j < norms.size(); ++j)
            if (norms(j) > 0.0) out.indices.push_back(static_cast<int>(j));
        break;
    case SupportRule::TopS: {
        if (s < 0 || s > B.rows()) throw Error(Errc::InvalidRule, "top-s needs 0 <= s <= M");
        std::vector<int> order(static_cast<std::size_t>(B.rows()));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return norms(a) > norms(b); });
        out.indices.assign(order.begin(), order.begin() + s);
        std::sort(out.indices.begin(), out.indices.end());
        break;
    }
    default: throw Error(Errc::InvalidRule, "unknown support rule");
    }
    return out;
}

Vector jacobi_eigenvalues(Matrix A, double tol, int max_sweeps) {
    const Eigen::Index n = A.rows();
    if (A.cols() != n) throw Error(Errc::ShapeMismatch, "matrix must be square");
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
        if (std::sqrt(off) <= tol * std::max(1.0, A.norm())) break;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (apq == 0.0) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    Vector eig = A.diagonal();
    std::sort(eig.data(), eig.data() + eig.size());
    return eig;
}

namespace {

double power_iteration_norm(const Matrix& A) {
    Vector v = Vector::Ones(A.rows()).normalized();
    double estimate = 0.0;
    for (int it = 0; it < 10000; ++it) {
        Vector w = A * v;
        const double next = w.norm();
        if (next == 0.0) return 0.0;
        v = w / next;
        if (std::abs(next - estimate) <= 1e-14 * next) return next;
        estimate = next;
    }
    return estimate;
}

Matrix normalized_rows(const Matrix& B, const SupportSet& S) {
    Matrix Z(S.size(), B.cols());
    for (int i = 0; i < S.size(); ++i) {
        const int j = S.indices[i];
        if (j < 0 || j >= B.rows()) throw Error(Errc::InvalidRule, "support index out of range");
        const double norm = B.row(j).stableNorm();
        Z.row(i) = norm > 0.0 ? Matrix(B.row(j) / norm) : Matrix::Zero(1, B.cols());
    }
    return Z;
}

// Cholesky factor of a covariance block after a conditioning check.
Eigen::LLT<Matrix> factor_covariance(const Matrix& sigma) {
    if (sigma.rows() != sigma.cols()) throw Error(Errc::ShapeMismatch, "covariance must be square");
    const Vector eig = jacobi_eigenvalues(0.5 * (sigma + sigma.transpose()));
    const double hi = eig.cwiseAbs().maxCoeff();
    if (!(eig.minCoeff() > 0.0) || hi / eig.minCoeff() > 1e12)
        throw Error(Errc::SingularCovariance, "covariance block is singular or ill-conditioned");
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw Error(Errc::SingularCovariance, "covariance block is not positive definite");
    return llt;
}

// ||Y^T C^{-1} Y||_2 via whichever of the two Gram forms is smaller.
double quadratic_form_norm(const Matrix& Y, const Matrix& C) {
    const auto llt = factor_covariance(C);
    const Matrix W = llt.matrixL().solve(Y); // L^{-1} Y
    if (W.rows() <= W.cols()) return symmetric_spectral_norm(W * W.transpose());
    return symmetric_spectral_norm(W.transpose() * W);
}

} // namespace

double symmetric_spectral_norm(const Matrix& A) {
    if (A.rows() == 0) return 0.0;
    const Matrix sym = 0.5 * (A + A.transpose());
    if (sym.rows() > 256) return power_iteration_norm(sym);
    return jacobi_eigenvalues(sym).cwiseAbs().maxCoeff();
}

double sparsity_overlap(const Matrix& B, const Matrix& sigma_ss, const SupportSet& S) {
    if (S.size() == 0) throw Error(Errc::EmptySupport, "support is empty");
    if (sigma_ss.rows() != S.size()) throw Error(Errc::ShapeMismatch, "covariance block size != |S|");
    return quadratic_form_norm(normalized_rows(B, S), sigma_ss);
}

double sparsity_overlap_error_covariance(const Matrix& B, const Matrix& error_cov, const SupportSet& S) {
    if (S.size() == 0) throw Error(Errc::EmptySupport, "support is empty");
    if (error_cov.rows() != B.cols()) throw Error(Errc::ShapeMismatch, "error covariance must be H x H");
    return quadratic_form_norm(normalized_rows(B, S).transpose(), error_cov);
}

double sample_complexity(double n_rows, double n_features, double s, double psi) {
    if (!(n_features - s >= 2.0) || !(psi > 0.0) || !(n_rows > 0.0))
        throw Error(Errc::InvalidDimensions, "need M - s >= 2, psi > 0 and N > 0");
    return n_rows / (2.0 * psi * std::log(n_features - s));
}

std::vector<ThetaPoint> theta_curve(const Matrix& B, const Matrix& covariance, int n_rows,
                                    std::span<const int> s_values, CovarianceMode mode) {
    const int M = static_cast<int>(B.rows());
    std::vector<ThetaPoint> curve;
    curve.reserve(s_values.size());
    for (int s : s_values) {
        if (s < 1 || s > M - 2) throw Error(Errc::InvalidDimensions, "s must lie in [1, M - 2]");
        const auto S = support(B, SupportRule::TopS, s);
        double psi = 0.0;
        if (mode == CovarianceMode::Design) {
            if (covariance.rows() != M || covariance.cols() != M)
                throw Error(Errc::ShapeMismatch, "design covariance must be M x M");
            Matrix block(s, s);
            for (int a = 0; a < s; ++a)
                for (int b = 0; b < s; ++b) block(a, b) = covariance(S.indices[a], S.indices[b]);
            psi = sparsity_overlap(B, block, S);
        } else {
            psi = sparsity_overlap_error_covariance(B, covariance, S);
        }
        curve.push_back({s, psi, sample_complexity(n_rows, M, s, psi)});
    }
    return curve;
}

CoefficientCorrelation coefficient_correlation(std::span<const Matrix> history,
                                               std::span<const int> block) {
    if (history.size() < 2) throw Error(Errc::TooFewMatrices, "need at least two coefficient matrices");
    if (block.empty()) throw Error(Errc::InvalidRule, "empty feature block");
    const auto H = history.front().cols();
    const auto len = static_cast<Eigen::Index>(history.size() * block.size());
    Matrix series(len, H);
    Eigen::Index r = 0;
    for (const auto& B : history) {
        if (B.cols() != H) throw Error(Errc::ShapeMismatch, "coefficient matrices differ in width");
        for (int j : block) {
            if (j < 0 || j >= B.rows()) throw Error(Errc::InvalidRule, "block row out of range");
            series.row(r++) = B.row(j);
        }
    }
    series.rowwise() -= series.colwise().mean();
    const Vector sd = series.colwise().norm().transpose();

    CoefficientCorrelation out;
    out.correlation = Matrix::Zero(H, H);
    out.degenerate.assign(static_cast<std::size_t>(H), false);
    for (Eigen::Index h = 0; h < H; ++h)
        out.degenerate[h] = !(sd(h) > 1e-14 * std::max(1.0, series.col(h).cwiseAbs().maxCoeff()));
    for (Eigen::Index a = 0; a < H; ++a) {
        if (out.degenerate[a]) continue;
        out.correlation(a, a) = 1.0;
        for (Eigen::Index b = a + 1; b < H; ++b) {
            if (out.degenerate[b]) continue;
            const double c = std::clamp(series.col(a).dot(series.col(b)) / (sd(a) * sd(b)), -1.0, 1.0);
            out.correlation(a, b) = out.correlation(b, a) = c;
        }
    }
    return out;
}

} // namespace cinglear
