#include "cinglear/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cinglear/errors.hpp"

namespace cinglear {

namespace {

using RowVector = Eigen::RowVectorXd;

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) throw Error(Errc::NonFiniteInput, std::string(what) + " has non-finite entries");
}

// Norm of 2 * row, evaluated through a contiguous buffer so that the
// lambda_max computation and the solver's zero test round identically.
template <class Row>
double doubled_norm(RowVector& buffer, const Row& row) {
    buffer = 2.0 * row;
    return buffer.norm();
}

/// Block coordinate descent over the Gram representation. S tracks
/// X^T R / N for the current residual R, so a block update costs O(M H)
/// and a scan over inactive groups O(H).
class BlockDescent {
public:
    BlockDescent(const Matrix& gram, Eigen::Ref<const Matrix> xty, double yty, double lambda,
                 Matrix& B)
        : gram_(gram), xty_(xty), yty_(yty), lambda_(lambda), B_(B),
          S_(xty - gram * B), active_(static_cast<std::size_t>(gram.rows()), 0),
          v_(xty.cols()), next_(xty.cols()), delta_(xty.cols()) {
        for (Eigen::Index j = 0; j < B_.rows(); ++j)
            active_[static_cast<std::size_t>(j)] = B_.row(j).cwiseAbs().maxCoeff() > 0.0;
    }

    /// One pass over `groups`; returns the largest absolute coefficient change.
    double sweep(std::span<const int> groups) {
        double max_delta = 0.0;
        for (int j : groups) max_delta = std::max(max_delta, update(j));
        return max_delta;
    }

    double update(int j) {
        const double diag = gram_(j, j);
        const auto uj = static_cast<std::size_t>(j);
        if (!(diag > 0.0)) {
            // A zero column carries no information; its block stays at zero.
            active_[uj] = 0;
            return 0.0;
        }
        const double norm = doubled_norm(v_, S_.row(j) + diag * B_.row(j));
        if (norm <= lambda_) {
            next_.setZero();
        } else {
            next_ = ((1.0 - lambda_ / norm) / (2.0 * diag)) * v_;
        }
        delta_ = next_ - B_.row(j);
        const double change = delta_.cwiseAbs().maxCoeff();
        if (change > 0.0) {
            S_.noalias() -= gram_.col(j) * delta_;
            B_.row(j) = next_;
        }
        active_[uj] = norm > lambda_;
        return change;
    }

    [[nodiscard]] std::vector<int> active_groups() const {
        std::vector<int> out;
        for (std::size_t j = 0; j < active_.size(); ++j)
            if (active_[j]) out.push_back(static_cast<int>(j));
        return out;
    }

    [[nodiscard]] double relative_change(double max_delta) const {
        if (max_delta == 0.0) return 0.0;
        const double scale = B_.cwiseAbs().maxCoeff();
        return scale > 0.0 ? max_delta / scale : std::numeric_limits<double>::infinity();
    }

    [[nodiscard]] double objective() const {
        double inner = 0.0, penalty = 0.0;
        for (std::size_t j = 0; j < active_.size(); ++j) {
            if (!active_[j]) continue;
            const auto i = static_cast<Eigen::Index>(j);
            inner += B_.row(i).dot(xty_.row(i) + S_.row(i));
            penalty += B_.row(i).norm();
        }
        return yty_ - inner + lambda_ * penalty;
    }

    [[nodiscard]] double kkt() const { return kkt_from_correlation(S_, B_, lambda_); }

    void refresh() { S_ = xty_ - gram_ * B_; }

    static double kkt_from_correlation(const Matrix& S, const Matrix& B, double lambda) {
        double worst = 0.0;
        RowVector g(S.cols());
        for (Eigen::Index j = 0; j < S.rows(); ++j) {
            g = 2.0 * S.row(j);
            const double bnorm = B.row(j).norm();
            double violation = 0.0;
            if (bnorm > 0.0) {
                violation = (g - (lambda / bnorm) * B.row(j)).norm();
            } else {
                violation = std::max(0.0, g.norm() - lambda);
            }
            worst = std::max(worst, violation);
        }
        return worst;
    }

private:
    const Matrix& gram_;
    Eigen::Ref<const Matrix> xty_;
    double yty_;
    double lambda_;
    Matrix& B_;
    Matrix S_;
    std::vector<char> active_;
    RowVector v_, next_, delta_;
};

FitDiagnostics run_descent(const Matrix& gram, Eigen::Ref<const Matrix> xty, double yty,
                           double lambda, const SolverOptions& options, Matrix& B,
                           std::span<const int> order) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw Error(Errc::NonFiniteInput, "lambda must be finite and non-negative");
    if (options.max_iter < 1) throw Error(Errc::InvalidSpec, "max_iter must be >= 1");
    const int M = static_cast<int>(gram.rows());
    std::vector<int> full(order.begin(), order.end());
    if (full.empty()) {
        full.resize(M);
        std::iota(full.begin(), full.end(), 0);
    } else if (static_cast<int>(full.size()) != M) {
        throw Error(Errc::ShapeMismatch, "group order must list every group once");
    }

    BlockDescent descent(gram, xty, yty, lambda, B);
    FitDiagnostics diag;
    diag.lambda = lambda;
    const auto record = [&] {
        ++diag.iterations;
        if (options.record_objective) diag.objective_trace.push_back(descent.objective());
    };

    while (diag.iterations < options.max_iter) {
        const double change = descent.sweep(full);
        record();
        if (descent.relative_change(change) <= options.tol && descent.kkt() <= options.kkt_tol) {
            diag.converged = true;
            break;
        }
        if (!options.active_set) continue;
        while (diag.iterations < options.max_iter) {
            const auto active = descent.active_groups();
            if (active.empty()) break;
            const double inner = descent.sweep(active);
            record();
            if (descent.relative_change(inner) <= options.tol) break;
        }
    }
    descent.refresh();
    diag.objective = descent.objective();
    diag.kkt_residual = descent.kkt();
    return diag;
}

void check_gram(const GramSystem& system) {
    if (system.n_features() == 0 || system.n_outputs() == 0 || system.n_rows == 0)
        throw Error(Errc::EmptyDesign, "empty design");
}

} // namespace

GramSystem make_gram_system(const Matrix& X, const Matrix& P) {
    if (X.rows() == 0 || X.cols() == 0 || P.cols() == 0)
        throw Error(Errc::EmptyDesign, "empty design");
    if (X.rows() != P.rows()) throw Error(Errc::ShapeMismatch, "X and P row counts differ");
    require_finite(X, "X");
    require_finite(P, "P");
    const double n = static_cast<double>(X.rows());
    GramSystem system;
    system.n_rows = static_cast<int>(X.rows());
    system.gram.noalias() = X.transpose() * X;
    system.gram /= n;
    system.xty.noalias() = X.transpose() * P;
    system.xty /= n;
    system.yty = P.colwise().squaredNorm().transpose() / n;
    return system;
}

double lambda_max(const GramSystem& system) {
    check_gram(system);
    RowVector buffer(system.n_outputs());
    double best = 0.0;
    for (Eigen::Index j = 0; j < system.xty.rows(); ++j)
        best = std::max(best, doubled_norm(buffer, system.xty.row(j)));
    return best;
}

double lambda_max(const Matrix& X, const Matrix& P) { return lambda_max(make_gram_system(X, P)); }

std::vector<double> lambda_grid(double lambda_max, int n, double ratio) {
    if (!(lambda_max > 0.0) || !std::isfinite(lambda_max) || n < 2 || !(ratio > 0.0) ||
        !(ratio < 1.0))
        throw Error(Errc::InvalidGrid, "need lambda_max > 0, n >= 2 and 0 < ratio < 1");
    std::vector<double> grid(static_cast<std::size_t>(n));
    const double log_ratio = std::log(ratio);
    for (int i = 0; i < n; ++i)
        grid[i] = lambda_max * std::exp(log_ratio * static_cast<double>(i) / (n - 1));
    grid.front() = lambda_max;
    grid.back() = lambda_max * ratio;
    return grid;
}

Vector group_soft_threshold(const Vector& v, double t) {
    if (!(t >= 0.0)) throw Error(Errc::InvalidSpec, "threshold must be non-negative");
    const double norm = v.norm();
    if (norm <= t) return Vector::Zero(v.size());
    return (1.0 - t / norm) * v;
}

double group_lasso_objective(const Matrix& X, const Matrix& P, const Matrix& B, double lambda) {
    const double n = static_cast<double>(X.rows());
    return (P - X * B).squaredNorm() / n + lambda * B.rowwise().norm().sum();
}

double kkt_residual(const GramSystem& system, const Matrix& B, double lambda) {
    const Matrix S = system.xty - system.gram * B;
    return BlockDescent::kkt_from_correlation(S, B, lambda);
}

double kkt_residual(const Matrix& X, const Matrix& P, const Matrix& B, double lambda) {
    const double n = static_cast<double>(X.rows());
    const Matrix S = X.transpose() * (P - X * B) / n;
    return BlockDescent::kkt_from_correlation(S, B, lambda);
}

GroupLassoFit fit_group_lasso(const GramSystem& system, double lambda, const SolverOptions& options,
                              const Matrix* warm_start, std::span<const int> order) {
    check_gram(system);
    GroupLassoFit fit;
    if (warm_start) {
        if (warm_start->rows() != system.n_features() || warm_start->cols() != system.n_outputs())
            throw Error(Errc::ShapeMismatch, "warm start has the wrong shape");
        fit.B = *warm_start;
    } else {
        fit.B = Matrix::Zero(system.n_features(), system.n_outputs());
    }
    fit.diagnostics = run_descent(system.gram, system.xty, system.yty.sum(), lambda, options, fit.B, order);
    return fit;
}

GroupLassoFit fit_group_lasso(const Matrix& X, const Matrix& P, double lambda,
                              const SolverOptions& options, const Matrix* warm_start,
                              std::span<const int> order) {
    return fit_group_lasso(make_gram_system(X, P), lambda, options, warm_start, order);
}

LassoFit fit_lasso_per_hour(const GramSystem& system, int hour, double lambda,
                            const SolverOptions& options, const Vector* warm_start) {
    check_gram(system);
    if (hour < 0 || hour >= system.n_outputs()) throw Error(Errc::ShapeMismatch, "hour out of range");
    Matrix beta = warm_start ? Matrix(*warm_start) : Matrix::Zero(system.n_features(), 1);
    if (beta.rows() != system.n_features())
        throw Error(Errc::ShapeMismatch, "warm start has the wrong length");
    LassoFit fit;
    // With one output the group prox is the scalar soft threshold.
    fit.diagnostics = run_descent(system.gram, system.xty.col(hour), system.yty(hour), lambda,
                                  options, beta, {});
    fit.beta = beta.col(0);
    return fit;
}

LassoFit fit_lasso_per_hour(const Matrix& X, const Vector& p, double lambda,
                            const SolverOptions& options) {
    return fit_lasso_per_hour(make_gram_system(X, Matrix(p)), 0, lambda, options);
}

std::size_t select_lambda(std::span<const double> cv_error, double tie_tol) {
    if (cv_error.empty()) throw Error(Errc::InvalidGrid, "empty CV error curve");
    const double best = *std::min_element(cv_error.begin(), cv_error.end());
    for (std::size_t i = 0; i < cv_error.size(); ++i)
        if (cv_error[i] <= best + tie_tol) return i;
    return 0;
}

namespace {

struct Fold {
    GramSystem system;
    Eigen::Index first = 0;
    Eigen::Index size = 0;
    Eigen::RowVectorXd target_mean; // training-rows mean of P
};

std::vector<Fold> make_folds(const Matrix& X, const Matrix& P, int folds) {
    const Eigen::Index N = X.rows();
    if (folds < 2 || N < folds)
        throw Error(Errc::TooFewRows, "cross-validation needs at least as many rows as folds");
    if (X.rows() != P.rows()) throw Error(Errc::ShapeMismatch, "X and P row counts differ");
    require_finite(X, "X");
    require_finite(P, "P");
    const Matrix XtX = X.transpose() * X;
    const Matrix XtP = X.transpose() * P;
    const Eigen::RowVectorXd x_sum = X.colwise().sum();
    const Eigen::RowVectorXd p_sum = P.colwise().sum();
    const Eigen::RowVectorXd p_sq = P.colwise().squaredNorm();

    std::vector<Fold> out;
    for (int k = 0; k < folds; ++k) {
        Fold fold;
        fold.first = N * k / folds;
        fold.size = N * (k + 1) / folds - fold.first;
        const auto Xh = X.middleRows(fold.first, fold.size);
        const auto Ph = P.middleRows(fold.first, fold.size);
        const double n_train = static_cast<double>(N - fold.size);
        fold.target_mean = (p_sum - Ph.colwise().sum()) / n_train;
        const Eigen::RowVectorXd x_train_sum = x_sum - Xh.colwise().sum();
        auto& sys = fold.system;
        sys.n_rows = static_cast<int>(N - fold.size);
        sys.gram = (XtX - Xh.transpose() * Xh) / n_train;
        sys.xty = (XtP - Xh.transpose() * Ph - x_train_sum.transpose() * fold.target_mean) / n_train;
        const Eigen::RowVectorXd sq = p_sq - Ph.colwise().squaredNorm();
        sys.yty = ((sq.array() - n_train * fold.target_mean.array().square()) / n_train)
                      .max(0.0)
                      .transpose();
        out.push_back(std::move(fold));
    }
    return out;
}

} // namespace

CrossValidation cross_validate(const Matrix& X, const Matrix& P, std::span<const double> grid,
                               int folds, const SolverOptions& options) {
    if (grid.empty()) throw Error(Errc::InvalidGrid, "empty lambda grid");
    const auto fold_data = make_folds(X, P, folds);
    CrossValidation cv;
    cv.lambdas.assign(grid.begin(), grid.end());
    cv.cv_error.assign(grid.size(), 0.0);
    for (const auto& fold : fold_data) {
        const auto Xh = X.middleRows(fold.first, fold.size);
        const auto Ph = P.middleRows(fold.first, fold.size);
        Matrix B = Matrix::Zero(X.cols(), P.cols());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            auto fit = fit_group_lasso(fold.system, grid[i], options, &B);
            B = std::move(fit.B);
            Matrix residual = Ph - Xh * B;
            residual.rowwise() -= fold.target_mean;
            cv.cv_error[i] += residual.squaredNorm();
        }
    }
    const double cells = static_cast<double>(X.rows() * P.cols());
    for (auto& e : cv.cv_error) e /= cells;
    cv.best_index = select_lambda(cv.cv_error);
    cv.best_lambda = cv.lambdas[cv.best_index];
    return cv;
}

std::vector<CrossValidation> cross_validate_per_hour(const Matrix& X, const Matrix& P,
                                                     int n_lambda, double ratio, int folds,
                                                     const SolverOptions& options) {
    const auto fold_data = make_folds(X, P, folds);
    const auto full = make_gram_system(X, P);
    RowVector buffer(1);
    std::vector<CrossValidation> out(static_cast<std::size_t>(P.cols()));
    for (Eigen::Index h = 0; h < P.cols(); ++h) {
        auto& cv = out[static_cast<std::size_t>(h)];
        double lmax = 0.0;
        for (Eigen::Index j = 0; j < full.xty.rows(); ++j)
            lmax = std::max(lmax, doubled_norm(buffer, full.xty.block(j, h, 1, 1)));
        cv.lambdas = lmax > 0.0 ? lambda_grid(lmax, n_lambda, ratio) : std::vector<double>{0.0};
        cv.cv_error.assign(cv.lambdas.size(), 0.0);
        for (const auto& fold : fold_data) {
            const auto Xh = X.middleRows(fold.first, fold.size);
            const auto ph = P.col(h).segment(fold.first, fold.size);
            Vector beta = Vector::Zero(X.cols());
            for (std::size_t i = 0; i < cv.lambdas.size(); ++i) {
                auto fit = fit_lasso_per_hour(fold.system, static_cast<int>(h), cv.lambdas[i],
                                              options, &beta);
                beta = std::move(fit.beta);
                cv.cv_error[i] +=
                    ((ph - Xh * beta).array() - fold.target_mean(h)).square().sum();
            }
        }
        for (auto& e : cv.cv_error) e /= static_cast<double>(X.rows());
        cv.best_index = select_lambda(cv.cv_error);
        cv.best_lambda = cv.lambdas[cv.best_index];
    }
    return out;
}

GroupLassoFit fit_group_lasso_path_to(const GramSystem& system, std::span<const double> grid,
                                      std::size_t index, const SolverOptions& options) {
    if (index >= grid.size()) throw Error(Errc::InvalidGrid, "path index beyond the grid");
    GroupLassoFit fit;
    fit.B = Matrix::Zero(system.n_features(), system.n_outputs());
    for (std::size_t i = 0; i <= index; ++i) fit = fit_group_lasso(system, grid[i], options, &fit.B);
    return fit;
}

} // namespace cinglear
