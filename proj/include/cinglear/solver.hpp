#pragma once

#include <span>
#include <vector>

#include "cinglear/types.hpp"

namespace cinglear {

/// Objective, as minimized by every solver in this header:
///
///     (1/N) ||P - X B||_F^2 + lambda * sum_j ||b_j||_2
///
/// where b_j is row j of B. X is expected standardized and P centered.
struct SolverOptions {
    double tol = 1e-4;     // max relative coefficient change per sweep
    double kkt_tol = 1e-4; // certificate required before declaring convergence
    int max_iter = 5000;   // sweeps (full or active-set)
    bool active_set = true;
    bool record_objective = false;
};

struct FitDiagnostics {
    int iterations = 0;
    double objective = 0.0;
    double kkt_residual = 0.0;
    double lambda = 0.0;
    bool converged = false;
    std::vector<double> objective_trace; // one value per sweep when recorded
};

struct GroupLassoFit {
    Matrix B;
    FitDiagnostics diagnostics;
};

/// Sufficient statistics of a least-squares problem, all scaled by 1/N.
/// Fits on a GramSystem avoid touching X again, which is what makes
/// lambda paths and per-hour fits over a shared design cheap.
struct GramSystem {
    Matrix gram;        // X^T X / N
    Matrix xty;         // X^T P / N
    Vector yty;         // ||P_h||^2 / N per output column
    int n_rows = 0;

    [[nodiscard]] int n_features() const { return static_cast<int>(gram.rows()); }
    [[nodiscard]] int n_outputs() const { return static_cast<int>(xty.cols()); }
};

GramSystem make_gram_system(const Matrix& X, const Matrix& P);

/// max_j ||(2/N) x_j^T P||_2; the smallest lambda whose solution is B = 0.
double lambda_max(const Matrix& X, const Matrix& P);
double lambda_max(const GramSystem& system);

/// n geometrically spaced values from lambda_max down to ratio * lambda_max.
std::vector<double> lambda_grid(double lambda_max, int n = 100, double ratio = 1e-4);

/// 0 if ||v|| <= t, else (1 - t/||v||) v.
Vector group_soft_threshold(const Vector& v, double t);

double group_lasso_objective(const Matrix& X, const Matrix& P, const Matrix& B, double lambda);

/// Largest violation of the group-lasso optimality conditions.
double kkt_residual(const Matrix& X, const Matrix& P, const Matrix& B, double lambda);
double kkt_residual(const GramSystem& system, const Matrix& B, double lambda);

/// Cyclic block coordinate descent. `warm_start` (M x H) seeds the
/// iterate; `order` permutes the group visiting order of full sweeps.
GroupLassoFit fit_group_lasso(const Matrix& X, const Matrix& P, double lambda,
                              const SolverOptions& options = {},
                              const Matrix* warm_start = nullptr,
                              std::span<const int> order = {});
GroupLassoFit fit_group_lasso(const GramSystem& system, double lambda,
                              const SolverOptions& options = {},
                              const Matrix* warm_start = nullptr,
                              std::span<const int> order = {});

/// Scalar lasso on one target column: (1/N) ||p - X beta||^2 + lambda ||beta||_1.
struct LassoFit {
    Vector beta;
    FitDiagnostics diagnostics;
};

LassoFit fit_lasso_per_hour(const Matrix& X, const Vector& p, double lambda,
                            const SolverOptions& options = {});
/// Uses column `hour` of a shared GramSystem.
LassoFit fit_lasso_per_hour(const GramSystem& system, int hour, double lambda,
                            const SolverOptions& options = {}, const Vector* warm_start = nullptr);

struct CrossValidation {
    std::vector<double> lambdas;
    std::vector<double> cv_error; // mean squared out-of-fold error per lambda
    std::size_t best_index = 0;
    double best_lambda = 0.0;
};

/// Contiguous-block K-fold CV with warm-started descending paths. Each
/// fold re-centers its training targets. Ties within 1e-12 go to the
/// larger lambda.
CrossValidation cross_validate(const Matrix& X, const Matrix& P, std::span<const double> grid,
                               int folds = 5, const SolverOptions& options = {});

/// Per-hour lasso CV: one independent lambda selection per column of P.
std::vector<CrossValidation> cross_validate_per_hour(const Matrix& X, const Matrix& P,
                                                     int n_lambda = 100, double ratio = 1e-4,
                                                     int folds = 5,
                                                     const SolverOptions& options = {});

/// Index of the smallest CV error, preferring larger lambda on ties.
std::size_t select_lambda(std::span<const double> cv_error, double tie_tol = 1e-12);

/// Fits along the descending grid prefix down to grid[index] with warm starts.
GroupLassoFit fit_group_lasso_path_to(const GramSystem& system, std::span<const double> grid,
                                      std::size_t index, const SolverOptions& options = {});

} // namespace cinglear
