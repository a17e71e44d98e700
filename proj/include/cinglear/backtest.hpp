#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cinglear/coefficients.hpp"
#include "cinglear/dataset.hpp"
#include "cinglear/features.hpp"
#include "cinglear/probabilistic.hpp"
#include "cinglear/types.hpp"

namespace cinglear {

enum class ModelKind { Naive, SeasonalNaive, Arima, Arimax, Lear, Cing };

std::string_view model_name(ModelKind kind);
std::optional<ModelKind> parse_model(std::string_view name);

struct BacktestConfig {
    int train_days = 1095; // calibration window N (expanding until reached)
    int test_days = 730;   // L
    int first_test_day = -1; // 0-based; -1 = the last L days of the panel
    int folds = 5;
    int n_lambda = 100;
    double lambda_ratio = 1e-4;
    int max_iter = 5000;
    double tol = 1e-4;
    std::vector<ModelKind> models = {ModelKind::Naive, ModelKind::SeasonalNaive, ModelKind::Arima,
                                     ModelKind::Arimax, ModelKind::Lear,  ModelKind::Cing};
    /// Mean ensembles of two configured models.
    std::vector<std::pair<ModelKind, ModelKind>> ensembles;
    std::uint64_t seed = 0;
    int n_samples = kDefaultSamples;
    double interval_alpha = 0.1;
    bool transform_prices = true;
    bool raw_exogenous = false;
    bool forecast_exogenous = false; // substitute gas/fuel with internal forecasts
    int refresh_lambda = 1;          // re-run CV every k test days
    int arima_p = 1;
    int arima_q = 1;
    int jobs = 0; // 0 = hardware concurrency
    double max_failure_fraction = 0.05;

    void validate() const;
};

/// One model's output for one test day; prices in $/MWh.
struct DayForecast {
    bool failed = false;
    std::string error;
    Vector mean;
    Vector lower;
    Vector upper;
    Vector crps;
};

struct ModelMetrics {
    double mae = 0.0;
    double rmse = 0.0;
    double crps = 0.0;
    int scored_days = 0;
    int failed_days = 0;
};

struct ModelResult {
    std::string name;
    std::vector<DayForecast> days; // one per test day
    ModelMetrics metrics;
};

struct BacktestReport {
    BacktestConfig config;
    FeatureLayout layout;
    std::vector<int> test_days;
    std::vector<std::string> dates;
    Matrix actuals; // L x H, $/MWh
    std::vector<ModelResult> models;

    std::vector<double> cing_lambda;                // per test day (NaN if not run)
    std::vector<std::vector<double>> lear_lambda;   // per test day, per hour
    std::vector<CoefficientMatrix> cing_coefficients; // per test day, standardized units
    std::vector<CoefficientMatrix> lear_coefficients;

    // Inputs for sparsity diagnostics from the final test day.
    Matrix design_covariance; // M x M, (1/N) X^T X over kept columns
    Matrix error_covariance;  // H x H, CING in-sample residuals
    int design_rows = 0;

    int failed_cells = 0;
    int total_cells = 0;

    [[nodiscard]] bool failure_budget_exceeded() const;
    [[nodiscard]] const ModelResult* find(std::string_view name) const;
};

/// Sliding-window evaluation: for every test day, build the calibration
/// design from the preceding days, select lambda by K-fold CV, fit, and
/// forecast the day's H prices with a Gaussian predictive distribution.
BacktestReport run_sliding_window(const PanelDataset& data, const BacktestConfig& config);

struct PointMetrics {
    double mae = 0.0;
    double rmse = 0.0;
};

PointMetrics point_metrics(const Matrix& forecasts, const Matrix& actuals);

/// Mean sample CRPS over all L x H cells; day i draws with seed + i.
double crps_metric(std::span<const PredictiveDistribution> distributions, const Matrix& actuals,
                   int n_samples = kDefaultSamples, std::uint64_t seed = 0);

/// metrics.csv, forecasts.csv, intervals/<model>.csv, coefficients/<l>.csv,
/// coefficients_lear/<l>.csv, features.txt, design_covariance.csv,
/// error_covariance.csv and report.json (embedding `run_config_json`).
void write_report(const BacktestReport& report, const std::filesystem::path& dir,
                  const std::string& run_config_json);

std::string metrics_csv(const BacktestReport& report);

} // namespace cinglear
