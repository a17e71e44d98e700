#pragma once

#include <span>
#include <string>

#include "cinglear/dataset.hpp"
#include "cinglear/types.hpp"

namespace cinglear {

/// Every hour of day `day` gets the last observed hour of the day before.
Vector naive_forecast(const PanelDataset& data, int day);

/// Hour h of day `day` gets hour h of the day before.
Vector seasonal_naive_forecast(const PanelDataset& data, int day);

/// ARMA(p, q) with optional exogenous regressors (integration order 0):
///   y_t = c + sum_i phi_i y_{t-i} + sum_j theta_j e_{t-j} + beta^T x_t + e_t
struct ArimaModel {
    double intercept = 0.0;
    Vector ar;
    Vector ma;
    Vector exog;
    double residual_variance = 0.0;

    [[nodiscard]] int p() const { return static_cast<int>(ar.size()); }
    [[nodiscard]] int q() const { return static_cast<int>(ma.size()); }
    [[nodiscard]] int n_exog() const { return static_cast<int>(exog.size()); }
};

/// Two-stage Hannan-Rissanen fit on the last `train_len` points (0 = all):
/// a long autoregression supplies residual proxies, then least squares on
/// p lags, q lagged proxies and the exogenous columns. `exog`, when given,
/// has one row per series value.
ArimaModel fit_arima(std::span<const double> series, int p, int q, int train_len = 0,
                     const Matrix* exog = nullptr);

/// Iterated one-step recursion over `horizon` steps past the end of
/// `history`. Residuals over the history are rebuilt from the model;
/// future residuals are zero. `history_exog` aligns with `history`,
/// `future_exog` has `horizon` rows.
Vector forecast_arimax(const ArimaModel& model, std::span<const double> history, int horizon,
                       const Matrix* history_exog = nullptr, const Matrix* future_exog = nullptr);

/// Day-ahead paths from several forecast origins over one series. Path
/// i starts at index origins[i] and only reads values and residuals
/// before it; `exog` (if the model has exogenous terms) must cover
/// origins[i] + horizon rows.
Matrix arima_paths(const ArimaModel& model, std::span<const double> series,
                   std::span<const int> origins, int horizon, const Matrix* exog = nullptr);

/// Day-(day+1) forecast of a daily-constant series: the last hour of `day`.
Vector fuel_persistence_forecast(const PanelDataset& data, int day,
                                 std::string_view series = "fuel_price");

/// ARIMA-X for natural-gas generation with a weekly same-hour lag and
/// load/solar forecasts as regressors.
struct GasForecastConfig {
    int p = 1;
    int q = 1;
    int train_days = 7;
    std::string gas = "gas_gen";
    std::string load = "load";
    std::string solar = "solar";
};

/// Forecast of the gas series for day `day` from days before it.
Vector gas_generation_forecast(const PanelDataset& data, int day, const GasForecastConfig& config = {});

/// Replaces gas generation and fuel price with the internal day-ahead
/// forecasts wherever enough history exists. Early days keep actuals.
PanelDataset substitute_exogenous_forecasts(const PanelDataset& data,
                                            const GasForecastConfig& gas = {},
                                            std::string_view fuel = "fuel_price");

Vector ensemble_mean(const Vector& first, const Vector& second);

} // namespace cinglear
