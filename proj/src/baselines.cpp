#include "cinglear/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cinglear/errors.hpp"

namespace cinglear {

namespace {

void require_previous_day(const PanelDataset& data, int day) {
    if (day < 1) throw Error(Errc::InsufficientHistory, "no previous day before day 0");
    if (day > data.n_days())
        throw Error(Errc::InsufficientData, "day " + std::to_string(day) + " beyond the panel");
}

Vector least_squares(const Matrix& A, const Vector& y) {
    Eigen::ColPivHouseholderQR<Matrix> qr(A);
    if (qr.rank() < A.cols())
        throw Error(Errc::SingularRegression, "regressors are collinear");
    return qr.solve(y);
}

int long_ar_order(int n, int p, int q) {
    const int heuristic = static_cast<int>(std::ceil(10.0 * std::log10(static_cast<double>(n))));
    return std::max(p + q, std::min(heuristic, n / 4));
}

} // namespace

Vector naive_forecast(const PanelDataset& data, int day) {
    require_previous_day(data, day);
    return Vector::Constant(data.hours_per_day, data.prices(day - 1, data.hours_per_day - 1));
}

Vector seasonal_naive_forecast(const PanelDataset& data, int day) {
    require_previous_day(data, day);
    return data.prices.row(day - 1).transpose();
}

ArimaModel fit_arima(std::span<const double> series, int p, int q, int train_len, const Matrix* exog) {
    if (p < 0 || q < 0) throw Error(Errc::InvalidSpec, "ARMA orders must be non-negative");
    const int total = static_cast<int>(series.size());
    const int n = train_len > 0 ? std::min(train_len, total) : total;
    if (n <= 10 * (p + q + 1))
        throw Error(Errc::TooShort, "need more than 10 (p + q + 1) training points");
    if (exog && exog->rows() != total)
        throw Error(Errc::ShapeMismatch, "exogenous rows must match the series length");
    const int k = exog ? static_cast<int>(exog->cols()) : 0;
    const int offset = total - n;
    const auto y = [&](int t) { return series[offset + t]; };
    const auto x = [&](int t, int c) { return (*exog)(offset + t, c); };

    // Stage 1: long autoregression for residual proxies.
    std::vector<double> proxy(static_cast<std::size_t>(n), 0.0);
    int start = 0;
    if (q > 0) {
        const int m = long_ar_order(n, p, q);
        const int rows = n - m;
        if (rows <= m + 1 + k) throw Error(Errc::TooShort, "series too short for the long AR stage");
        Matrix A(rows, 1 + m + k);
        Vector b(rows);
        for (int r = 0; r < rows; ++r) {
            const int t = m + r;
            A(r, 0) = 1.0;
            for (int i = 1; i <= m; ++i) A(r, i) = y(t - i);
            for (int c = 0; c < k; ++c) A(r, 1 + m + c) = x(t, c);
            b(r) = y(t);
        }
        const Vector coef = least_squares(A, b);
        const Vector resid = b - A * coef;
        for (int r = 0; r < rows; ++r) proxy[m + r] = resid(r);
        start = m + q;
    } else {
        start = p;
    }

    // Stage 2: regression on own lags, lagged proxies and exogenous inputs.
    const int rows = n - start;
    const int cols = 1 + p + q + k;
    if (rows <= cols) throw Error(Errc::TooShort, "too few rows for the ARMA regression");
    Matrix A(rows, cols);
    Vector b(rows);
    for (int r = 0; r < rows; ++r) {
        const int t = start + r;
        A(r, 0) = 1.0;
        for (int i = 1; i <= p; ++i) A(r, i) = y(t - i);
        for (int j = 1; j <= q; ++j) A(r, p + j) = proxy[t - j];
        for (int c = 0; c < k; ++c) A(r, 1 + p + q + c) = x(t, c);
        b(r) = y(t);
    }
    const Vector coef = least_squares(A, b);
    const Vector resid = b - A * coef;

    ArimaModel model;
    model.intercept = coef(0);
    model.ar = coef.segment(1, p);
    model.ma = coef.segment(1 + p, q);
    model.exog = coef.segment(1 + p + q, k);
    model.residual_variance = resid.squaredNorm() / static_cast<double>(rows - cols);
    return model;
}

Matrix arima_paths(const ArimaModel& model, std::span<const double> series,
                   std::span<const int> origins, int horizon, const Matrix* exog) {
    const int k = model.n_exog();
    const int p = model.p(), q = model.q();
    if (horizon < 1) throw Error(Errc::InvalidSpec, "horizon must be positive");
    int last_origin = 0;
    for (int o : origins) {
        if (o < 0) throw Error(Errc::InvalidSpec, "negative forecast origin");
        last_origin = std::max(last_origin, o);
    }
    const int T = std::min(static_cast<int>(series.size()), last_origin);
    if (k > 0 && (!exog || exog->cols() != k || exog->rows() < last_origin + horizon))
        throw Error(Errc::MissingExogenous, "exogenous inputs do not cover the horizon");

    const auto exog_term = [&](int t) {
        double value = 0.0;
        for (int c = 0; c < k; ++c) value += model.exog(c) * (*exog)(t, c);
        return value;
    };
    // In-sample residuals; each depends only on earlier observations.
    std::vector<double> e(static_cast<std::size_t>(T), 0.0);
    if (q > 0) {
        for (int t = p; t < T; ++t) {
            double fitted = model.intercept + exog_term(t);
            for (int i = 1; i <= p; ++i) fitted += model.ar(i - 1) * series[t - i];
            for (int j = 1; j <= q && t - j >= 0; ++j) fitted += model.ma(j - 1) * e[t - j];
            e[t] = series[t] - fitted;
        }
    }
    Matrix out(static_cast<Eigen::Index>(origins.size()), horizon);
    std::vector<double> path(static_cast<std::size_t>(horizon));
    for (std::size_t r = 0; r < origins.size(); ++r) {
        const int o = origins[r];
        if (o > static_cast<int>(series.size()))
            throw Error(Errc::InsufficientData, "forecast origin beyond the series");
        for (int s = 0; s < horizon; ++s) {
            const int t = o + s;
            double value = model.intercept + exog_term(t);
            for (int i = 1; i <= p; ++i) {
                const int lag = t - i;
                if (lag >= o) value += model.ar(i - 1) * path[lag - o];
                else if (lag >= 0) value += model.ar(i - 1) * series[lag];
            }
            for (int j = 1; j <= q; ++j) {
                const int lag = t - j;
                if (lag >= 0 && lag < o) value += model.ma(j - 1) * e[lag];
            }
            path[s] = value;
            out(static_cast<Eigen::Index>(r), s) = value;
        }
    }
    return out;
}

Vector forecast_arimax(const ArimaModel& model, std::span<const double> history, int horizon,
                       const Matrix* history_exog, const Matrix* future_exog) {
    const int k = model.n_exog();
    const int T = static_cast<int>(history.size());
    if (horizon < 1) throw Error(Errc::InvalidSpec, "horizon must be positive");
    Matrix combined;
    if (k > 0) {
        if (!future_exog || future_exog->rows() < horizon || future_exog->cols() != k)
            throw Error(Errc::MissingExogenous, "exogenous forecasts missing for the horizon");
        combined = Matrix::Zero(T + horizon, k);
        if (history_exog) {
            if (history_exog->rows() != T || history_exog->cols() != k)
                throw Error(Errc::MissingExogenous, "exogenous history does not match the series");
            combined.topRows(T) = *history_exog;
        } else if (model.q() > 0) {
            throw Error(Errc::MissingExogenous, "exogenous history missing");
        }
        combined.bottomRows(horizon) = future_exog->topRows(horizon);
    }
    const int origin[] = {T};
    return arima_paths(model, history, origin, horizon, k > 0 ? &combined : nullptr).row(0).transpose();
}

Vector fuel_persistence_forecast(const PanelDataset& data, int day, std::string_view series) {
    const int k = data.find_exogenous(series);
    if (k < 0) throw Error(Errc::UnknownColumn, "no series named " + std::string(series));
    if (day < 0 || day >= data.n_days())
        throw Error(Errc::InsufficientHistory, "day " + std::to_string(day) + " is not observed");
    return Vector::Constant(data.hours_per_day,
                            data.exogenous[k].values(day, data.hours_per_day - 1));
}

Vector gas_generation_forecast(const PanelDataset& data, int day, const GasForecastConfig& config) {
    const int gas = data.find_exogenous(config.gas);
    const int load = data.find_exogenous(config.load);
    const int solar = data.find_exogenous(config.solar);
    if (gas < 0 || load < 0 || solar < 0)
        throw Error(Errc::MissingExogenous, "gas, load and solar series are all required");
    const int H = data.hours_per_day;
    const int first = day - config.train_days;
    if (first - 7 < 0 || day >= data.n_days())
        throw Error(Errc::InsufficientHistory, "gas forecast needs train_days + 7 days of history");

    const auto& g = data.exogenous[gas].values;
    const int T = config.train_days * H;
    std::vector<double> history(static_cast<std::size_t>(T));
    Matrix hist_exog(T, 3), future_exog(H, 3);
    for (int d = first; d < day; ++d) {
        for (int h = 0; h < H; ++h) {
            const int t = (d - first) * H + h;
            history[t] = g(d, h);
            hist_exog.row(t) << g(d - 7, h), data.exogenous[load].values(d, h),
                data.exogenous[solar].values(d, h);
        }
    }
    for (int h = 0; h < H; ++h)
        future_exog.row(h) << g(day - 7, h), data.exogenous[load].values(day, h),
            data.exogenous[solar].values(day, h);
    const auto model = fit_arima(history, config.p, config.q, 0, &hist_exog);
    return forecast_arimax(model, history, H, &hist_exog, &future_exog);
}

PanelDataset substitute_exogenous_forecasts(const PanelDataset& data, const GasForecastConfig& gas,
                                            std::string_view fuel) {
    PanelDataset out = data;
    const int fuel_idx = data.find_exogenous(fuel);
    if (fuel_idx >= 0)
        for (int d = 1; d < data.n_days(); ++d)
            out.exogenous[fuel_idx].values.row(d) = fuel_persistence_forecast(data, d - 1, fuel).transpose();
    const int gas_idx = data.find_exogenous(gas.gas);
    if (gas_idx >= 0 && data.find_exogenous(gas.load) >= 0 && data.find_exogenous(gas.solar) >= 0) {
        for (int d = gas.train_days + 7; d < data.n_days(); ++d) {
            try {
                out.exogenous[gas_idx].values.row(d) = gas_generation_forecast(data, d, gas).transpose();
            } catch (const Error&) {
                // Degenerate weeks (e.g. constant series): fall back to persistence.
                out.exogenous[gas_idx].values.row(d) = data.exogenous[gas_idx].values.row(d - 1);
            }
        }
    }
    return out;
}

Vector ensemble_mean(const Vector& first, const Vector& second) {
    if (first.size() != second.size()) throw Error(Errc::LengthMismatch, "ensemble members differ in length");
    return 0.5 * (first + second);
}

} // namespace cinglear
