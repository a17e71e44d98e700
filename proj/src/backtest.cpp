#include "cinglear/backtest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "json.hpp"

#include "cinglear/baselines.hpp"
#include "cinglear/csv.hpp"
#include "cinglear/errors.hpp"
#include "cinglear/solver.hpp"

namespace cinglear {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr std::pair<ModelKind, std::string_view> kModelNames[] = {
    {ModelKind::Naive, "naive"}, {ModelKind::SeasonalNaive, "snaive"}, {ModelKind::Arima, "arima"},
    {ModelKind::Arimax, "arimax"}, {ModelKind::Lear, "lear"},         {ModelKind::Cing, "cing"},
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t day, std::uint64_t slot) {
    // splitmix64 finalizer over the combined key
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (day * 64 + slot + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct SlotOutput {
    DayForecast forecast;
    Matrix samples; // kept for ensembles
};

struct DayOutcome {
    std::vector<SlotOutput> slots;
    double cing_lambda = kNaN;
    std::vector<double> lear_lambda;
    std::optional<CoefficientMatrix> cing;
    std::optional<CoefficientMatrix> lear;
    Matrix design_covariance;
    Matrix error_covariance;
    int design_rows = 0;
};

struct LambdaCache {
    std::optional<double> cing;
    std::optional<std::vector<double>> lear;
};

SolverOptions solver_options(const BacktestConfig& cfg) {
    SolverOptions opt;
    opt.tol = cfg.tol;
    opt.kkt_tol = std::max(cfg.tol, 1e-4);
    opt.max_iter = cfg.max_iter;
    return opt;
}

SlotOutput score(const PredictiveDistribution& dist, const Vector& actual,
                 const BacktestConfig& cfg, std::uint64_t seed) {
    SlotOutput out;
    out.samples = sample(dist, cfg.n_samples, seed);
    auto& f = out.forecast;
    f.mean = dist.point_forecast();
    const auto band = interval_from_samples(out.samples, cfg.interval_alpha);
    f.lower = band.lower;
    f.upper = band.upper;
    f.crps.resize(actual.size());
    for (Eigen::Index h = 0; h < actual.size(); ++h) {
        const Vector column = out.samples.col(h);
        f.crps(h) = crps_sample(std::span<const double>(column.data(), column.size()), actual(h));
    }
    return out;
}

// Warm-started descent along `grid` down to `target`.
Matrix fit_down_to(const GramSystem& system, std::span<const double> grid, double target,
                   const SolverOptions& opt) {
    Matrix B = Matrix::Zero(system.n_features(), system.n_outputs());
    for (double lambda : grid) {
        if (!(lambda > target * (1.0 + 1e-12))) break;
        B = fit_group_lasso(system, lambda, opt, &B).B;
    }
    return fit_group_lasso(system, target, opt, &B).B;
}

Vector fit_lasso_down_to(const GramSystem& system, int hour, std::span<const double> grid,
                         double target, const SolverOptions& opt) {
    Vector beta = Vector::Zero(system.n_features());
    for (double lambda : grid) {
        if (!(lambda > target * (1.0 + 1e-12))) break;
        beta = fit_lasso_per_hour(system, hour, lambda, opt, &beta).beta;
    }
    return fit_lasso_per_hour(system, hour, target, opt, &beta).beta;
}

std::vector<double> hour_grid(const GramSystem& system, int hour, const BacktestConfig& cfg) {
    const double lmax = 2.0 * system.xty.col(hour).cwiseAbs().maxCoeff();
    return lmax > 0.0 ? lambda_grid(lmax, cfg.n_lambda, cfg.lambda_ratio) : std::vector<double>{0.0};
}

PredictiveDistribution linear_distribution(const Design& design, const Matrix& B,
                                           const Vector& x_row) {
    PredictiveDistribution dist;
    dist.mean = design.target_mean + B.transpose() * x_row;
    dist.covariance = estimate_covariance(design.P - design.X * B);
    dist.transform = design.price_transform;
    return dist;
}

// Gaussian around a point forecast with the covariance of the method's own
// day-ahead errors over the calibration window (transformed space).
PredictiveDistribution persistence_distribution(const PanelDataset& data, const Design& design,
                                                int day, bool seasonal) {
    const auto forecast = [&](int d) {
        return seasonal ? seasonal_naive_forecast(data, d) : naive_forecast(data, d);
    };
    const auto tf = [&](const Vector& v) {
        return Vector(v.unaryExpr([&](double x) { return design.price_transform.forward(x); }));
    };
    const int N = design.window.size();
    Matrix errors(N, data.hours_per_day);
    for (int i = 0; i < N; ++i) {
        const int d = design.window.first + i;
        errors.row(i) = (design.transformed_prices(data, d) - tf(forecast(d))).transpose();
    }
    PredictiveDistribution dist;
    dist.mean = tf(forecast(day));
    dist.covariance = estimate_covariance(errors);
    dist.transform = design.price_transform;
    return dist;
}

PredictiveDistribution arima_distribution(const PanelDataset& data, const Design& design, bool with_exog, const BacktestConfig& cfg) {
    const int H = data.hours_per_day;
    const int first = design.window.first;
    const int N = design.window.size();
    std::vector<double> series(static_cast<std::size_t>(N) * H);
    for (int i = 0; i < N; ++i) {
        const Vector p = design.transformed_prices(data, first + i);
        for (int h = 0; h < H; ++h) series[static_cast<std::size_t>(i) * H + h] = p(h);
    }

    Matrix exog;
    if (with_exog) {
        const int K = data.n_exogenous();
        Matrix raw((N + 1) * H, K + 6);
        for (int i = 0; i <= N; ++i) {
            const int d = first + i;
            for (int h = 0; h < H; ++h) {
                const int t = i * H + h;
                for (int k = 0; k < K; ++k)
                    raw(t, k) = design.exogenous_transforms[k].forward(data.exogenous[k].values(d, h));
                for (int w = 0; w < 6; ++w) raw(t, K + w) = data.day_of_week[d] == w + 2 ? 1.0 : 0.0;
            }
        }
        // Columns constant over the calibration rows are collinear with the intercept.
        std::vector<int> keep;
        const Eigen::Index train_rows = static_cast<Eigen::Index>(N) * H;
        for (Eigen::Index c = 0; c < raw.cols(); ++c) {
            const auto col = raw.col(c).head(train_rows);
            if (col.maxCoeff() - col.minCoeff() > 1e-12) keep.push_back(static_cast<int>(c));
        }
        exog.resize(raw.rows(), static_cast<Eigen::Index>(keep.size()));
        for (std::size_t c = 0; c < keep.size(); ++c) exog.col(static_cast<Eigen::Index>(c)) = raw.col(keep[c]);
    }

    const Matrix train_exog = with_exog ? Matrix(exog.topRows(static_cast<Eigen::Index>(N) * H)) : Matrix();
    const auto model = fit_arima(series, cfg.arima_p, cfg.arima_q, 0, with_exog ? &train_exog : nullptr);
    std::vector<int> origins;
    for (int i = 1; i <= N; ++i) origins.push_back(i * H);
    const Matrix paths = arima_paths(model, series, origins, H, with_exog ? &exog : nullptr);

    Matrix errors(N - 1, H);
    for (int i = 1; i < N; ++i)
        for (int h = 0; h < H; ++h)
            errors(i - 1, h) = series[static_cast<std::size_t>(i) * H + h] - paths(i - 1, h);
    PredictiveDistribution dist;
    dist.mean = paths.row(N - 1).transpose();
    dist.covariance = N > 1 ? estimate_covariance(errors) : Matrix::Zero(H, H);
    dist.transform = design.price_transform;
    return dist;
}

DayOutcome run_day(const PanelDataset& data, const BacktestConfig& cfg, int day, LambdaCache& cache,
                   bool refresh) {
    const int H = data.hours_per_day;
    const std::size_t n_models = cfg.models.size();
    DayOutcome out;
    out.slots.resize(n_models + cfg.ensembles.size());
    const Vector actual = data.prices.row(day).transpose();
    const auto fail_slot = [&](std::size_t slot, const std::string& why) {
        out.slots[slot].forecast.failed = true;
        out.slots[slot].forecast.error = why;
    };

    const int first = std::max(kFirstFeatureDay, day - cfg.train_days);
    std::optional<Design> design;
    try {
        DesignOptions opts;
        opts.transform_prices = cfg.transform_prices;
        opts.transform_exogenous = cfg.transform_prices && !cfg.raw_exogenous;
        design = build_design(data, {first, day - 1}, opts);
    } catch (const std::exception& e) {
        for (std::size_t s = 0; s < out.slots.size(); ++s) fail_slot(s, e.what());
        return out;
    }
    const SolverOptions opt = solver_options(cfg);
    std::optional<GramSystem> gram;
    const auto shared_gram = [&]() -> const GramSystem& {
        if (!gram) gram = make_gram_system(design->X, design->P);
        return *gram;
    };

    for (std::size_t slot = 0; slot < n_models; ++slot) {
        const auto seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(day), slot);
        try {
            PredictiveDistribution dist;
            switch (cfg.models[slot]) {
            case ModelKind::Naive: dist = persistence_distribution(data, *design, day, false); break;
            case ModelKind::SeasonalNaive:
                dist = persistence_distribution(data, *design, day, true);
                break;
            case ModelKind::Arima: dist = arima_distribution(data, *design, false, cfg); break;
            case ModelKind::Arimax: dist = arima_distribution(data, *design, true, cfg); break;
            case ModelKind::Cing: {
                const auto& system = shared_gram();
                const double lmax = lambda_max(system);
                Matrix B = Matrix::Zero(system.n_features(), H);
                double chosen = 0.0;
                if (lmax > 0.0) {
                    const auto grid = lambda_grid(lmax, cfg.n_lambda, cfg.lambda_ratio);
                    if (refresh || !cache.cing) {
                        cache.cing = cross_validate(design->X, design->P, grid, cfg.folds, opt).best_lambda;
                    }
                    chosen = *cache.cing;
                    B = fit_down_to(system, grid, chosen, opt);
                }
                dist = linear_distribution(*design, B, design->row(data, day));
                out.cing_lambda = chosen;
                out.cing = CoefficientMatrix{design->expand(B), design->target_mean, design->layout.names()};
                out.design_covariance = design->expand(design->expand(system.gram).transpose());
                out.error_covariance = dist.covariance;
                out.design_rows = design->n_rows();
                break;
            }
            case ModelKind::Lear: {
                const auto& system = shared_gram();
                if (refresh || !cache.lear) {
                    const auto cvs = cross_validate_per_hour(design->X, design->P, cfg.n_lambda,
                                                             cfg.lambda_ratio, cfg.folds, opt);
                    std::vector<double> chosen;
                    for (const auto& cv : cvs) chosen.push_back(cv.best_lambda);
                    cache.lear = std::move(chosen);
                }
                Matrix B(system.n_features(), H);
                for (int h = 0; h < H; ++h)
                    B.col(h) = fit_lasso_down_to(system, h, hour_grid(system, h, cfg), (*cache.lear)[h], opt);
                dist = linear_distribution(*design, B, design->row(data, day));
                out.lear_lambda = *cache.lear;
                out.lear = CoefficientMatrix{design->expand(B), design->target_mean, design->layout.names()};
                break;
            }
            }
            out.slots[slot] = score(dist, actual, cfg, seed);
        } catch (const std::exception& e) {
            fail_slot(slot, e.what());
        }
    }

    for (std::size_t e = 0; e < cfg.ensembles.size(); ++e) {
        const std::size_t slot = n_models + e;
        const auto index_of = [&](ModelKind kind) {
            return static_cast<std::size_t>(std::find(cfg.models.begin(), cfg.models.end(), kind) -
                                            cfg.models.begin());
        };
        const auto& a = out.slots[index_of(cfg.ensembles[e].first)];
        const auto& b = out.slots[index_of(cfg.ensembles[e].second)];
        if (a.forecast.failed || b.forecast.failed) {
            fail_slot(slot, "ensemble member failed");
            continue;
        }
        // Quantile averaging: average the sorted draws hour by hour.
        Matrix samples(a.samples.rows(), H);
        for (int h = 0; h < H; ++h) {
            Vector sa = a.samples.col(h), sb = b.samples.col(h);
            std::sort(sa.data(), sa.data() + sa.size());
            std::sort(sb.data(), sb.data() + sb.size());
            samples.col(h) = 0.5 * (sa + sb);
        }
        auto& f = out.slots[slot].forecast;
        f.mean = ensemble_mean(a.forecast.mean, b.forecast.mean);
        const auto band = interval_from_samples(samples, cfg.interval_alpha);
        f.lower = band.lower;
        f.upper = band.upper;
        f.crps.resize(H);
        for (int h = 0; h < H; ++h) {
            const Vector column = samples.col(h);
            f.crps(h) = crps_sample(std::span<const double>(column.data(), column.size()), actual(h));
        }
    }
    for (auto& slot : out.slots) slot.samples.resize(0, 0);
    return out;
}

std::string slot_name(const BacktestConfig& cfg, std::size_t slot) {
    if (slot < cfg.models.size()) return std::string(model_name(cfg.models[slot]));
    const auto& [a, b] = cfg.ensembles[slot - cfg.models.size()];
    return std::string(model_name(a)) + "+" + std::string(model_name(b));
}

} // namespace

std::string_view model_name(ModelKind kind) {
    for (const auto& [k, name] : kModelNames)
        if (k == kind) return name;
    return "unknown";
}

std::optional<ModelKind> parse_model(std::string_view name) {
    for (const auto& [k, n] : kModelNames)
        if (n == name) return k;
    return std::nullopt;
}

void BacktestConfig::validate() const {
    const auto fail = [](const std::string& msg) { throw Error(Errc::InvalidSpec, msg); };
    if (folds < 2) fail("folds must be >= 2");
    if (train_days < folds) fail("train_days must be >= folds");
    if (test_days < 1) fail("test_days must be >= 1");
    if (n_lambda < 2) fail("n_lambda must be >= 2");
    if (!(lambda_ratio > 0.0 && lambda_ratio < 1.0)) fail("lambda_ratio must lie in (0, 1)");
    if (max_iter < 1) fail("max_iter must be >= 1");
    if (!(tol > 0.0)) fail("tol must be positive");
    if (models.empty()) fail("no models selected");
    if (n_samples < 2) fail("n_samples must be >= 2");
    if (!(interval_alpha > 0.0 && interval_alpha < 1.0)) fail("interval_alpha must lie in (0, 1)");
    if (refresh_lambda < 1) fail("refresh_lambda must be >= 1");
    if (arima_p < 0 || arima_q < 0) fail("ARMA orders must be non-negative");
    for (std::size_t i = 0; i < models.size(); ++i)
        for (std::size_t j = i + 1; j < models.size(); ++j)
            if (models[i] == models[j]) fail("model listed twice");
    for (const auto& [a, b] : ensembles)
        if (std::find(models.begin(), models.end(), a) == models.end() ||
            std::find(models.begin(), models.end(), b) == models.end())
            fail("ensemble members must be among the selected models");
}

bool BacktestReport::failure_budget_exceeded() const {
    return total_cells > 0 &&
           static_cast<double>(failed_cells) > config.max_failure_fraction * total_cells;
}

const ModelResult* BacktestReport::find(std::string_view name) const {
    for (const auto& m : models)
        if (m.name == name) return &m;
    return nullptr;
}

PointMetrics point_metrics(const Matrix& forecasts, const Matrix& actuals) {
    if (forecasts.rows() != actuals.rows() || forecasts.cols() != actuals.cols())
        throw Error(Errc::ShapeMismatch, "forecasts and actuals differ in shape");
    if (forecasts.size() == 0) throw Error(Errc::ShapeMismatch, "nothing to score");
    const auto err = (forecasts - actuals).array();
    const double cells = static_cast<double>(forecasts.size());
    return {err.abs().sum() / cells, std::sqrt(err.square().sum() / cells)};
}

double crps_metric(std::span<const PredictiveDistribution> distributions, const Matrix& actuals,
                   int n_samples, std::uint64_t seed) {
    if (static_cast<Eigen::Index>(distributions.size()) != actuals.rows())
        throw Error(Errc::MissingDistribution, "one distribution per scored day is required");
    if (actuals.size() == 0) throw Error(Errc::MissingDistribution, "nothing to score");
    double total = 0.0;
    for (std::size_t i = 0; i < distributions.size(); ++i) {
        const auto& dist = distributions[i];
        if (dist.hours() != actuals.cols())
            throw Error(Errc::ShapeMismatch, "distribution width differs from actuals");
        const Matrix draws = sample(dist, n_samples, seed + i);
        for (Eigen::Index h = 0; h < actuals.cols(); ++h) {
            const Vector column = draws.col(h);
            total += crps_sample(std::span<const double>(column.data(), column.size()),
                                 actuals(static_cast<Eigen::Index>(i), h));
        }
    }
    return total / static_cast<double>(actuals.size());
}

BacktestReport run_sliding_window(const PanelDataset& input, const BacktestConfig& cfg) {
    cfg.validate();
    input.validate();
    const PanelDataset data = cfg.forecast_exogenous ? substitute_exogenous_forecasts(input) : input;
    const int H = data.hours_per_day;
    const int L = cfg.test_days;
    const int first_test = cfg.first_test_day >= 0 ? cfg.first_test_day : data.n_days() - L;
    if (first_test < kFirstFeatureDay + cfg.folds || first_test + L > data.n_days())
        throw Error(Errc::InsufficientData,
                    "panel too short: " + std::to_string(data.n_days()) + " days for " +
                        std::to_string(L) + " test days after a " + std::to_string(cfg.folds) +
                        "-day minimum calibration window and 7 lag days");

    BacktestReport report;
    report.config = cfg;
    report.layout = make_layout(H, data.exogenous_names());
    report.actuals.resize(L, H);
    for (int i = 0; i < L; ++i) {
        report.test_days.push_back(first_test + i);
        report.dates.push_back(data.date_string(first_test + i));
        report.actuals.row(i) = data.prices.row(first_test + i);
    }

    std::vector<DayOutcome> outcomes(static_cast<std::size_t>(L));
    const int block = cfg.refresh_lambda;
    const int n_blocks = (L + block - 1) / block;
    std::atomic<int> next{0};
    const auto worker = [&] {
        for (int b = next++; b < n_blocks; b = next++) {
            LambdaCache cache;
            for (int i = b * block; i < std::min(L, (b + 1) * block); ++i) {
                try {
                    outcomes[i] = run_day(data, cfg, first_test + i, cache, i == b * block);
                } catch (const std::exception& e) {
                    outcomes[i].slots.assign(cfg.models.size() + cfg.ensembles.size(), {});
                    for (auto& s : outcomes[i].slots) s.forecast = {true, e.what(), {}, {}, {}, {}};
                }
            }
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int jobs = std::clamp(cfg.jobs > 0 ? cfg.jobs : static_cast<int>(hw), 1, n_blocks);
    {
        std::vector<std::jthread> pool;
        for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
        worker();
    }

    const std::size_t n_slots = cfg.models.size() + cfg.ensembles.size();
    report.models.resize(n_slots);
    for (std::size_t s = 0; s < n_slots; ++s) {
        auto& m = report.models[s];
        m.name = slot_name(cfg, s);
        for (int i = 0; i < L; ++i) m.days.push_back(std::move(outcomes[i].slots[s].forecast));
    }
    for (int i = 0; i < L; ++i) {
        auto& o = outcomes[i];
        report.cing_lambda.push_back(o.cing_lambda);
        report.lear_lambda.push_back(o.lear_lambda);
        report.cing_coefficients.push_back(o.cing.value_or(CoefficientMatrix{}));
        report.lear_coefficients.push_back(o.lear.value_or(CoefficientMatrix{}));
        if (o.design_rows > 0) {
            report.design_covariance = o.design_covariance;
            report.error_covariance = o.error_covariance;
            report.design_rows = o.design_rows;
        }
    }

    for (auto& m : report.models) {
        std::vector<int> ok;
        for (int i = 0; i < L; ++i) {
            if (m.days[i].failed) ++m.metrics.failed_days;
            else ok.push_back(i);
        }
        report.failed_cells += m.metrics.failed_days;
        report.total_cells += L;
        m.metrics.scored_days = static_cast<int>(ok.size());
        if (ok.empty()) {
            m.metrics.mae = m.metrics.rmse = m.metrics.crps = kNaN;
            continue;
        }
        Matrix forecasts(static_cast<Eigen::Index>(ok.size()), H), actual(static_cast<Eigen::Index>(ok.size()), H);
        double crps_total = 0.0;
        for (std::size_t r = 0; r < ok.size(); ++r) {
            const auto& day = m.days[ok[r]];
            forecasts.row(static_cast<Eigen::Index>(r)) = day.mean.transpose();
            actual.row(static_cast<Eigen::Index>(r)) = report.actuals.row(ok[r]);
            crps_total += day.crps.sum();
        }
        const auto pm = point_metrics(forecasts, actual);
        m.metrics.mae = pm.mae;
        m.metrics.rmse = pm.rmse;
        m.metrics.crps = crps_total / static_cast<double>(forecasts.size());
    }
    return report;
}

std::string metrics_csv(const BacktestReport& report) {
    std::string out = "model,period,mae,rmse,crps,scored_days,failed_days\n";
    for (const auto& m : report.models) {
        out += m.name + ",all," + csv::format_double(m.metrics.mae) + ',' +
               csv::format_double(m.metrics.rmse) + ',' + csv::format_double(m.metrics.crps) + ',' +
               std::to_string(m.metrics.scored_days) + ',' + std::to_string(m.metrics.failed_days) + '\n';
    }
    return out;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
    out << text;
}

void write_square_csv(const std::filesystem::path& path, const Matrix& m,
                      const std::vector<std::string>& names) {
    std::string text = "feature";
    for (const auto& n : names) text += ',' + n;
    text += '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        text += names[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < m.cols(); ++c) text += ',' + csv::format_double(m(r, c));
        text += '\n';
    }
    write_text(path, text);
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

} // namespace

void write_report(const BacktestReport& report, const std::filesystem::path& dir,
                  const std::string& run_config_json) {
    namespace fs = std::filesystem;
    const auto& cfg = report.config;
    const int H = static_cast<int>(report.actuals.cols());
    const int L = static_cast<int>(report.test_days.size());
    fs::create_directories(dir / "intervals");
    fs::create_directories(dir / "coefficients");
    fs::create_directories(dir / "coefficients_lear");

    write_text(dir / "metrics.csv", metrics_csv(report));

    std::string forecasts = "model,date,hour,forecast,actual\n";
    const int level = static_cast<int>(std::lround(100.0 * (1.0 - cfg.interval_alpha)));
    for (const auto& m : report.models) {
        std::string intervals = "day,hour,mean,lo" + std::to_string(level) + ",hi" +
                                std::to_string(level) + ",crps\n";
        for (int i = 0; i < L; ++i) {
            const auto& day = m.days[i];
            if (day.failed) continue;
            for (int h = 0; h < H; ++h) {
                const auto hour = std::to_string(h + 1);
                forecasts += m.name + ',' + report.dates[i] + ',' + hour + ',' +
                             csv::format_double(day.mean(h)) + ',' +
                             csv::format_double(report.actuals(i, h)) + '\n';
                intervals += report.dates[i] + ',' + hour + ',' + csv::format_double(day.mean(h)) +
                             ',' + csv::format_double(day.lower(h)) + ',' +
                             csv::format_double(day.upper(h)) + ',' + csv::format_double(day.crps(h)) + '\n';
            }
        }
        write_text(dir / "intervals" / (m.name + ".csv"), intervals);
    }
    write_text(dir / "forecasts.csv", forecasts);

    for (int i = 0; i < L; ++i) {
        const auto name = std::to_string(i + 1) + ".csv";
        if (report.cing_coefficients[i].B.size() > 0)
            write_coefficients_csv(dir / "coefficients" / name, report.cing_coefficients[i]);
        if (report.lear_coefficients[i].B.size() > 0)
            write_coefficients_csv(dir / "coefficients_lear" / name, report.lear_coefficients[i]);
    }
    write_text(dir / "features.txt", report.layout.manifest());
    if (report.design_rows > 0) {
        write_square_csv(dir / "design_covariance.csv", report.design_covariance, report.layout.names());
        std::vector<std::string> hours;
        for (int h = 0; h < H; ++h) hours.push_back("h" + std::string(h < 9 ? "0" : "") + std::to_string(h + 1));
        write_square_csv(dir / "error_covariance.csv", report.error_covariance, hours);
    }

    nlohmann::json j;
    j["run_config"] = nlohmann::json::parse(run_config_json.empty() ? "{}" : run_config_json);
    j["seed"] = cfg.seed;
    j["design_rows"] = report.design_rows;
    j["n_features"] = report.layout.width();
    j["hours_per_day"] = H;
    auto& days = j["days"] = nlohmann::json::array();
    for (int i = 0; i < L; ++i) {
        nlohmann::json d;
        d["index"] = i + 1;
        d["day"] = report.test_days[i];
        d["date"] = report.dates[i];
        d["cing_lambda"] = number_or_null(report.cing_lambda[i]);
        auto lear = nlohmann::json::array();
        for (double v : report.lear_lambda[i]) lear.push_back(number_or_null(v));
        d["lear_lambda"] = lear;
        auto failures = nlohmann::json::object();
        for (const auto& m : report.models)
            if (m.days[i].failed) failures[m.name] = m.days[i].error;
        d["failures"] = failures;
        days.push_back(d);
    }
    auto& metrics = j["metrics"] = nlohmann::json::array();
    for (const auto& m : report.models)
        metrics.push_back({{"model", m.name},
                           {"period", "all"},
                           {"mae", number_or_null(m.metrics.mae)},
                           {"rmse", number_or_null(m.metrics.rmse)},
                           {"crps", number_or_null(m.metrics.crps)},
                           {"scored_days", m.metrics.scored_days},
                           {"failed_days", m.metrics.failed_days}});
    j["failed_cells"] = report.failed_cells;
    j["total_cells"] = report.total_cells;
    j["failure_budget_exceeded"] = report.failure_budget_exceeded();
    write_text(dir / "report.json", j.dump(2) + '\n');
}

} // namespace cinglear
