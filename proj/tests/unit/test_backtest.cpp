#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cinglear/backtest.hpp"
#include "cinglear/coefficients.hpp"
#include "cinglear/csv.hpp"
#include "cinglear/errors.hpp"
#include "panels.hpp"

using namespace cinglear;
namespace fs = std::filesystem;

namespace {

BacktestConfig fast_config() {
    BacktestConfig cfg;
    cfg.train_days = 30;
    cfg.test_days = 4;
    cfg.n_lambda = 20;
    cfg.n_samples = 2000;
    cfg.seed = 5;
    cfg.jobs = 1;
    return cfg;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const PanelDataset& shared_panel() {
    static const auto panel = cinglear::oracle::small_panel(60, 4, 3, 13).data;
    return panel;
}

const BacktestReport& shared_report() {
    static const auto report = run_sliding_window(shared_panel(), fast_config());
    return report;
}

} // namespace

TEST(Backtest, PointMetricExamples) {
    Matrix zero = Matrix::Zero(2, 2);
    const auto perfect = point_metrics(zero, zero);
    EXPECT_EQ(perfect.mae, 0.0);
    EXPECT_EQ(perfect.rmse, 0.0);
    Matrix f(2, 2), a = Matrix::Zero(2, 2);
    f << 1, -1, 1, -1;
    const auto unit = point_metrics(f, a);
    EXPECT_DOUBLE_EQ(unit.mae, 1.0);
    EXPECT_DOUBLE_EQ(unit.rmse, 1.0);
    Matrix g(2, 1), b = Matrix::Zero(2, 1);
    g << 0, 2;
    const auto skew = point_metrics(g, b);
    EXPECT_DOUBLE_EQ(skew.mae, 1.0);
    EXPECT_DOUBLE_EQ(skew.rmse, std::sqrt(2.0));
    try {
        point_metrics(Matrix::Zero(2, 2), Matrix::Zero(2, 3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::ShapeMismatch);
    }
}

TEST(Backtest, CrpsOfPointForecastIsMae) {
    Matrix forecasts(2, 3), actuals(2, 3);
    forecasts << 10, 20, 30, 40, 50, 60;
    actuals << 12, 18, 33, 40, 45, 61;
    std::vector<PredictiveDistribution> dists(2);
    for (int d = 0; d < 2; ++d) {
        dists[d].mean = forecasts.row(d).transpose();
        dists[d].covariance = Matrix::Zero(3, 3);
    }
    EXPECT_NEAR(crps_metric(dists, actuals, 100), point_metrics(forecasts, actuals).mae, 1e-10);
    EXPECT_EQ(crps_metric(dists, forecasts, 100), 0.0);
    try {
        crps_metric(std::span<const PredictiveDistribution>(dists.data(), 1), actuals);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::MissingDistribution);
    }
}

TEST(Backtest, WideningCovarianceRaisesCrps) {
    // Observations drawn from the forecast law itself.
    PredictiveDistribution truth;
    truth.mean = Vector::Zero(4);
    truth.covariance = Matrix::Identity(4, 4);
    const Matrix draws = sample(truth, 30, 77);
    std::vector<PredictiveDistribution> calibrated(30, truth), wide(30, truth);
    for (auto& d : wide) d.covariance *= 100.0;
    EXPECT_LT(crps_metric(calibrated, draws, 4000, 1), crps_metric(wide, draws, 4000, 1));
}

TEST(Backtest, ConfigDefaultsAndValidation) {
    const BacktestConfig cfg;
    EXPECT_EQ(cfg.folds, 5);
    EXPECT_EQ(cfg.n_lambda, 100);
    EXPECT_EQ(cfg.max_iter, 5000);
    EXPECT_EQ(cfg.refresh_lambda, 1);
    EXPECT_EQ(cfg.models.size(), 6u);
    EXPECT_NO_THROW(cfg.validate());
    auto bad = cfg;
    bad.train_days = 3;
    EXPECT_THROW(bad.validate(), Error);
    bad = cfg;
    bad.test_days = 0;
    EXPECT_THROW(bad.validate(), Error);
    bad = cfg;
    bad.models = {ModelKind::Cing};
    bad.ensembles = {{ModelKind::Cing, ModelKind::Lear}};
    EXPECT_THROW(bad.validate(), Error);
}

TEST(Backtest, ModelNames) {
    for (auto kind : {ModelKind::Naive, ModelKind::SeasonalNaive, ModelKind::Arima, ModelKind::Arimax,
                      ModelKind::Lear, ModelKind::Cing})
        EXPECT_EQ(parse_model(model_name(kind)), kind);
    EXPECT_FALSE(parse_model("dnn").has_value());
}

TEST(Backtest, ReportShape) {
    const auto& report = shared_report();
    ASSERT_EQ(report.models.size(), 6u);
    EXPECT_EQ(report.test_days.front(), 56);
    for (const auto& m : report.models) {
        ASSERT_EQ(m.days.size(), 4u) << m.name;
        EXPECT_EQ(m.metrics.failed_days, 0) << m.name << ": " << m.days.front().error;
        EXPECT_GE(m.metrics.rmse, m.metrics.mae);
        for (const auto& d : m.days) {
            EXPECT_EQ(d.mean.size(), 4);
            EXPECT_TRUE((d.lower.array() <= d.upper.array()).all());
        }
    }
    EXPECT_EQ(report.cing_coefficients.size(), 4u);
    EXPECT_EQ(report.cing_coefficients.front().n_features(), report.layout.width());
    EXPECT_EQ(report.lear_lambda.front().size(), 4u);
    EXPECT_EQ(report.design_rows, 30);
    EXPECT_FALSE(report.failure_budget_exceeded());
}

TEST(Backtest, MetricsRecomputeFromForecasts) {
    const auto& report = shared_report();
    for (const auto& m : report.models) {
        Matrix f(4, 4);
        double crps = 0.0;
        for (int d = 0; d < 4; ++d) {
            f.row(d) = m.days[d].mean.transpose();
            crps += m.days[d].crps.sum();
        }
        const auto pm = point_metrics(f, report.actuals);
        EXPECT_NEAR(pm.mae, m.metrics.mae, 1e-12);
        EXPECT_NEAR(pm.rmse, m.metrics.rmse, 1e-12);
        EXPECT_NEAR(crps / 16.0, m.metrics.crps, 1e-12);
    }
}

TEST(Backtest, SingleDayAndCausality) {
    const auto& data = shared_panel();
    auto cfg = fast_config();
    cfg.test_days = 1;
    cfg.first_test_day = 45;
    cfg.models = {ModelKind::SeasonalNaive, ModelKind::Arima, ModelKind::Lear, ModelKind::Cing};
    const auto full = run_sliding_window(data, cfg);
    const auto cut = run_sliding_window(data.head(46), cfg);
    ASSERT_EQ(full.models.size(), cut.models.size());
    for (std::size_t m = 0; m < full.models.size(); ++m) {
        EXPECT_EQ(full.models[m].days[0].mean, cut.models[m].days[0].mean) << full.models[m].name;
        EXPECT_EQ(full.models[m].days[0].crps, cut.models[m].days[0].crps) << full.models[m].name;
    }
    EXPECT_EQ(full.cing_coefficients[0].B, cut.cing_coefficients[0].B);
}

TEST(Backtest, ParallelRunMatchesSerial) {
    auto cfg = fast_config();
    cfg.models = {ModelKind::SeasonalNaive, ModelKind::Cing};
    const auto serial = run_sliding_window(shared_panel(), cfg);
    cfg.jobs = 3;
    const auto parallel = run_sliding_window(shared_panel(), cfg);
    EXPECT_EQ(metrics_csv(serial), metrics_csv(parallel));
    for (int d = 0; d < 4; ++d) EXPECT_EQ(serial.models[1].days[d].mean, parallel.models[1].days[d].mean);
}

TEST(Backtest, RefreshLambdaReusesSelection) {
    auto cfg = fast_config();
    cfg.models = {ModelKind::Cing};
    cfg.refresh_lambda = 4;
    const auto report = run_sliding_window(shared_panel(), cfg);
    for (int d = 1; d < 4; ++d) EXPECT_EQ(report.cing_lambda[d], report.cing_lambda[0]);
}

TEST(Backtest, EnsembleAveragesMembers) {
    auto cfg = fast_config();
    cfg.models = {ModelKind::SeasonalNaive, ModelKind::Cing};
    cfg.ensembles = {{ModelKind::SeasonalNaive, ModelKind::Cing}};
    const auto report = run_sliding_window(shared_panel(), cfg);
    ASSERT_EQ(report.models.size(), 3u);
    EXPECT_EQ(report.models[2].name, "snaive+cing");
    for (int d = 0; d < 4; ++d)
        EXPECT_LE((report.models[2].days[d].mean -
                   0.5 * (report.models[0].days[d].mean + report.models[1].days[d].mean))
                      .cwiseAbs()
                      .maxCoeff(),
                  1e-12);
}

TEST(Backtest, InsufficientData) {
    auto cfg = fast_config();
    cfg.test_days = 58;
    try {
        run_sliding_window(shared_panel(), cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::InsufficientData);
    }
}

TEST(Backtest, FailedDaysAreRecordedNotFatal) {
    // A five-day expanding window leaves ARIMA with too few hourly points.
    auto cfg = fast_config();
    cfg.first_test_day = 12;
    cfg.test_days = 3;
    cfg.models = {ModelKind::SeasonalNaive, ModelKind::Arima};
    const auto report = run_sliding_window(cinglear::oracle::small_panel(20, 2).data, cfg);
    const auto* arima = report.find("arima");
    ASSERT_NE(arima, nullptr);
    EXPECT_GT(arima->metrics.failed_days, 0);
    EXPECT_FALSE(arima->days[0].error.empty());
    EXPECT_EQ(report.find("snaive")->metrics.failed_days, 0);
    EXPECT_TRUE(report.failure_budget_exceeded());
}

TEST(Backtest, WrittenReportIsCompleteAndReproducible) {
    const auto& report = shared_report();
    const fs::path a = fs::temp_directory_path() / "cinglear_report_a";
    const fs::path b = fs::temp_directory_path() / "cinglear_report_b";
    fs::remove_all(a);
    fs::remove_all(b);
    write_report(report, a, R"({"command":"backtest"})");
    write_report(run_sliding_window(shared_panel(), fast_config()), b, R"({"command":"backtest"})");
    for (const auto* name : {"metrics.csv", "forecasts.csv", "report.json", "features.txt",
                             "design_covariance.csv", "error_covariance.csv", "intervals/cing.csv",
                             "coefficients/1.csv", "coefficients/4.csv", "coefficients_lear/2.csv"}) {
        ASSERT_TRUE(fs::exists(a / name)) << name;
        EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
    }
    const auto metrics = slurp(a / "metrics.csv");
    EXPECT_EQ(metrics.substr(0, metrics.find('\n')), "model,period,mae,rmse,crps,scored_days,failed_days");
    EXPECT_NE(slurp(a / "report.json").find("\"run_config\""), std::string::npos);
    EXPECT_EQ(slurp(a / "intervals/cing.csv").substr(0, 27), "day,hour,mean,lo90,hi90,crp");
    const auto coefs = read_coefficients_csv(a / "coefficients/4.csv");
    EXPECT_EQ(coefs.B, report.cing_coefficients.back().B);

    // Forecast file reproduces the metric table.
    std::ifstream in(a / "forecasts.csv");
    std::string line;
    std::getline(in, line);
    double abs_err = 0.0;
    int cells = 0;
    while (std::getline(in, line)) {
        const auto f = csv::split_line(line);
        if (f[0] != "cing") continue;
        abs_err += std::abs(csv::parse_double(f[3]) - csv::parse_double(f[4]));
        ++cells;
    }
    EXPECT_EQ(cells, 16);
    EXPECT_NEAR(abs_err / cells, report.find("cing")->metrics.mae, 1e-12);
    fs::remove_all(a);
    fs::remove_all(b);
}
