#include "cinglear/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cinglear/backtest.hpp"
#include "cinglear/csv.hpp"
#include "cinglear/dataset.hpp"
#include "cinglear/diagnostics.hpp"
#include "cinglear/errors.hpp"
#include "cinglear/features.hpp"
#include "cinglear/solver.hpp"

#ifndef CINGLEAR_VERSION
#define CINGLEAR_VERSION "0.0.0"
#endif

namespace cinglear::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct DataOptions {
    std::string path;
    std::string timestamp_column = "timestamp";
    std::string price_column = "lmp";
    std::vector<std::string> exogenous = {"load", "solar", "gas_gen", "fuel_price"};
    int hours = 24;
    bool forward_fill = false;

    void add_to(CLI::App& app, bool required = true) {
        auto* opt = app.add_option("--data", path, "Hourly CSV panel")->check(CLI::ExistingFile);
        if (required) opt->required();
        app.add_option("--timestamp-column", timestamp_column, "Timestamp column name")->capture_default_str();
        app.add_option("--price-column", price_column, "Price column name")->capture_default_str();
        app.add_option("--exogenous", exogenous, "Exogenous columns, comma separated")
            ->delimiter(',')
            ->capture_default_str();
        app.add_option("--hours", hours, "Delivery periods per day")->check(CLI::PositiveNumber)->capture_default_str();
        app.add_flag("--forward-fill", forward_fill, "Forward-fill missing hours, average duplicates");
    }

    [[nodiscard]] PanelDataset load() const {
        CsvSchema schema;
        schema.timestamp_column = timestamp_column;
        schema.price_column = price_column;
        schema.exogenous.clear();
        for (const auto& name : exogenous) schema.exogenous.emplace_back(name, name);
        schema.hours_per_day = hours;
        schema.fill = forward_fill ? FillStrategy::Forward : FillStrategy::None;
        return load_series(path, schema);
    }

    [[nodiscard]] json to_json() const {
        return {{"data", path},
                {"timestamp_column", timestamp_column},
                {"price_column", price_column},
                {"exogenous", exogenous},
                {"hours", hours},
                {"forward_fill", forward_fill}};
    }
};

struct BacktestOptions {
    BacktestConfig config;
    std::vector<std::string> models = {"naive", "snaive", "arima", "arimax", "lear", "cing"};
    std::vector<std::string> ensembles;
    std::string out = "report";

    void add_to(CLI::App& app) {
        auto& c = config;
        app.add_option("--train-days", c.train_days, "Calibration window length in days")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app.add_option("--folds", c.folds, "Cross-validation folds")->capture_default_str();
        app.add_option("--n-lambda", c.n_lambda, "Penalty grid size")->capture_default_str();
        app.add_option("--lambda-ratio", c.lambda_ratio, "Smallest / largest penalty")->capture_default_str();
        app.add_option("--max-iter", c.max_iter, "Maximum solver sweeps")->capture_default_str();
        app.add_option("--tol", c.tol, "Solver convergence tolerance")->capture_default_str();
        app.add_option("--models", models, "Models: naive,snaive,arima,arimax,lear,cing")
            ->delimiter(',')
            ->capture_default_str();
        app.add_option("--ensemble", ensembles, "Mean ensembles as a+b, comma separated")->delimiter(',');
        app.add_option("--seed", c.seed, "Sampling seed")->capture_default_str();
        app.add_option("--samples", c.n_samples, "Predictive samples per day")->capture_default_str();
        app.add_option("--alpha", c.interval_alpha, "Interval miscoverage level")->capture_default_str();
        app.add_flag("!--no-transform", c.transform_prices, "Fit on raw prices (no asinh)");
        app.add_flag("--raw-exogenous", c.raw_exogenous, "Leave exogenous series untransformed");
        app.add_flag("--forecast-exogenous", c.forecast_exogenous,
                     "Replace gas generation and fuel price with internal forecasts");
        app.add_option("--refresh-lambda", c.refresh_lambda, "Re-select lambda every k test days")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app.add_option("--arima-order", arima_order, "ARMA orders p,q")->delimiter(',')->expected(2);
        app.add_option("--max-failure-fraction", c.max_failure_fraction, "Tolerated failed cell share")
            ->capture_default_str();
    }

    std::vector<int> arima_order = {1, 1};

    void finalize() {
        config.models.clear();
        for (const auto& name : models) {
            const auto kind = parse_model(name);
            if (!kind) throw CLI::ValidationError("--models", "unknown model '" + name + "'");
            config.models.push_back(*kind);
        }
        config.ensembles.clear();
        for (const auto& spec : ensembles) {
            const auto plus = spec.find('+');
            const auto a = parse_model(spec.substr(0, plus));
            const auto b = plus == std::string::npos ? std::nullopt : parse_model(spec.substr(plus + 1));
            if (!a || !b) throw CLI::ValidationError("--ensemble", "expected a+b, got '" + spec + "'");
            config.ensembles.emplace_back(*a, *b);
        }
        config.arima_p = arima_order[0];
        config.arima_q = arima_order[1];
    }

    [[nodiscard]] json to_json() const {
        const auto& c = config;
        return {{"train_days", c.train_days},
                {"test_days", c.test_days},
                {"first_test_day", c.first_test_day},
                {"folds", c.folds},
                {"n_lambda", c.n_lambda},
                {"lambda_ratio", c.lambda_ratio},
                {"max_iter", c.max_iter},
                {"tol", c.tol},
                {"models", models},
                {"ensembles", ensembles},
                {"seed", c.seed},
                {"n_samples", c.n_samples},
                {"interval_alpha", c.interval_alpha},
                {"transform_prices", c.transform_prices},
                {"raw_exogenous", c.raw_exogenous},
                {"forecast_exogenous", c.forecast_exogenous},
                {"refresh_lambda", c.refresh_lambda},
                {"arima_order", arima_order},
                {"max_failure_fraction", c.max_failure_fraction}};
    }
};

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
    out << text;
}

std::string fmt(double v, int digits = 4) {
    if (!std::isfinite(v)) return "nan";
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(digits);
    s << v;
    return s.str();
}

std::string metric_summary(const BacktestReport& report) {
    std::string line;
    for (const auto& m : report.models) {
        if (!line.empty()) line += " | ";
        line += m.name + " mae=" + fmt(m.metrics.mae) + " rmse=" + fmt(m.metrics.rmse) +
                " crps=" + fmt(m.metrics.crps);
        if (m.metrics.failed_days > 0) line += " failed=" + std::to_string(m.metrics.failed_days);
    }
    return line;
}

/// Accepts a 0-based day index or a YYYY-MM-DD date present in the panel.
int resolve_day(const PanelDataset& data, const std::string& text) {
    for (int d = 0; d < data.n_days(); ++d)
        if (data.date_string(d) == text) return d;
    int day = -1;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, day);
    if (ec != std::errc() || ptr != end || day < 0 || day >= data.n_days())
        throw Error(Errc::InvalidSpec, "day '" + text + "' is not in the panel");
    return day;
}

// ---------------------------------------------------------------- synth

struct SynthCommand {
    SyntheticSpec spec;
    std::string out = "synth.csv";
    std::string truth;
    std::string start;

    void add_to(CLI::App& app) {
        app.add_option("--days", spec.n_days, "Number of days")->check(CLI::PositiveNumber)->capture_default_str();
        app.add_option("--hours", spec.hours_per_day, "Periods per day")->check(CLI::PositiveNumber)->capture_default_str();
        app.add_option("--support", spec.support, "Active exogenous feature groups")->capture_default_str();
        app.add_option("--noise", spec.noise_sigma, "Noise standard deviation")->capture_default_str();
        app.add_option("--coef-scale", spec.coef_scale, "Coefficient magnitude")->capture_default_str();
        app.add_option("--level", spec.price_level, "Price level")->capture_default_str();
        app.add_option("--exogenous", spec.exogenous_names, "Exogenous series names")
            ->delimiter(',')
            ->capture_default_str();
        app.add_option("--start", start, "First date, YYYY-MM-DD");
        app.add_option("--seed", spec.seed, "Generator seed")->capture_default_str();
        app.add_option("--out", out, "Panel CSV path")->capture_default_str();
        app.add_option("--truth", truth, "Truth coefficients CSV (default <out>_truth.csv)");
    }

    int execute(std::ostream& os) {
        if (!start.empty()) {
            std::istringstream in("timestamp,lmp\n" + start + "T00:00:00,0\n");
            CsvSchema schema;
            schema.exogenous.clear();
            schema.hours_per_day = 1;
            spec.start_date = parse_series(in, schema).start_date;
        }
        const auto panel = generate_synthetic(spec);
        fs::path truth_path = truth;
        if (truth_path.empty()) {
            const fs::path p = out;
            truth_path = p.parent_path() / (p.stem().string() + "_truth.csv");
        }
        if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
        write_series(out, panel.data);
        write_coefficients_csv(truth_path, panel.truth);
        const auto names = make_layout(spec.hours_per_day, spec.exogenous_names).names();
        std::string support;
        for (int j : panel.support) support += (support.empty() ? "" : ",") + names[j];
        os << "wrote " << out << " (" << spec.n_days << " days) and " << truth_path.string()
           << "; support=" << support << '\n';
        return kExitOk;
    }
};

// ---------------------------------------------------------------- fit

struct FitCommand {
    DataOptions data;
    int train_days = 1095;
    std::string end;
    std::string model = "cing";
    double lambda = -1.0;
    int folds = 5;
    int n_lambda = 100;
    double lambda_ratio = 1e-4;
    int max_iter = 5000;
    double tol = 1e-4;
    bool raw_exogenous = false;
    std::string out = "coefficients.csv";

    void add_to(CLI::App& app) {
        data.add_to(app);
        app.add_option("--train-days", train_days, "Calibration window length")->capture_default_str();
        app.add_option("--end", end, "Last calibration day (date or 0-based index; default last)");
        app.add_option("--model", model, "cing or lear")->check(CLI::IsMember({"cing", "lear"}))->capture_default_str();
        app.add_option("--lambda", lambda, "Fixed penalty (default: cross-validated)");
        app.add_option("--folds", folds, "Cross-validation folds")->capture_default_str();
        app.add_option("--n-lambda", n_lambda, "Penalty grid size")->capture_default_str();
        app.add_option("--lambda-ratio", lambda_ratio, "Smallest / largest penalty")->capture_default_str();
        app.add_option("--max-iter", max_iter, "Maximum solver sweeps")->capture_default_str();
        app.add_option("--tol", tol, "Convergence tolerance")->capture_default_str();
        app.add_flag("--raw-exogenous", raw_exogenous, "Leave exogenous series untransformed");
        app.add_option("--out", out, "Coefficient CSV path")->capture_default_str();
    }

    int execute(std::ostream& os) {
        const auto panel = data.load();
        const int last = end.empty() ? panel.n_days() - 1 : resolve_day(panel, end);
        const DayRange window{std::max(kFirstFeatureDay, last - train_days + 1), last};
        DesignOptions opts;
        opts.transform_exogenous = !raw_exogenous;
        const auto design = build_design(panel, window, opts);
        SolverOptions so;
        so.tol = tol;
        so.max_iter = max_iter;
        const auto system = make_gram_system(design.X, design.P);
        const int H = design.hours();
        Matrix B(design.X.cols(), H);
        std::string lambda_text;
        if (model == "cing") {
            double chosen = lambda;
            const double lmax = lambda_max(system);
            if (chosen < 0.0) {
                if (lmax <= 0.0) {
                    chosen = 0.0;
                } else {
                    const auto grid = lambda_grid(lmax, n_lambda, lambda_ratio);
                    chosen = cross_validate(design.X, design.P, grid, folds, so).best_lambda;
                }
            }
            const auto grid = lmax > 0.0 ? lambda_grid(lmax, n_lambda, lambda_ratio) : std::vector<double>{};
            Matrix warm = Matrix::Zero(B.rows(), H);
            for (double l : grid) {
                if (!(l > chosen)) break;
                warm = fit_group_lasso(system, l, so, &warm).B;
            }
            B = fit_group_lasso(system, chosen, so, &warm).B;
            lambda_text = fmt(chosen, 6);
        } else {
            std::vector<double> chosen(static_cast<std::size_t>(H), lambda);
            if (lambda < 0.0) {
                const auto cvs = cross_validate_per_hour(design.X, design.P, n_lambda, lambda_ratio, folds, so);
                for (int h = 0; h < H; ++h) chosen[h] = cvs[h].best_lambda;
            }
            for (int h = 0; h < H; ++h) B.col(h) = fit_lasso_per_hour(system, h, chosen[h], so).beta;
            const auto [lo, hi] = std::minmax_element(chosen.begin(), chosen.end());
            lambda_text = fmt(*lo, 6) + ".." + fmt(*hi, 6);
        }
        CoefficientMatrix coefs{design.expand(B), design.target_mean, design.layout.names()};
        if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
        write_coefficients_csv(out, coefs);
        const auto active = support(coefs.B, SupportRule::Threshold);
        os << model << " window=" << panel.date_string(window.first) << ".." << panel.date_string(window.last)
           << " rows=" << design.n_rows() << " features=" << design.layout.width()
           << " lambda=" << lambda_text << " active_groups=" << active.size() << '\n';
        return kExitOk;
    }
};

// ---------------------------------------------------------------- forecast

struct ForecastCommand {
    DataOptions data;
    BacktestOptions options;
    std::string day;
    std::string out = "forecast.csv";

    void add_to(CLI::App& app) {
        data.add_to(app);
        options.add_to(app);
        options.models = {"cing"};
        app.add_option("--day", day, "Delivery day (date or 0-based index; default last)");
        app.add_option("--out", out, "Forecast CSV path")->capture_default_str();
    }

    int execute(std::ostream& os, int jobs) {
        options.finalize();
        const auto panel = data.load();
        auto cfg = options.config;
        cfg.test_days = 1;
        cfg.first_test_day = day.empty() ? panel.n_days() - 1 : resolve_day(panel, day);
        cfg.jobs = jobs;
        const auto report = run_sliding_window(panel, cfg);
        const int level = static_cast<int>(std::lround(100.0 * (1.0 - cfg.interval_alpha)));
        std::string text = "model,date,hour,forecast,lo" + std::to_string(level) + ",hi" +
                           std::to_string(level) + ",actual\n";
        for (const auto& m : report.models) {
            const auto& f = m.days.front();
            if (f.failed) {
                os << m.name << " failed: " << f.error << '\n';
                continue;
            }
            for (Eigen::Index h = 0; h < f.mean.size(); ++h)
                text += m.name + ',' + report.dates.front() + ',' + std::to_string(h + 1) + ',' +
                        csv::format_double(f.mean(h)) + ',' + csv::format_double(f.lower(h)) + ',' +
                        csv::format_double(f.upper(h)) + ',' + csv::format_double(report.actuals(0, h)) + '\n';
        }
        write_file(out, text);
        os << report.dates.front() << ' ' << metric_summary(report) << '\n';
        return report.failure_budget_exceeded() ? kExitBudget : kExitOk;
    }
};

// ---------------------------------------------------------------- backtest

struct BacktestCommand {
    DataOptions data;
    BacktestOptions options;
    std::string first;

    void add_to(CLI::App& app) {
        data.add_to(app);
        options.add_to(app);
        app.add_option("--test-days", options.config.test_days, "Number of test days")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app.add_option("--first-test-day", first, "First test day (date or 0-based index; default last L days)");
        app.add_option("--out", options.out, "Report directory")->capture_default_str();
    }

    int execute(std::ostream& os, int jobs, const json& global) {
        options.finalize();
        const auto panel = data.load();
        auto cfg = options.config;
        if (!first.empty()) cfg.first_test_day = resolve_day(panel, first);
        cfg.jobs = jobs;
        const auto report = run_sliding_window(panel, cfg);
        json run_config = global;
        run_config["command"] = "backtest";
        run_config["input"] = data.to_json();
        run_config["backtest"] = options.to_json();
        run_config["backtest"]["first_test_day"] = cfg.first_test_day;
        run_config["out"] = options.out;
        write_report(report, options.out, run_config.dump());
        os << metric_summary(report) << '\n';
        if (report.failure_budget_exceeded()) {
            os << "failure budget exceeded: " << report.failed_cells << " of " << report.total_cells
               << " model-days failed\n";
            return kExitBudget;
        }
        return kExitOk;
    }
};

// ---------------------------------------------------------------- diagnose

struct DiagnoseCommand {
    std::string coeffs;
    std::vector<std::string> out = {"theta.csv", "corr.csv"};
    std::string covariance;
    std::string block = "price_lag1";
    std::string mode = "design";
    int rows = 0;
    int s_max = 0;

    void add_to(CLI::App& app) {
        app.add_option("--coeffs", coeffs, "Directory of per-day coefficient CSVs")
            ->required()
            ->check(CLI::ExistingDirectory);
        app.add_option("--out", out, "theta.csv,corr.csv output paths")->delimiter(',')->expected(2)->capture_default_str();
        app.add_option("--covariance", covariance,
                       "Covariance CSV (default design_covariance.csv or error_covariance.csv beside the directory)");
        app.add_option("--block", block, "Feature block for the correlation matrix")->capture_default_str();
        app.add_option("--mode", mode, "design or error covariance")
            ->check(CLI::IsMember({"design", "error"}))
            ->capture_default_str();
        app.add_option("--rows", rows, "Calibration rows N (default from report.json)");
        app.add_option("--s-max", s_max, "Largest support size (default: active groups of the last day)");
    }

    static Matrix read_square(const fs::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error(Errc::Io, "cannot read " + path.string());
        std::string line;
        std::getline(in, line);
        const auto n = csv::split_line(line).size() - 1;
        Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        Eigen::Index r = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto cells = csv::split_line(line);
            if (cells.size() != n + 1 || r >= m.rows())
                throw Error(Errc::ParseError, path.string() + ": ragged covariance row");
            for (std::size_t c = 0; c < n; ++c) m(r, static_cast<Eigen::Index>(c)) = csv::parse_double(cells[c + 1]);
            ++r;
        }
        if (r != m.rows()) throw Error(Errc::ParseError, path.string() + ": covariance is not square");
        return m;
    }

    int execute(std::ostream& os) {
        const fs::path dir = coeffs;
        std::vector<std::pair<int, fs::path>> files;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.path().extension() != ".csv") continue;
            const auto stem = entry.path().stem().string();
            int index = 0;
            const auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), index);
            if (ec == std::errc() && ptr == stem.data() + stem.size()) files.emplace_back(index, entry.path());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) throw Error(Errc::TooFewMatrices, "no coefficient files in " + dir.string());

        std::vector<Matrix> history;
        std::vector<std::string> names;
        for (const auto& [index, path] : files) {
            auto c = read_coefficients_csv(path);
            if (!names.empty() && c.feature_names != names)
                throw Error(Errc::ShapeMismatch, path.string() + ": feature rows differ");
            names = c.feature_names;
            history.push_back(std::move(c.B));
        }
        const Matrix& B = history.back();
        const int M = static_cast<int>(B.rows());
        const int H = static_cast<int>(B.cols());

        const fs::path base = fs::absolute(dir).parent_path();
        const auto cov_mode = mode == "design" ? CovarianceMode::Design : CovarianceMode::Error;
        const fs::path cov_path = !covariance.empty() ? fs::path(covariance)
                                  : base / (mode == "design" ? "design_covariance.csv" : "error_covariance.csv");
        const Matrix cov = read_square(cov_path);
        int n_rows = rows;
        if (n_rows <= 0) {
            std::ifstream in(base / "report.json");
            if (!in) throw Error(Errc::InvalidSpec, "--rows is required without a report.json");
            n_rows = json::parse(in).at("design_rows").get<int>();
        }

        const int active = support(B, SupportRule::Threshold).size();
        const int upper = std::min(M - 2, s_max > 0 ? s_max : active);
        std::vector<int> s_values;
        for (int s = 1; s <= upper; ++s) s_values.push_back(s);
        std::string theta_text = "s,psi,theta\n";
        if (!s_values.empty()) {
            for (const auto& p : theta_curve(B, cov, n_rows, s_values, cov_mode))
                theta_text += std::to_string(p.s) + ',' + csv::format_double(p.psi) + ',' +
                              csv::format_double(p.theta) + '\n';
        }
        write_file(out[0], theta_text);

        std::vector<int> rows_in_block;
        for (int j = 0; j < M; ++j)
            if (names[j].rfind(block + "_", 0) == 0 || (block == "dow" && names[j].rfind("dow_", 0) == 0))
                rows_in_block.push_back(j);
        if (rows_in_block.empty()) throw Error(Errc::UnknownColumn, "no features in block '" + block + "'");
        const auto corr = coefficient_correlation(history, rows_in_block);
        std::string corr_text = "hour";
        for (int h = 0; h < H; ++h) corr_text += ",h" + std::string(h < 9 ? "0" : "") + std::to_string(h + 1);
        corr_text += ",degenerate\n";
        for (int r = 0; r < H; ++r) {
            corr_text += "h" + std::string(r < 9 ? "0" : "") + std::to_string(r + 1);
            for (int c = 0; c < H; ++c) corr_text += ',' + csv::format_double(corr.correlation(r, c));
            corr_text += corr.degenerate[r] ? ",1\n" : ",0\n";
        }
        write_file(out[1], corr_text);
        os << "matrices=" << history.size() << " active_groups=" << active << " theta_points=" << s_values.size()
           << " block=" << block << " (" << rows_in_block.size() << " rows)\n";
        return kExitOk;
    }
};

} // namespace

std::string version_string() {
    std::string v = "cinglear " CINGLEAR_VERSION;
#if defined(__clang__)
    v += " (clang " __clang_version__ ")";
#elif defined(__GNUC__)
    v += " (gcc " + std::to_string(__GNUC__) + '.' + std::to_string(__GNUC_MINOR__) + '.' +
         std::to_string(__GNUC_PATCHLEVEL__) + ")";
#endif
#ifdef NDEBUG
    v += " release";
#else
    v += " debug";
#endif
    v += ", Eigen " + std::to_string(EIGEN_WORLD_VERSION) + '.' + std::to_string(EIGEN_MAJOR_VERSION) + '.' +
         std::to_string(EIGEN_MINOR_VERSION);
    return v;
}

int run(const std::vector<std::string>& args, std::ostream& os, std::ostream& es) {
    CLI::App app{"Day-ahead electricity price forecasting with multivariate group lasso"};
    app.name("cinglear");
    app.set_config("--config", "", "key=value configuration file (flags override it)");
    app.set_version_flag("--version", version_string());
    int jobs = 0;
    app.add_option("--jobs", jobs, "Concurrent backtest days (default: available cores)")
        ->check(CLI::NonNegativeNumber);
    app.require_subcommand(1, 1);

    SynthCommand synth;
    FitCommand fit;
    ForecastCommand forecast;
    BacktestCommand backtest;
    DiagnoseCommand diagnose;
    synth.add_to(*app.add_subcommand("synth", "Generate a synthetic panel and its true coefficients"));
    fit.add_to(*app.add_subcommand("fit", "Fit CING or LEAR coefficients on one calibration window"));
    forecast.add_to(*app.add_subcommand("forecast", "Forecast one delivery day"));
    backtest.add_to(*app.add_subcommand("backtest", "Sliding-window evaluation of the selected models"));
    diagnose.add_to(*app.add_subcommand("diagnose", "Sample-complexity curve and coefficient correlations"));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, os, es);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const auto* sub = app.get_subcommands().front();
        const auto& name = sub->get_name();
        if (name == "synth") return synth.execute(os);
        if (name == "fit") return fit.execute(os);
        if (name == "forecast") return forecast.execute(os, jobs);
        if (name == "backtest") return backtest.execute(os, jobs, json{{"jobs", jobs}});
        return diagnose.execute(os);
    } catch (const CLI::ParseError& e) {
        app.exit(e, os, es);
        return kExitUsage;
    } catch (const Error& e) {
        es << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        es << "error: " << e.what() << '\n';
        return kExitData;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

} // namespace cinglear::cli
