#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "cinglear/backtest.hpp"
#include "cinglear/cli.hpp"
#include "cinglear/dataset.hpp"
#include "cinglear/diagnostics.hpp"
#include "cinglear/errors.hpp"
#include "cinglear/preprocess.hpp"
#include "cinglear/probabilistic.hpp"
#include "cinglear/solver.hpp"

namespace py = pybind11;
using namespace cinglear;

namespace {

py::dict fit_to_dict(const Matrix& B, const FitDiagnostics& d) {
    py::dict out;
    out["B"] = B;
    out["lambda"] = d.lambda;
    out["objective"] = d.objective;
    out["kkt_residual"] = d.kkt_residual;
    out["iterations"] = d.iterations;
    out["converged"] = d.converged;
    return out;
}

SolverOptions make_options(double tol, double kkt_tol, int max_iter) {
    SolverOptions o;
    o.tol = tol;
    o.kkt_tol = kkt_tol;
    o.max_iter = max_iter;
    return o;
}

std::vector<ModelKind> parse_models(const std::vector<std::string>& names) {
    std::vector<ModelKind> out;
    for (const auto& n : names) {
        const auto kind = parse_model(n);
        if (!kind) throw Error(Errc::InvalidSpec, "unknown model '" + n + "'");
        out.push_back(*kind);
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Group-lasso day-ahead price forecasting";
    m.attr("__version__") = CINGLEAR_VERSION;

    static py::exception<Error> error_type(m, "Error", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
            exc.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(error_type.ptr(), exc.ptr());
        }
    });

    py::class_<PanelDataset>(m, "Panel")
        .def_property_readonly("n_days", &PanelDataset::n_days)
        .def_readonly("hours_per_day", &PanelDataset::hours_per_day)
        .def_readonly("prices", &PanelDataset::prices)
        .def_property_readonly("exogenous_names", &PanelDataset::exogenous_names)
        .def("exogenous", [](const PanelDataset& d, const std::string& name) {
            const int i = d.find_exogenous(name);
            if (i < 0) throw Error(Errc::UnknownColumn, "no exogenous series '" + name + "'");
            return d.exogenous[i].values;
        })
        .def("date", &PanelDataset::date_string)
        .def("head", &PanelDataset::head)
        .def("save", [](const PanelDataset& d, const std::filesystem::path& p) { write_series(p, d); });

    m.def("load_series", [](const std::filesystem::path& path) { return load_series(path); }, py::arg("path"));

    m.def(
        "generate_synthetic",
        [](int n_days, int hours, std::vector<std::string> exogenous, int support, double noise,
           std::uint64_t seed) {
            SyntheticSpec spec;
            spec.n_days = n_days;
            spec.hours_per_day = hours;
            spec.exogenous_names = std::move(exogenous);
            spec.support = support;
            spec.noise_sigma = noise;
            spec.seed = seed;
            auto panel = generate_synthetic(spec);
            return py::make_tuple(panel.data, panel.truth.B, panel.support);
        },
        py::arg("n_days") = 200, py::arg("hours") = 24,
        py::arg("exogenous") = std::vector<std::string>{"load", "solar", "gas_gen", "fuel_price"},
        py::arg("support") = 5, py::arg("noise") = 1.0, py::arg("seed") = 0,
        "Synthetic panel; returns (panel, true coefficients, support rows).");

    m.def(
        "regression_fixture",
        [](int n_rows, int n_features, int n_outputs, int support, double noise, std::uint64_t seed) {
            RegressionSpec spec{n_rows, n_features, n_outputs, support, noise, 1.0, seed};
            auto f = generate_regression_fixture(spec);
            return py::make_tuple(f.X, f.P, f.truth, f.support);
        },
        py::arg("n_rows") = 500, py::arg("n_features") = 50, py::arg("n_outputs") = 4,
        py::arg("support") = 5, py::arg("noise") = 0.1, py::arg("seed") = 0);

    m.def("fit_scaler", [](const std::vector<double>& v) {
        const auto s = fit_scaler(v);
        return py::make_tuple(s.location, s.scale);
    });
    m.def("transform", [](double location, double scale, double v) { return transform({location, scale}, v); });
    m.def("inverse_transform",
          [](double location, double scale, double t) { return inverse_transform({location, scale}, t); });

    m.def("lambda_max", py::overload_cast<const Matrix&, const Matrix&>(&lambda_max), py::arg("X"), py::arg("P"));
    m.def("lambda_grid", &lambda_grid, py::arg("lambda_max"), py::arg("n") = 100, py::arg("ratio") = 1e-4);
    m.def(
        "fit_group_lasso",
        [](const Matrix& X, const Matrix& P, double lambda, double tol, double kkt_tol, int max_iter) {
            const auto fit = fit_group_lasso(X, P, lambda, make_options(tol, kkt_tol, max_iter));
            return fit_to_dict(fit.B, fit.diagnostics);
        },
        py::arg("X"), py::arg("P"), py::arg("lam"), py::arg("tol") = 1e-4, py::arg("kkt_tol") = 1e-4,
        py::arg("max_iter") = 5000);
    m.def("objective", &group_lasso_objective, py::arg("X"), py::arg("P"), py::arg("B"), py::arg("lam"));
    m.def("kkt_residual", py::overload_cast<const Matrix&, const Matrix&, const Matrix&, double>(&kkt_residual),
          py::arg("X"), py::arg("P"), py::arg("B"), py::arg("lam"));
    m.def(
        "cross_validate",
        [](const Matrix& X, const Matrix& P, std::vector<double> grid, int folds) {
            const auto cv = cross_validate(X, P, grid, folds);
            py::dict out;
            out["lambdas"] = cv.lambdas;
            out["cv_error"] = cv.cv_error;
            out["best_index"] = cv.best_index;
            out["best_lambda"] = cv.best_lambda;
            return out;
        },
        py::arg("X"), py::arg("P"), py::arg("grid"), py::arg("folds") = 5);

    m.def("crps_sample", [](const std::vector<double>& s, double y) { return crps_sample(s, y); });
    m.def("crps_gaussian", &crps_gaussian_closed_form, py::arg("mu"), py::arg("sigma"), py::arg("y"));
    m.def(
        "sample_gaussian",
        [](const Vector& mean, const Matrix& cov, int n, std::uint64_t seed) {
            PredictiveDistribution d;
            d.mean = mean;
            d.covariance = cov;
            return sample(d, n, seed);
        },
        py::arg("mean"), py::arg("cov"), py::arg("n") = kDefaultSamples, py::arg("seed") = 0,
        "Draws n x H samples without back-transformation.");

    m.def(
        "support",
        [](const Matrix& B, int top) {
            return (top > 0 ? support(B, SupportRule::TopS, top) : support(B, SupportRule::Threshold)).indices;
        },
        py::arg("B"), py::arg("top") = 0);
    m.def("sample_complexity", &sample_complexity, py::arg("n_rows"), py::arg("n_features"), py::arg("s"),
          py::arg("psi"));
    m.def(
        "theta_curve",
        [](const Matrix& B, const Matrix& cov, int n_rows, std::vector<int> s_values, const std::string& mode) {
            const auto kind = mode == "error" ? CovarianceMode::Error : CovarianceMode::Design;
            std::vector<std::tuple<int, double, double>> out;
            for (const auto& p : theta_curve(B, cov, n_rows, s_values, kind)) out.emplace_back(p.s, p.psi, p.theta);
            return out;
        },
        py::arg("B"), py::arg("cov"), py::arg("n_rows"), py::arg("s_values"), py::arg("mode") = "design",
        "Returns (s, psi, theta) tuples.");

    m.def(
        "backtest",
        [](const PanelDataset& data, int train_days, int test_days, std::vector<std::string> models,
           std::uint64_t seed, int n_lambda, int n_samples, int jobs) {
            BacktestConfig cfg;
            cfg.train_days = train_days;
            cfg.test_days = test_days;
            cfg.models = parse_models(models);
            cfg.seed = seed;
            cfg.n_lambda = n_lambda;
            cfg.n_samples = n_samples;
            cfg.jobs = jobs;
            BacktestReport report;
            {
                py::gil_scoped_release release;
                report = run_sliding_window(data, cfg);
            }
            py::dict metrics;
            for (const auto& r : report.models) {
                py::dict row;
                row["mae"] = r.metrics.mae;
                row["rmse"] = r.metrics.rmse;
                row["crps"] = r.metrics.crps;
                row["failed_days"] = r.metrics.failed_days;
                metrics[py::str(r.name)] = row;
            }
            py::dict out;
            out["metrics"] = metrics;
            out["dates"] = report.dates;
            out["actuals"] = report.actuals;
            out["cing_lambda"] = report.cing_lambda;
            return out;
        },
        py::arg("data"), py::arg("train_days"), py::arg("test_days"),
        py::arg("models") = std::vector<std::string>{"snaive", "lear", "cing"}, py::arg("seed") = 0,
        py::arg("n_lambda") = 100, py::arg("n_samples") = kDefaultSamples, py::arg("jobs") = 0);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release release;
                code = cli::run(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command line with `args`; returns (exit code, stdout, stderr).");
}
