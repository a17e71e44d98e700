#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cinglear/cli.hpp"

namespace fs = std::filesystem;
using cinglear::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int count_lines(const std::string& text) { return static_cast<int>(std::count(text.begin(), text.end(), '\n')); }

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() / ("cinglear_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string synth(int days = 60) {
        const auto path = (dir / "synth.csv").string();
        const auto r = invoke({"synth", "--days", std::to_string(days), "--hours", "4", "--exogenous", "load,solar",
                               "--support", "3", "--seed", "7", "--out", path});
        EXPECT_EQ(r.code, 0) << r.err;
        return path;
    }

    std::vector<std::string> backtest_args(const std::string& data, const std::string& out) {
        return {"--jobs", "1", "backtest", "--data", data, "--hours", "4", "--exogenous", "load,solar",
                "--train-days", "30", "--test-days", "3", "--models", "snaive,lear,cing", "--n-lambda", "15",
                "--samples", "1000", "--seed", "3", "--out", out};
    }

    fs::path dir;
};

} // namespace

TEST_F(CliTest, SynthWritesPanelAndTruth) {
    const auto path = synth(200);
    ASSERT_TRUE(fs::exists(path));
    ASSERT_TRUE(fs::exists(dir / "synth_truth.csv"));
    EXPECT_EQ(count_lines(slurp(path)), 1 + 200 * 4);
    const auto truth = slurp(dir / "synth_truth.csv");
    EXPECT_EQ(truth.substr(0, truth.find('\n')), "feature,h01,h02,h03,h04");
    // Same seed, same bytes.
    const auto first = slurp(path);
    synth(200);
    EXPECT_EQ(first, slurp(path));
}

TEST_F(CliTest, BacktestMetricsAndDeterminism) {
    const auto data = synth();
    const auto out = (dir / "report").string();
    const auto r = invoke(backtest_args(data, out));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("cing mae="), std::string::npos);
    EXPECT_EQ(count_lines(r.out), 1);
    const auto metrics = slurp(fs::path(out) / "metrics.csv");
    EXPECT_EQ(count_lines(metrics), 4);
    const auto report = slurp(fs::path(out) / "report.json");
    EXPECT_NE(report.find("\"train_days\": 30"), std::string::npos);
    EXPECT_NE(report.find("\"seed\": 3"), std::string::npos);
    const auto input_before = slurp(data);

    const auto again = invoke(backtest_args(data, out));
    ASSERT_EQ(again.code, 0);
    EXPECT_EQ(slurp(fs::path(out) / "metrics.csv"), metrics);
    EXPECT_EQ(slurp(fs::path(out) / "report.json"), report);
    EXPECT_EQ(slurp(data), input_before);
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
    const auto data = synth();
    const auto cfg = dir / "run.ini";
    std::ofstream(cfg) << "[backtest]\ntrain-days=25\ntest-days=2\nmodels=snaive\n";
    const auto out = (dir / "cfg").string();
    const auto r = invoke({"--config", cfg.string(), "backtest", "--data", data, "--hours", "4", "--exogenous",
                           "load,solar", "--test-days", "1", "--samples", "500", "--out", out});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto report = slurp(fs::path(out) / "report.json");
    EXPECT_NE(report.find("\"train_days\": 25"), std::string::npos);
    EXPECT_NE(report.find("\"test_days\": 1"), std::string::npos);
    EXPECT_EQ(count_lines(slurp(fs::path(out) / "metrics.csv")), 2);
}

TEST_F(CliTest, FitForecastDiagnose) {
    const auto data = synth();
    const auto coefs = (dir / "coef.csv").string();
    auto r = invoke({"fit", "--data", data, "--hours", "4", "--exogenous", "load,solar", "--train-days", "40",
                     "--n-lambda", "15", "--out", coefs});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("active_groups="), std::string::npos);
    EXPECT_TRUE(fs::exists(coefs));

    const auto fc = (dir / "forecast.csv").string();
    r = invoke({"forecast", "--data", data, "--hours", "4", "--exogenous", "load,solar", "--train-days", "40",
                "--n-lambda", "15", "--samples", "500", "--models", "snaive,cing", "--out", fc});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(count_lines(slurp(fc)), 1 + 2 * 4);

    const auto out = (dir / "report").string();
    ASSERT_EQ(invoke(backtest_args(data, out)).code, 0);
    const auto theta = (dir / "theta.csv").string(), corr = (dir / "corr.csv").string();
    r = invoke({"diagnose", "--coeffs", out + "/coefficients", "--out", theta + "," + corr, "--block", "load_d0"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(theta).substr(0, 12), "s,psi,theta\n");
    EXPECT_EQ(count_lines(slurp(corr)), 5);
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(invoke({}).code, 1);
    EXPECT_EQ(invoke({"explode"}).code, 1);
    EXPECT_EQ(invoke({"backtest", "--data", (dir / "missing.csv").string()}).code, 1);
    const auto data = synth();
    EXPECT_EQ(invoke({"backtest", "--data", data, "--models", "dnn"}).code, 1);
    // Default schema expects four exogenous columns.
    auto r = invoke({"backtest", "--data", data, "--hours", "4"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("gas_gen"), std::string::npos);
    r = invoke({"backtest", "--data", data, "--hours", "4", "--exogenous", "load,solar", "--test-days", "500"});
    EXPECT_EQ(r.code, 2);
    const auto v = invoke({"--version"});
    EXPECT_EQ(v.code, 0);
    EXPECT_NE(v.out.find("cinglear"), std::string::npos);
}

TEST_F(CliTest, FailureBudgetExitCode) {
    const auto data = synth(20);
    const auto r = invoke({"backtest", "--data", data, "--hours", "4", "--exogenous", "load,solar", "--train-days",
                           "30", "--test-days", "3", "--first-test-day", "12", "--models", "snaive,arima",
                           "--samples", "200", "--out", (dir / "budget").string()});
    EXPECT_EQ(r.code, 3) << r.out << r.err;
}
