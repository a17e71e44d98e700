#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cinglear/coefficients.hpp"
#include "cinglear/types.hpp"

namespace cinglear {

struct ExogenousSeries {
    std::string name;
    Matrix values; // n_days x hours_per_day
};

/// Aligned hourly panel: prices plus K exogenous series over N whole days.
/// Day indices are 0-based throughout the library.
struct PanelDataset {
    std::chrono::year_month_day start_date{std::chrono::year{2024}, std::chrono::January,
                                           std::chrono::day{1}};
    int hours_per_day = 24;
    Matrix prices;
    std::vector<ExogenousSeries> exogenous;
    std::vector<int> day_of_week; // 1 = Monday ... 7 = Sunday

    [[nodiscard]] int n_days() const { return static_cast<int>(prices.rows()); }
    [[nodiscard]] int n_exogenous() const { return static_cast<int>(exogenous.size()); }
    [[nodiscard]] std::chrono::year_month_day date(int day) const;
    [[nodiscard]] std::string date_string(int day) const;
    [[nodiscard]] std::vector<std::string> exogenous_names() const;

    /// Index of the named exogenous series, or -1.
    [[nodiscard]] int find_exogenous(std::string_view name) const;

    /// First n days only; used for causality checks and truncation.
    [[nodiscard]] PanelDataset head(int n) const;

    /// Throws Error(InvalidSpec) when an invariant is broken.
    void validate() const;
};

/// ISO weekday (1 = Monday) for a calendar date.
int iso_weekday(std::chrono::year_month_day date);

enum class FillStrategy {
    None,    // any day with != H rows is an error
    Forward, // missing hours copy the previous hour; duplicated hours are averaged
};

/// Maps logical series to CSV columns. Exogenous entries are (name, column).
struct CsvSchema {
    std::string timestamp_column = "timestamp";
    std::string price_column = "lmp";
    std::vector<std::pair<std::string, std::string>> exogenous = {
        {"load", "load"}, {"solar", "solar"}, {"gas_gen", "gas_gen"}, {"fuel_price", "fuel_price"}};
    int hours_per_day = 24;
    FillStrategy fill = FillStrategy::None;
};

PanelDataset load_series(const std::filesystem::path& path, const CsvSchema& schema = {});
PanelDataset parse_series(std::istream& in, const CsvSchema& schema = {});

/// Writes `timestamp,lmp,<exogenous names...>` with round-trip exact values.
void write_series(const std::filesystem::path& path, const PanelDataset& data);
void write_series(std::ostream& out, const PanelDataset& data);

/// Panel fixture whose prices are linear in the raw feature vector of
/// each day: p_d = intercept + B*^T x_d + e_d with B* row-sparse and
/// supported on exogenous feature rows.
struct SyntheticSpec {
    int n_days = 200;
    int hours_per_day = 24;
    std::vector<std::string> exogenous_names = {"load", "solar", "gas_gen", "fuel_price"};
    int support = 5;
    double noise_sigma = 1.0;
    double coef_scale = 4.0;
    double price_level = 50.0;
    std::uint64_t seed = 0;
    std::chrono::year_month_day start_date{std::chrono::year{2024}, std::chrono::January,
                                           std::chrono::day{1}};
};

struct SyntheticPanel {
    PanelDataset data;
    CoefficientMatrix truth; // raw feature units, intercept = price level
    std::vector<int> support;
};

SyntheticPanel generate_synthetic(const SyntheticSpec& spec);

/// Direct regression fixture for support-recovery studies: X has i.i.d.
/// standard Gaussian columns, standardized; P = X B* + E, centered per column.
struct RegressionSpec {
    int n_rows = 500;
    int n_features = 50;
    int n_outputs = 4;
    int support = 5;
    double noise_sigma = 0.1;
    double coef_scale = 1.0;
    std::uint64_t seed = 0;
};

struct RegressionFixture {
    Matrix X;
    Matrix P;
    Matrix truth;
    std::vector<int> support;
};

RegressionFixture generate_regression_fixture(const RegressionSpec& spec);

} // namespace cinglear
