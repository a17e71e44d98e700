#pragma once

#include <span>
#include <string>
#include <vector>

#include "cinglear/dataset.hpp"
#include "cinglear/preprocess.hpp"
#include "cinglear/types.hpp"

namespace cinglear {

/// Earliest 0-based day with every lag (d-1, d-2, d-3, d-7) available.
inline constexpr int kFirstFeatureDay = 7;

enum class FeatureKind { PriceLag, Exogenous, DayOfWeek };

struct FeatureSpec {
    std::string name;  // e.g. "price_lag1_h05", "load_d0_h13", "dow_3"
    std::string block; // e.g. "price_lag1", "load_d0", "dow"
    FeatureKind kind = FeatureKind::PriceLag;
    int series = -1; // exogenous index, -1 for prices and dummies
    int lag = 0;     // days
    int index = 0;   // hour (0-based) or weekday (0-based)

    bool operator==(const FeatureSpec&) const = default;
};

/// Column order of the day-d feature vector:
/// p_{d-1}, p_{d-2}, p_{d-3}, p_{d-7}, {x_d^k}_k, {x_{d-1}^k}_k, {x_{d-7}^k}_k, z_d.
struct FeatureLayout {
    int hours_per_day = 24;
    std::vector<std::string> exogenous_names;
    std::vector<FeatureSpec> features;

    [[nodiscard]] int width() const { return static_cast<int>(features.size()); }
    [[nodiscard]] std::vector<std::string> names() const;
    /// Indices of the features belonging to a block, in layout order.
    [[nodiscard]] std::vector<int> block_indices(std::string_view block) const;
    /// One feature name per line.
    [[nodiscard]] std::string manifest() const;

    bool operator==(const FeatureLayout&) const = default;
};

/// M = 4H + 3KH + 7.
FeatureLayout make_layout(int hours_per_day, std::span<const std::string> exogenous_names);

/// Raw feature vector of day d (0-based, d >= 7) in the panel's own units.
Vector build_feature_vector(const PanelDataset& data, int day);

/// Inclusive range of 0-based days.
struct DayRange {
    int first = 0;
    int last = -1;
    [[nodiscard]] int size() const { return last - first + 1; }
};

struct DesignOptions {
    bool transform_prices = true;
    bool transform_exogenous = true;
};

/// Standardized regression pair for one calibration window.
///
/// Non-dummy columns are centered and scaled to (1/N) sum x^2 = 1; dummy
/// columns are left as 0/1. Zero-variance columns (and all-zero dummies)
/// are dropped and listed in `dropped`. Targets are centered per hour and
/// the hourly means kept in `target_mean`.
struct Design {
    FeatureLayout layout;
    DayRange window;
    DesignOptions options;
    std::vector<int> kept;    // layout index of each X column
    std::vector<int> dropped; // layout indices removed from X
    Matrix X;                 // N x kept.size()
    Matrix P;                 // N x H, centered
    Vector column_mean;
    Vector column_scale;
    Vector target_mean;
    SeriesTransform price_transform;
    std::vector<SeriesTransform> exogenous_transforms;

    [[nodiscard]] int n_rows() const { return static_cast<int>(X.rows()); }
    [[nodiscard]] int hours() const { return layout.hours_per_day; }

    /// Standardized X row for any day using the stored window statistics.
    [[nodiscard]] Vector row(const PanelDataset& data, int day) const;
    /// Transformed (uncentered) price vector of a day.
    [[nodiscard]] Vector transformed_prices(const PanelDataset& data, int day) const;
    /// Maps a transformed-space price vector back to $/MWh.
    [[nodiscard]] Vector to_price_units(const Vector& transformed) const;
    /// Expands a kept-column coefficient matrix to the full layout (dropped rows = 0).
    [[nodiscard]] Matrix expand(const Matrix& kept_coefficients) const;
};

/// Transforms fitted on days [first - 7, last] so lags share one scale.
Design build_design(const PanelDataset& data, DayRange window, const DesignOptions& options = {});

} // namespace cinglear
