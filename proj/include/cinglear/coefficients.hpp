#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cinglear/types.hpp"

namespace cinglear {

/// Jointly estimated coefficients: one row per feature, one column per
/// delivery hour. Rows are in the units of the design the fit ran on.
struct CoefficientMatrix {
    Matrix B;
    Vector intercept;
    std::vector<std::string> feature_names;

    [[nodiscard]] int n_features() const { return static_cast<int>(B.rows()); }
    [[nodiscard]] int n_hours() const { return static_cast<int>(B.cols()); }
};

/// Rows = features, columns = hours. The intercept is written as a final
/// row named "(intercept)" when present.
void write_coefficients_csv(const std::filesystem::path& path, const CoefficientMatrix& coefs);
CoefficientMatrix read_coefficients_csv(const std::filesystem::path& path);

} // namespace cinglear
