#include "cinglear/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cinglear/errors.hpp"

namespace cinglear {

namespace {

double median_inplace(std::vector<double>& v) {
    const auto n = v.size();
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    const double upper = *mid;
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

} // namespace

Scaler fit_scaler(std::span<const double> values) {
    if (values.empty()) throw Error(Errc::EmptyInput, "fit_scaler needs at least one value");
    std::vector<double> work(values.begin(), values.end());
    const double location = median_inplace(work);
    for (std::size_t i = 0; i < work.size(); ++i) work[i] = std::abs(values[i] - location);
    const double mad = median_inplace(work);
    const double scale = kMadFactor * mad;
    return {location, scale > 0.0 ? scale : 1.0};
}

double transform(const Scaler& s, double value) {
    return std::asinh((value - s.location) / s.scale);
}

double inverse_transform(const Scaler& s, double transformed) {
    return s.location + s.scale * std::sinh(transformed);
}

} // namespace cinglear
