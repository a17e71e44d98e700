#pragma once

#include <span>

namespace cinglear {

/// Consistency factor turning a MAD into a Gaussian scale estimate (1/z_0.75).
inline constexpr double kMadFactor = 1.4826;

/// Robust location/scale pair; `scale` is always positive.
struct Scaler {
    double location = 0.0;
    double scale = 1.0;
};

/// Median and 1.4826 x MAD. A zero MAD falls back to scale 1.
Scaler fit_scaler(std::span<const double> values);

/// asinh((v - a) / b)
double transform(const Scaler& s, double value);

/// a + b sinh(t)
double inverse_transform(const Scaler& s, double transformed);

/// Optional normalize+asinh stage; identity when disabled.
struct SeriesTransform {
    bool enabled = false;
    Scaler scaler;

    [[nodiscard]] double forward(double v) const { return enabled ? transform(scaler, v) : v; }
    [[nodiscard]] double backward(double t) const {
        return enabled ? inverse_transform(scaler, t) : t;
    }
};

} // namespace cinglear
