#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "cinglear/errors.hpp"
#include "cinglear/preprocess.hpp"

using namespace cinglear;

TEST(Preprocess, ScalerOfOneTwoThree) {
    const std::vector<double> v = {1.0, 2.0, 3.0};
    const auto s = fit_scaler(v);
    EXPECT_EQ(s.location, 2.0);
    EXPECT_EQ(s.scale, 1.4826);
}

TEST(Preprocess, MadFactor) {
    // 1 / Phi^{-1}(0.75) = 1.482602...
    EXPECT_NEAR(kMadFactor, 1.0 / 0.6744897501960817, 1e-5);
}

TEST(Preprocess, ConstantSeriesFallsBackToUnitScale) {
    const std::vector<double> v = {7.5, 7.5, 7.5};
    const auto s = fit_scaler(v);
    EXPECT_EQ(s.location, 7.5);
    EXPECT_EQ(s.scale, 1.0);
}

TEST(Preprocess, EvenLengthMedian) {
    const std::vector<double> v = {4.0, 1.0, 3.0, 2.0};
    const auto s = fit_scaler(v);
    EXPECT_DOUBLE_EQ(s.location, 2.5);
    EXPECT_DOUBLE_EQ(s.scale, 1.4826 * 1.0);
}

TEST(Preprocess, EmptyInput) {
    try {
        fit_scaler(std::vector<double>{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::EmptyInput);
    }
}

TEST(Preprocess, TransformExamples) {
    const Scaler s{2.0, 1.4826};
    EXPECT_EQ(transform(s, 2.0), 0.0);
    EXPECT_NEAR(transform(s, 3.0), 0.63172, 1e-4);
    EXPECT_NEAR((3.0 - 2.0) / 1.4826, 0.67449, 5e-6);
    EXPECT_NEAR(transform(s, 3.0), std::log(0.6744907594765952 + std::sqrt(0.6744907594765952 * 0.6744907594765952 + 1)), 1e-15);
    EXPECT_EQ(inverse_transform(s, 0.0), 2.0);
    EXPECT_NEAR(inverse_transform(s, 0.63172), 3.0, 5e-4);
}

TEST(Preprocess, OddSymmetry) {
    const Scaler s{10.0, 3.0};
    for (double delta : {0.1, 1.0, 25.0, 1e4}) EXPECT_DOUBLE_EQ(transform(s, 10.0 + delta), -transform(s, 10.0 - delta));
}

TEST(Preprocess, RoundTripAndMonotone) {
    const Scaler s{35.0, 12.5};
    double previous = -std::numeric_limits<double>::infinity();
    for (double v = -1e4; v <= 1e4; v += 37.5) {
        const double t = transform(s, v);
        EXPECT_GT(t, previous);
        previous = t;
        EXPECT_NEAR(inverse_transform(s, t), v, 1e-12 * std::max(1.0, std::abs(v)));
    }
    for (double v : {-100.0, 0.0, 1e4}) EXPECT_LE(std::abs(inverse_transform(s, transform(s, v)) - v), 1e-12 * std::max(1.0, std::abs(v)));
}

TEST(Preprocess, DisabledTransformIsIdentity) {
    SeriesTransform t;
    EXPECT_EQ(t.forward(-3.25), -3.25);
    EXPECT_EQ(t.backward(8.0), 8.0);
    t.enabled = true;
    t.scaler = {1.0, 2.0};
    EXPECT_DOUBLE_EQ(t.forward(1.0), 0.0);
}
