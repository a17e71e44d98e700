#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cinglear {

enum class Errc {
    EmptyInput,
    MissingHour,
    NonMonotonicTimestamps,
    UnknownColumn,
    ParseError,
    InvalidSpec,
    InsufficientHistory,
    DegenerateColumn,
    EmptyDesign,
    InvalidGrid,
    NonFiniteInput,
    TooFewRows,
    SingularRegression,
    TooShort,
    MissingExogenous,
    LengthMismatch,
    EmptyResiduals,
    NonPSD,
    InvalidLevel,
    TooFewSamples,
    InsufficientData,
    ShapeMismatch,
    MissingDistribution,
    InvalidRule,
    SingularCovariance,
    EmptySupport,
    InvalidDimensions,
    TooFewMatrices,
    Io,
};

std::string_view to_string(Errc code) noexcept;

/// Exception carrying a machine-readable error kind.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace cinglear
