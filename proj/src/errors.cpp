#include "cinglear/errors.hpp"

namespace cinglear {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::MissingHour: return "MissingHour";
    case Errc::NonMonotonicTimestamps: return "NonMonotonicTimestamps";
    case Errc::UnknownColumn: return "UnknownColumn";
    case Errc::ParseError: return "ParseError";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::InsufficientHistory: return "InsufficientHistory";
    case Errc::DegenerateColumn: return "DegenerateColumn";
    case Errc::EmptyDesign: return "EmptyDesign";
    case Errc::InvalidGrid: return "InvalidGrid";
    case Errc::NonFiniteInput: return "NonFiniteInput";
    case Errc::TooFewRows: return "TooFewRows";
    case Errc::SingularRegression: return "SingularRegression";
    case Errc::TooShort: return "TooShort";
    case Errc::MissingExogenous: return "MissingExogenous";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyResiduals: return "EmptyResiduals";
    case Errc::NonPSD: return "NonPSD";
    case Errc::InvalidLevel: return "InvalidLevel";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::MissingDistribution: return "MissingDistribution";
    case Errc::InvalidRule: return "InvalidRule";
    case Errc::SingularCovariance: return "SingularCovariance";
    case Errc::EmptySupport: return "EmptySupport";
    case Errc::InvalidDimensions: return "InvalidDimensions";
    case Errc::TooFewMatrices: return "TooFewMatrices";
    case Errc::Io: return "Io";
    }
    return "Unknown";
}

} // namespace cinglear
