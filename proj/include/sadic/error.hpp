#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sadic {

enum class ErrorKind {
    OutsideDomain,
    DegenerateBoundary,
    ZeroImage,
    NoNestedSeed,
    Unsaturated,
    NotPrimitive,
    IndeterminatePrecision,
    EnumerationTooLarge,
    SearchExhausted,
    UnsupportedMeasure,
    OrbitExit,
    CloudTooSparse,
    InvalidArgument,
    Parse,
    Io,
};

inline std::string_view to_string(ErrorKind k)
{
    switch (k) {
    case ErrorKind::OutsideDomain: return "OutsideDomain";
    case ErrorKind::DegenerateBoundary: return "DegenerateBoundary";
    case ErrorKind::ZeroImage: return "ZeroImage";
    case ErrorKind::NoNestedSeed: return "NoNestedSeed";
    case ErrorKind::Unsaturated: return "Unsaturated";
    case ErrorKind::NotPrimitive: return "NotPrimitive";
    case ErrorKind::IndeterminatePrecision: return "IndeterminatePrecision";
    case ErrorKind::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorKind::SearchExhausted: return "SearchExhausted";
    case ErrorKind::UnsupportedMeasure: return "UnsupportedMeasure";
    case ErrorKind::OrbitExit: return "OrbitExit";
    case ErrorKind::CloudTooSparse: return "CloudTooSparse";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

// Errors caused by the mathematical input rather than by misuse or I/O.
inline bool is_domain_error(ErrorKind k)
{
    switch (k) {
    case ErrorKind::OutsideDomain:
    case ErrorKind::DegenerateBoundary:
    case ErrorKind::ZeroImage:
    case ErrorKind::NoNestedSeed:
    case ErrorKind::Unsaturated:
    case ErrorKind::NotPrimitive:
    case ErrorKind::IndeterminatePrecision:
    case ErrorKind::EnumerationTooLarge:
    case ErrorKind::SearchExhausted:
    case ErrorKind::UnsupportedMeasure:
    case ErrorKind::OrbitExit:
    case ErrorKind::CloudTooSparse:
        return true;
    default:
        return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }
    /// The message without the kind prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorKind kind_;
    std::string message_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

} // namespace sadic
