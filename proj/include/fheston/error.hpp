#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fheston {

enum class ErrorKind {
    OutOfRange,
    NonFinite,
    QuadratureFailure,
    PoleProximity,
    HorizonTooShort,
    NoSolution,
    GridMismatch,
    OutsideDomain,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::OutOfRange: return "OutOfRange";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::QuadratureFailure: return "QuadratureFailure";
        case ErrorKind::PoleProximity: return "PoleProximity";
        case ErrorKind::HorizonTooShort: return "HorizonTooShort";
        case ErrorKind::NoSolution: return "NoSolution";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::OutsideDomain: return "OutsideDomain";
    }
    return "Unknown";
}

// Bad input (as opposed to a numerical failure on valid input).
constexpr bool is_validation_error(ErrorKind kind) {
    return kind == ErrorKind::OutOfRange || kind == ErrorKind::NonFinite ||
           kind == ErrorKind::NoSolution || kind == ErrorKind::GridMismatch;
}

/// Library exception. what() reads "<Kind>: <detail>", e.g. "OutOfRange: d".
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
          kind_(kind), detail_(detail) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

}  // namespace fheston
