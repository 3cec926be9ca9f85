#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fheston/core_model.hpp"

namespace fheston {

// Runtime self-checks of the numerical engines against closed forms and
// limit theorems. Each suite has its own default parameters; any field can
// be overridden.

enum class Suite { smalltime, largetime, bounds, oracle, mc };

/// Throws Error{OutOfRange, "suite"} for an unknown name.
Suite parse_suite(std::string_view name);
std::string_view to_string(Suite suite);

/// One check: pass iff |observed - expected| <= tolerance.
struct CheckRow {
    std::string name;
    double expected = 0.0;
    double observed = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

CheckRow make_check(std::string name, double expected, double observed, double tolerance);

struct ParamOverrides {
    std::optional<double> kappa, theta, xi, v0, eta, d;

    RawParams apply(RawParams base) const;
};

struct VerifyOptions {
    ParamOverrides overrides;
    std::uint64_t seed = 1;
    std::optional<std::size_t> paths;
    std::optional<std::size_t> steps;
};

RawParams suite_defaults(Suite suite);

std::vector<CheckRow> run_suite(Suite suite, const VerifyOptions& opts = {});

}  // namespace fheston
