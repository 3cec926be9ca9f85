#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "fheston/cgf_engine.hpp"

namespace fheston::detail {

struct RiccatiEndpoint {
    double time = 0.0;  // last accepted time (t unless the solution exploded)
    Complex a;
    Complex b;
    std::optional<double> blow_up_time;
};

/// Called on every accepted node (s, A(s), B(s)), starting with s = 0.
using RiccatiObserver = std::function<void(double, Complex, Complex)>;

RiccatiEndpoint integrate_riccati(const ModelParams& p, const CgfQuery& q, double tol,
                                  std::size_t max_nodes, const RiccatiObserver& observer);

}  // namespace fheston::detail
