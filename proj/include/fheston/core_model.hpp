#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "fheston/error.hpp"

namespace fheston {

/// Unvalidated model constants, in the order they appear on the command line.
struct RawParams {
    double kappa = 0.0;  // mean-reversion rate
    double theta = 0.0;  // long-run variance
    double xi = 0.0;     // vol-of-vol
    double v0 = 0.0;     // initial variance
    double eta = 0.0;    // variance floor shift
    double d = 0.0;      // fractional order

    bool operator==(const RawParams&) const = default;
};

/// Validated parameter set of the uncorrelated fractional Heston model.
///
///   dX = -V^d/2 dt + sqrt(V^d) dB,   dV = kappa (theta - V) dt + xi sqrt(V) dW,
///   V^d = eta + I^d V   (Riemann-Liouville integral of order d),
///
/// with B and W independent. Instances can only be obtained through
/// validate_params(), so every ModelParams satisfies d in [-1/2, 1/2],
/// v0 > 0 and kappa, theta, xi, eta >= 0. xi = 0 and kappa = 0 are accepted
/// as degenerate modes.
class ModelParams {
public:
    double kappa() const noexcept { return raw_.kappa; }
    double theta() const noexcept { return raw_.theta; }
    double xi() const noexcept { return raw_.xi; }
    double v0() const noexcept { return raw_.v0; }
    double eta() const noexcept { return raw_.eta; }
    double d() const noexcept { return raw_.d; }
    const RawParams& raw() const noexcept { return raw_; }

    /// 2 kappa theta >= xi^2. Informational only, never enforced.
    bool feller() const noexcept { return 2.0 * raw_.kappa * raw_.theta >= raw_.xi * raw_.xi; }
    bool deterministic_variance() const noexcept { return raw_.xi == 0.0; }
    bool zero_mean_reversion() const noexcept { return raw_.kappa == 0.0; }

    bool operator==(const ModelParams&) const = default;

private:
    explicit ModelParams(const RawParams& raw) : raw_(raw) {}
    friend ModelParams validate_params(const RawParams& raw);

    RawParams raw_;
};

/// Throws Error{NonFinite, field} or Error{OutOfRange, field}.
ModelParams validate_params(const RawParams& raw);
inline ModelParams validate_params(const ModelParams& p) { return validate_params(p.raw()); }

/// Parses a flat JSON object with keys "kappa","theta","xi","v0","eta","d".
/// Missing keys or non-numeric values raise Error{OutOfRange, key}; unknown
/// keys are rejected the same way.
RawParams params_from_json(std::string_view text);

/// Strictly increasing sequence of times starting at 0.
class TimeGrid {
public:
    static TimeGrid from_nodes(std::vector<double> nodes);
    /// n equal steps on [0, t].
    static TimeGrid uniform(double t, std::size_t steps);

    std::span<const double> nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    double operator[](std::size_t i) const noexcept { return nodes_[i]; }
    double back() const noexcept { return nodes_.back(); }

private:
    explicit TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {}
    std::vector<double> nodes_;
};

/// Gamma function for x > 0 (Lanczos, g = 7, n = 9). Relative error ~1e-15.
double gamma_fn(double x);

/// 1 / Gamma(x) for x > -1, using Gamma(x) = Gamma(x + 1) / x. Zero at x = 0.
double reciprocal_gamma(double x);

/// Standard normal cumulative distribution function.
double std_normal_cdf(double z);

}  // namespace fheston
