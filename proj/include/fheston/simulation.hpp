#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fheston/core_model.hpp"
#include "fheston/philox.hpp"

namespace fheston {

enum class Scheme { full_truncation, exact_transition };

struct McConfig {
    std::size_t n_paths = 100'000;
    std::size_t steps_per_unit_time = 400;
    std::uint64_t seed = 1;
    Scheme scheme = Scheme::full_truncation;
    unsigned workers = 0;  // 0: one per hardware thread
};

/// Throws Error{OutOfRange} unless n_paths >= 2 and steps_per_unit_time >= 1.
void validate_config(const McConfig& cfg);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(n_paths)
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
};

/// Nonnegative CIR variance sampled on a grid; values[0] = v0.
struct VariancePath {
    TimeGrid grid;
    std::vector<double> values;
};

/// Uniform grid on [0, t] with max(1, ceil(t * steps_per_unit_time)) steps.
TimeGrid mc_grid(double t, std::size_t steps_per_unit_time);

/// Full truncation stores max(V, 0) of the Euler iterate
///   V_{k+1} = V_k + kappa (theta - V_k^+) dt + xi sqrt(V_k^+) dW.
/// The exact scheme samples the noncentral chi-square transition as a
/// Poisson mixture of Gamma variates (kappa = 0 handled as the limit; xi = 0
/// follows the deterministic mean).
VariancePath simulate_cir_path(const ModelParams& p, const TimeGrid& grid, PathRng& rng,
                               Scheme scheme = Scheme::full_truncation);

/// w_k = [(t - s_k)^(d+1) - (t - s_{k+1})^(d+1)] / Gamma(d+2), t = grid.back().
std::vector<double> product_integration_weights(const TimeGrid& grid, double d);

/// eta t + sum_k V_k w_k: the integral of (t-u)^d / Gamma(d+1) against the
/// piecewise-constant (left endpoint) path. Throws GridMismatch unless t is
/// the last grid node.
double integrated_frac_variance(const VariancePath& path, double d, double eta, double t);

/// E of the integrated fractional variance:
///   eta t + [theta t^(d+1)/(d+1) + (v0 - theta) int_0^t (t-s)^d e^(-kappa s) ds] / Gamma(d+1).
double expected_integrated_frac_variance(const ModelParams& p, double t);

/// Call on unit spot with strike e^x, averaging the conditional
/// Black-Scholes price bs_call_price(x, 1, sqrt(IV)) over simulated
/// variance paths. Output does not depend on cfg.workers.
McEstimate mc_call_price(const ModelParams& p, double x, double t, const McConfig& cfg);

/// Same paths for every strike.
std::vector<McEstimate> mc_call_prices(const ModelParams& p, std::span<const double> xs, double t,
                                       const McConfig& cfg);

/// Plain estimator: Euler steps of X driven by its own Brownian motion, payoff
/// max(e^X - e^x, 0). Only for d = 0 (Error{OutOfRange, "d"} otherwise).
McEstimate mc_call_price_euler(const ModelParams& p, double x, double t, const McConfig& cfg);

/// d > 0: pointwise V^d_t = eta + sum_k V_k [(t-s_k)^d - (t-s_{k+1})^d] / Gamma(d+1).
/// d = 0: eta + V_t.
/// d < 0: the time average (1/t) int_0^t V^d_s ds = eta + (IV - eta t) / t,
/// whose expectation is mean_Vd_time_average().
McEstimate mean_Vd_mc(const ModelParams& p, double t, const McConfig& cfg);

/// (1/t) int_0^t E V^d_s ds = expected_integrated_frac_variance(p, t) / t.
double mean_Vd_time_average(const ModelParams& p, double t);

/// E V_t = theta + (v0 - theta) e^(-kappa t).
double cir_mean(const ModelParams& p, double t);

/// Stationary autocovariance xi^2 theta e^(-kappa |h|) / (2 kappa).
/// Throws Error{OutOfRange, "kappa"} for kappa = 0.
double cov_V_stationary(const ModelParams& p, double h);

}  // namespace fheston
