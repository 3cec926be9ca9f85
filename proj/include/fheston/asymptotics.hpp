#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "fheston/cgf_engine.hpp"
#include "fheston/core_model.hpp"
#include "fheston/pricing.hpp"

namespace fheston {

// Limiting cumulant generating functions and their convex duals.
//
//   Lambda_+(u) = -(kappa theta / xi) sqrt(u(1-u) / Gamma(1+d)),  u in [0, 1]
//   Lambda_-(u) = u(u-1) eta / 2
//   lambda_+^*(x) = x^2 / (2 eta),   lambda_-^*(x) = Gamma(2+d) x^2 / (2 v0)
//
// Lambda_+^*(x) = u(x) x - Lambda_+(u(x)) where u(x) is the maximiser of
// u x - Lambda_+(u).

enum class RateBranch { interior, linear_left, linear_right };

constexpr std::string_view to_string(RateBranch b) {
    switch (b) {
        case RateBranch::interior: return "interior";
        case RateBranch::linear_left: return "linear_left";
        case RateBranch::linear_right: return "linear_right";
    }
    return "unknown";
}

struct RateFunctionEval {
    double x = 0.0;
    double value = 0.0;
    RateBranch branch = RateBranch::interior;
};

/// Maximiser of u x - Lambda_+(u):
///   u(x) = (1/2) {1 + sgn(x) sqrt(1 - [1 + (x xi sqrt(Gamma(1+d)) / (kappa theta))^2]^-1)},
/// with sgn(0) = +1. Requires kappa theta > 0 and xi > 0.
double u_of_x(double x, const ModelParams& p);

double lambda_plus(double u, const ModelParams& p);
double lambda_minus(double u, double eta);
/// Lambda_-'(u) = (u - 1/2) eta.
double lambda_minus_slope(double u, double eta);

double rate_plus_star(double x, const ModelParams& p);
RateFunctionEval rate_minus_star(double x, double eta, double u_minus, double u_plus);
double small_rate_plus(double x, double eta);
double small_rate_minus(double x, double v0, double d);

struct LegendreResult {
    double value = 0.0;   // sup over [a, b] of u x - Lambda(u)
    double argmax = 0.0;
    bool nonconvex_detected = false;  // advisory: a three-point probe saw concavity
};

/// Numerical Fenchel-Legendre transform by golden-section search on the
/// concave objective u x - Lambda(u) over [a, b]. Endpoints are admissible.
LegendreResult fenchel_legendre(const std::function<double(double)>& limit_cgf, double a, double b, double x,
                                double tol = 1e-10);

/// Small-maturity implied volatility limit at log-strike x != 0:
///   d in (0, 1/2]:  Sigma^2 = eta;
///   d in [-1/2, 0): Sigma^2 = v0 t^d / Gamma(d+2).
SmilePoint smile_small_time(const ModelParams& p, double x, double t);

/// Large-maturity implied volatility.
///   d in (0, 1/2):  strike e^(x t^(1+d/2)),
///                   Sigma = sqrt(2) t^(d/4) (sqrt(L(x)) + sqrt(L(x) - x)), L = Lambda_+^*;
///   d in (-1/2, 0): strike e^(x t), Sigma^2 = eta, for x strictly inside
///                   (Lambda_-'(u_minus), Lambda_-'(u_plus)).
SmilePoint smile_large_time(const ModelParams& p, double x, double t, double u_minus, double u_plus);

enum class PayoffKind { put, call, covered_call };

/// Rate function of the rescaled log-price together with the minimisers
/// x* of L and x~* of L(x) - x. Infinite minimisers are allowed.
struct LargeTimeRate {
    std::function<double(double)> rate;
    double x_star = 0.0;
    double x_tilde_star = 0.0;
};

/// Rate data for the model's large-maturity regime: Lambda_+^* with
/// x* = -inf, x~* = +inf when d > 0; Lambda_-^* with x* = -eta/2,
/// x~* = eta/2 when d < 0 (the latter needs the moment interval).
LargeTimeRate large_time_rate(const ModelParams& p, const MomentDomain& domain = {});

/// lim f(t)^-1 log(price) for put, call, and covered call at log-strike x f(t).
double option_asymptote_large_time(double x, PayoffKind kind, const LargeTimeRate& rate);

}  // namespace fheston
