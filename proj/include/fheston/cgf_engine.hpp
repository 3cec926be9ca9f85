#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "fheston/core_model.hpp"

namespace fheston {

using Complex = std::complex<double>;

/// Argument of m(u, w, t) = log E exp(u X_t + w V^d_t).
struct CgfQuery {
    Complex u;
    Complex w{0.0, 0.0};
    double t = 1.0;
};

/// |B| beyond this value is treated as moment explosion.
inline constexpr double kBlowUpThreshold = 1e8;

/// Trajectories of the Riccati pair (A, B) on the accepted solver nodes.
/// a[0] = b[0] = 0. When blow_up_time is set the arrays stop at the last
/// node before divergence.
struct RiccatiSolution {
    TimeGrid grid;
    std::vector<Complex> a;
    std::vector<Complex> b;
    std::optional<double> blow_up_time;
};

enum class CgfStatus { converged, blew_up, outside_domain };

struct CgfResult {
    Complex value;
    CgfStatus status = CgfStatus::converged;
};

/// Solves
///   B' = -kappa B - (xi^2/2) B^2 - u(u-1)/(2 Gamma(d+1)) s^d - w/Gamma(d) s^(d-1),
///   A' = -kappa theta B,            A(0) = B(0) = 0,
/// on [0, t]. The singular start is bridged with the leading terms of the
/// small-s expansion; the remainder uses an embedded Dormand-Prince 5(4)
/// pair with mixed absolute/relative error control at level tol.
///
/// A nonzero w needs an integrable kernel s^(d-1), so it is only accepted
/// for d > 0. Throws OutOfRange for t <= 0 or tol <= 0 and QuadratureFailure
/// when more than max_nodes steps are needed.
RiccatiSolution riccati_solve(const ModelParams& p, const CgfQuery& q, double tol = 1e-10,
                              std::size_t max_nodes = 1'000'000);

/// m(u, w, t) = w eta + u(u-1) eta t / 2 - B(t) v0 + A(t).
CgfResult cgf(const ModelParams& p, const CgfQuery& q, double tol = 1e-10);

/// exp(m(z, 0, t)). Throws Error{OutsideDomain} if the Riccati solution explodes.
Complex characteristic_fn(const ModelParams& p, Complex z, double t, double tol = 1e-10);

/// kappa = 0 power series B(t) = sum_i alpha_i zeta^i t^(i(d+2)-1).
struct SeriesCoefficients {
    std::vector<double> alpha;  // alpha[0] holds alpha_1
    double zeta = 0.0;          // u(1-u) / (2 Gamma(d+2))
};

SeriesCoefficients series_coefficients(const ModelParams& p, double u, std::size_t n_terms);

/// Partial sum of the kappa = 0 series. Requires kappa = 0 and
/// |zeta t^(d+2)| < 1/4; throws OutOfRange otherwise.
double series_B_kappa0(const ModelParams& p, double u, double t, std::size_t n_terms = 60);

/// Closed form m(u, t) for kappa = 0, d = 0, eta = 0:
/// (v0/xi) sqrt(u(u-1)) tan(xi t sqrt(u(u-1)) / 2), continued through tanh for
/// u in (0, 1). Throws PoleProximity within 1e-6 of the first tan pole.
double heston_tan_mgf(double v0, double xi, double u, double t);

/// Leading terms of m(u, t) as t -> 0. order 1:
///   u(u-1) eta t / 2 + v0 u(u-1) t^(d+1) / (2 Gamma(d+2));
/// order 2 adds kappa (theta - v0) u(u-1) t^(d+2) / (2 Gamma(d+3)).
double small_time_expansion(const ModelParams& p, double u, double t, int order);

struct PsiBounds {
    double minus = 0.0;
    double plus = 0.0;
};

/// -kappa/xi^2 -/+ (1/xi) sqrt(kappa^2/xi^2 + u(1-u) t^d / Gamma(d+1)).
/// B(t) lies between the two for u in [0, 1] when d > 0.
PsiBounds bounds_psi(const ModelParams& p, double u, double t);

struct MomentDomain {
    double u_minus = 0.0;
    double u_plus = 1.0;
};

/// Bisection estimate of the moment interval [u-, u+] for d < 0: u belongs
/// to it when the Riccati solution does not explode before t_horizon. Each
/// endpoint is bracketed to width tol.
MomentDomain moment_domain_estimate(const ModelParams& p, double t_horizon = 200.0, double tol = 1e-4);

/// E V^d_t = eta + I^d E V_t, with E V_t = theta + (v0 - theta) e^(-kappa t).
double mean_Vd(const ModelParams& p, double t);

/// t^delta m(u / t^delta, t) with delta = 1 for d >= 0 and 1 + d for d < 0.
double scaled_small_time_cgf(const ModelParams& p, double u, double t, double tol = 1e-11);

/// Limit of scaled_small_time_cgf as t -> 0:
/// v0 u^2 / (2 Gamma(2+d)) for d < 0, eta u^2 / 2 for d > 0, (eta + v0) u^2 / 2 for d = 0.
double small_time_cgf_limit(const ModelParams& p, double u);

/// t^(-(1 + d/2)) m(u, t) for d > 0 and t^(-1) m(u, t) for d < 0.
/// Requires 0 < |d| < 1/2.
double scaled_large_time_cgf(const ModelParams& p, double u, double t, double tol = 1e-11);

}  // namespace fheston
