#include "fheston/asymptotics.hpp"

#include <cmath>
#include <limits>

namespace fheston {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// kappa theta / (xi sqrt(Gamma(1+d))), the scale of Lambda_+.
double plus_scale(const ModelParams& p) {
    if (p.xi() == 0.0) throw Error(ErrorKind::OutOfRange, "xi");
    const double kt = p.kappa() * p.theta();
    if (kt == 0.0) throw Error(ErrorKind::OutOfRange, "kappa*theta");
    return kt / (p.xi() * std::sqrt(gamma_fn(1.0 + p.d())));
}

}  // namespace

double u_of_x(double x, const ModelParams& p) {
    if (!(p.d() > 0.0 && p.d() < 0.5)) throw Error(ErrorKind::OutOfRange, "d");
    const double ratio = x / plus_scale(p);
    const double sgn = x >= 0.0 ? 1.0 : -1.0;
    return 0.5 * (1.0 + sgn * std::sqrt(1.0 - 1.0 / (1.0 + ratio * ratio)));
}

double lambda_plus(double u, const ModelParams& p) {
    if (u < 0.0 || u > 1.0) throw Error(ErrorKind::OutOfRange, "u");
    if (p.xi() == 0.0) throw Error(ErrorKind::OutOfRange, "xi");
    return -p.kappa() * p.theta() / p.xi() * std::sqrt(u * (1.0 - u) / gamma_fn(1.0 + p.d()));
}

double lambda_minus(double u, double eta) { return 0.5 * u * (u - 1.0) * eta; }

double lambda_minus_slope(double u, double eta) { return (u - 0.5) * eta; }

double rate_plus_star(double x, const ModelParams& p) {
    const double u = u_of_x(x, p);
    return u * x + plus_scale(p) * std::sqrt(u * (1.0 - u));
}

RateFunctionEval rate_minus_star(double x, double eta, double u_minus, double u_plus) {
    if (!(eta > 0.0)) throw Error(ErrorKind::OutOfRange, "eta");
    if (u_minus > 0.0 || u_plus < 1.0) throw Error(ErrorKind::OutOfRange, "moment interval");
    const double left = lambda_minus_slope(u_minus, eta);
    const double right = lambda_minus_slope(u_plus, eta);
    if (x > right) return {x, u_plus * x - lambda_minus(u_plus, eta), RateBranch::linear_right};
    if (x < left) return {x, u_minus * x - lambda_minus(u_minus, eta), RateBranch::linear_left};
    const double shifted = x + 0.5 * eta;
    return {x, shifted * shifted / (2.0 * eta), RateBranch::interior};
}

double small_rate_plus(double x, double eta) {
    if (!(eta > 0.0)) throw Error(ErrorKind::OutOfRange, "eta");
    return x * x / (2.0 * eta);
}

double small_rate_minus(double x, double v0, double d) {
    if (!(v0 > 0.0)) throw Error(ErrorKind::OutOfRange, "v0");
    return gamma_fn(2.0 + d) * x * x / (2.0 * v0);
}

LegendreResult fenchel_legendre(const std::function<double(double)>& limit_cgf, double a, double b, double x,
                                double tol) {
    if (!(a <= b)) throw Error(ErrorKind::OutOfRange, "interval");
    if (!(tol > 0.0)) throw Error(ErrorKind::OutOfRange, "tol");
    const auto objective = [&](double u) { return u * x - limit_cgf(u); };

    LegendreResult out;
    {
        const double m = 0.5 * (a + b);
        const double fa = limit_cgf(a), fm = limit_cgf(m), fb = limit_cgf(b);
        out.nonconvex_detected = fm > 0.5 * (fa + fb) + 1e-12 * (std::abs(fa) + std::abs(fb) + 1.0);
    }

    constexpr double inv_phi = 0.6180339887498948482;
    const double floor = std::max(tol, 1e-10) * std::max(1.0, b - a);
    double lo = a, hi = b;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = objective(c), fd = objective(d);
    while (hi - lo > floor) {
        if (fc < fd) {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = objective(d);
        } else {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = objective(c);
        }
    }
    out.argmax = 0.5 * (lo + hi);
    out.value = objective(out.argmax);
    for (const double end : {a, b}) {
        const double fe = objective(end);
        if (fe > out.value) {
            out.value = fe;
            out.argmax = end;
        }
    }
    return out;
}

SmilePoint smile_small_time(const ModelParams& p, double x, double t) {
    if (!(t > 0.0)) throw Error(ErrorKind::OutOfRange, "t");
    if (x == 0.0) throw Error(ErrorKind::OutOfRange, "x");
    const double d = p.d();
    double variance = 0.0;
    if (d > 0.0) {
        if (p.eta() == 0.0) throw Error(ErrorKind::OutOfRange, "eta");
        variance = p.eta();
    } else if (d < 0.0) {
        variance = p.v0() * std::pow(t, d) / gamma_fn(d + 2.0);
    } else {
        throw Error(ErrorKind::OutOfRange, "d");
    }
    return {x, t, std::sqrt(variance), SmileSource::asymptotic};
}

SmilePoint smile_large_time(const ModelParams& p, double x, double t, double u_minus, double u_plus) {
    if (!(t > 0.0)) throw Error(ErrorKind::OutOfRange, "t");
    const double d = p.d();
    if (d > 0.0 && d < 0.5) {
        const double rate = rate_plus_star(x, p);
        const double vol = std::sqrt(2.0) * std::pow(t, 0.25 * d) *
                           (std::sqrt(rate) + std::sqrt(std::max(rate - x, 0.0)));
        return {x * std::pow(t, 1.0 + 0.5 * d), t, vol, SmileSource::asymptotic};
    }
    if (d < 0.0 && d > -0.5) {
        const double eta = p.eta();
        if (!(eta > 0.0)) throw Error(ErrorKind::OutOfRange, "eta");
        if (!(x > lambda_minus_slope(u_minus, eta) && x < lambda_minus_slope(u_plus, eta))) {
            throw Error(ErrorKind::OutOfRange, "x");
        }
        return {x * t, t, std::sqrt(eta), SmileSource::asymptotic};
    }
    throw Error(ErrorKind::OutOfRange, "d");
}

LargeTimeRate large_time_rate(const ModelParams& p, const MomentDomain& domain) {
    const double d = p.d();
    if (d > 0.0 && d < 0.5) {
        return {[p](double x) { return rate_plus_star(x, p); }, -kInf, kInf};
    }
    if (d < 0.0 && d > -0.5) {
        const double eta = p.eta();
        return {[=](double x) { return rate_minus_star(x, eta, domain.u_minus, domain.u_plus).value; },
                lambda_minus_slope(0.0, eta), lambda_minus_slope(1.0, eta)};
    }
    throw Error(ErrorKind::OutOfRange, "d");
}

double option_asymptote_large_time(double x, PayoffKind kind, const LargeTimeRate& rate) {
    switch (kind) {
        case PayoffKind::put:
            return x <= rate.x_star ? x - rate.rate(x) : x;
        case PayoffKind::call:
            return x >= rate.x_tilde_star ? -(rate.rate(x) - x) : 0.0;
        case PayoffKind::covered_call:
            if (x > rate.x_tilde_star) return 0.0;
            if (x < rate.x_star) return x;
            return x - rate.rate(x);
    }
    return 0.0;
}

}  // namespace fheston
