#include "fheston/cgf_engine.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "numerics_detail.hpp"
#include "riccati_detail.hpp"

namespace fheston {

namespace detail {

// e^{-kappa t} sum_n kappa^n t^(d+n+1) / (n! (d+n+1)), summed in log space.
double kernel_exp_integral(double d, double kappa, double t) {
    if (t <= 0.0) return 0.0;
    if (kappa == 0.0) return std::pow(t, d + 1.0) / (d + 1.0);
    const double log_kt = std::log(kappa * t);
    const double log_scale = (d + 1.0) * std::log(t) - kappa * t;
    double sum = 0.0;
    for (int n = 0; n < 1'000'000; ++n) {
        const double log_term = log_scale + n * log_kt - std::lgamma(n + 1.0);
        const double term = std::exp(log_term) / (d + n + 1.0);
        sum += term;
        if (n > kappa * t && term < 1e-17 * sum) break;
    }
    return sum;
}

}  // namespace detail

RiccatiSolution riccati_solve(const ModelParams& p, const CgfQuery& q, double tol, std::size_t max_nodes) {
    std::vector<double> nodes;
    std::vector<Complex> a;
    std::vector<Complex> b;
    const auto end = detail::integrate_riccati(p, q, tol, max_nodes, [&](double s, Complex as, Complex bs) {
        nodes.push_back(s);
        a.push_back(as);
        b.push_back(bs);
    });
    return RiccatiSolution{TimeGrid::from_nodes(std::move(nodes)), std::move(a), std::move(b), end.blow_up_time};
}

CgfResult cgf(const ModelParams& p, const CgfQuery& q, double tol) {
    const auto end = detail::integrate_riccati(p, q, tol, 1'000'000, {});
    if (end.blow_up_time) {
        return {Complex{std::numeric_limits<double>::quiet_NaN(), 0.0}, CgfStatus::blew_up};
    }
    const Complex value =
        q.w * p.eta() + q.u * (q.u - 1.0) * (0.5 * p.eta() * q.t) - end.b * p.v0() + end.a;
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
        return {Complex{std::numeric_limits<double>::quiet_NaN(), 0.0}, CgfStatus::outside_domain};
    }
    return {value, CgfStatus::converged};
}

Complex characteristic_fn(const ModelParams& p, Complex z, double t, double tol) {
    const CgfResult r = cgf(p, CgfQuery{z, {}, t}, tol);
    if (r.status != CgfStatus::converged) throw Error(ErrorKind::OutsideDomain, "characteristic_fn");
    return std::exp(r.value);
}

SeriesCoefficients series_coefficients(const ModelParams& p, double u, std::size_t n_terms) {
    SeriesCoefficients out;
    const double d = p.d();
    out.zeta = u * (1.0 - u) / (2.0 * gamma_fn(d + 2.0));
    out.alpha.assign(n_terms, 0.0);
    if (n_terms == 0) return out;
    out.alpha[0] = 1.0;
    const double xi2 = p.xi() * p.xi();
    for (std::size_t i = 2; i <= n_terms; ++i) {
        double conv = 0.0;
        for (std::size_t k = 1; k < i; ++k) conv += out.alpha[k - 1] * out.alpha[i - k - 1];
        out.alpha[i - 1] = -xi2 / (2.0 * (static_cast<double>(i) * (d + 2.0) - 1.0)) * conv;
    }
    return out;
}

double series_B_kappa0(const ModelParams& p, double u, double t, std::size_t n_terms) {
    if (p.kappa() != 0.0) throw Error(ErrorKind::OutOfRange, "kappa (series requires kappa = 0)");
    if (!(t > 0.0)) throw Error(ErrorKind::OutOfRange, "t");
    const auto coeffs = series_coefficients(p, u, n_terms);
    const double x = coeffs.zeta * std::pow(t, p.d() + 2.0);
    if (!(std::abs(x) < 0.25)) throw Error(ErrorKind::OutOfRange, "|zeta t^(d+2)| >= 1/4");

    // Horner in x: sum_i alpha_i x^i.
    double sum = 0.0;
    for (std::size_t i = coeffs.alpha.size(); i-- > 0;) sum = (sum + coeffs.alpha[i]) * x;
    return sum / t;
}

double heston_tan_mgf(double v0, double xi, double u, double t) {
    const double a = u * (u - 1.0);
    if (a == 0.0) return 0.0;
    if (xi == 0.0) return 0.5 * v0 * a * t;
    if (a > 0.0) {
        const double root = std::sqrt(a);
        const double arg = 0.5 * xi * t * root;
        if (arg >= 0.5 * std::numbers::pi - 1e-6) throw Error(ErrorKind::PoleProximity, "heston_tan_mgf");
        return v0 / xi * root * std::tan(arg);
    }
    const double root = std::sqrt(-a);
    return -v0 / xi * root * std::tanh(0.5 * xi * t * root);
}

double small_time_expansion(const ModelParams& p, double u, double t, int order) {
    if (order != 1 && order != 2) throw Error(ErrorKind::OutOfRange, "order");
    const double d = p.d();
    const double uu = u * (u - 1.0);
    double m = 0.5 * uu * p.eta() * t + p.v0() * uu * std::pow(t, d + 1.0) / (2.0 * gamma_fn(d + 2.0));
    if (order == 2) {
        m += p.kappa() * (p.theta() - p.v0()) * uu * std::pow(t, d + 2.0) / (2.0 * gamma_fn(d + 3.0));
    }
    return m;
}

PsiBounds bounds_psi(const ModelParams& p, double u, double t) {
    if (p.xi() == 0.0) throw Error(ErrorKind::OutOfRange, "xi");
    if (u < 0.0 || u > 1.0) throw Error(ErrorKind::OutOfRange, "u");
    if (t < 0.0) throw Error(ErrorKind::OutOfRange, "t");
    const double xi = p.xi();
    const double shift = -p.kappa() / (xi * xi);
    const double k_over_xi = p.kappa() / xi;
    const double radicand = k_over_xi * k_over_xi + u * (1.0 - u) * std::pow(t, p.d()) * reciprocal_gamma(p.d() + 1.0);
    const double half_width = std::sqrt(radicand) / xi;
    return {shift - half_width, shift + half_width};
}

MomentDomain moment_domain_estimate(const ModelParams& p, double t_horizon, double tol) {
    if (!(p.d() < 0.0)) throw Error(ErrorKind::OutOfRange, "d (moment domain estimate requires d < 0)");
    if (!(t_horizon > 0.0)) throw Error(ErrorKind::OutOfRange, "t_horizon");
    if (!(tol > 0.0)) throw Error(ErrorKind::OutOfRange, "tol");

    const auto explodes = [&](double u) {
        return detail::integrate_riccati(p, CgfQuery{u, {}, t_horizon}, 1e-9, 1'000'000, {}).blow_up_time.has_value();
    };

    // inside: known finite; outside: known to explode. Returns the inside end.
    const auto bisect = [&](double inside, double step) {
        if (explodes(inside + step * tol)) throw Error(ErrorKind::HorizonTooShort, "moment_domain_estimate");
        double outside = inside + step;
        for (int i = 0; !explodes(outside); ++i) {
            if (i > 40) throw Error(ErrorKind::HorizonTooShort, "moment_domain_estimate: no explosion found");
            inside = outside;
            outside = inside + step * std::pow(2.0, i + 1);
        }
        while (std::abs(outside - inside) > tol) {
            const double mid = 0.5 * (inside + outside);
            (explodes(mid) ? outside : inside) = mid;
        }
        return inside;
    };

    return {bisect(0.0, -1.0), bisect(1.0, 1.0)};
}

double mean_Vd(const ModelParams& p, double t) {
    if (t < 0.0) throw Error(ErrorKind::OutOfRange, "t");
    const double d = p.d();
    const double inv_gamma = reciprocal_gamma(d + 1.0);
    // I^d f(t) = f(0) t^d / Gamma(d+1) + int_0^t (t-s)^d / Gamma(d+1) f'(s) ds
    const double boundary = p.v0() * std::pow(t, d) * inv_gamma;
    const double slope = -p.kappa() * (p.v0() - p.theta());
    const double interior = slope == 0.0 ? 0.0 : slope * inv_gamma * detail::kernel_exp_integral(d, p.kappa(), t);
    return p.eta() + boundary + interior;
}

double scaled_small_time_cgf(const ModelParams& p, double u, double t, double tol) {
    const double delta = p.d() < 0.0 ? 1.0 + p.d() : 1.0;
    const double scale = std::pow(t, delta);
    const CgfResult r = cgf(p, CgfQuery{u / scale, {}, t}, tol);
    if (r.status != CgfStatus::converged) throw Error(ErrorKind::OutsideDomain, "scaled_small_time_cgf");
    return scale * r.value.real();
}

double small_time_cgf_limit(const ModelParams& p, double u) {
    const double half_u2 = 0.5 * u * u;
    if (p.d() < 0.0) return p.v0() * half_u2 / gamma_fn(2.0 + p.d());
    if (p.d() > 0.0) return p.eta() * half_u2;
    return (p.eta() + p.v0()) * half_u2;
}

double scaled_large_time_cgf(const ModelParams& p, double u, double t, double tol) {
    const double d = p.d();
    if (d == 0.0 || std::abs(d) >= 0.5) throw Error(ErrorKind::OutOfRange, "d");
    const double speed = d > 0.0 ? std::pow(t, 1.0 + 0.5 * d) : t;
    const CgfResult r = cgf(p, CgfQuery{u, {}, t}, tol);
    if (r.status != CgfStatus::converged) throw Error(ErrorKind::OutsideDomain, "scaled_large_time_cgf");
    return r.value.real() / speed;
}

}  // namespace fheston
