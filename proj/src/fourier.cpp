#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "fheston/pricing.hpp"

namespace fheston {

namespace {

// Gauss-Kronrod 7-15 abscissae and weights on [-1, 1] (non-negative half).
constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
// Gauss weights for kXgk[1], kXgk[3], kXgk[5], kXgk[7].
constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

struct Estimate {
    double value;
    double error;
};

template <class F>
Estimate gauss_kronrod(F&& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = kWgk[7] * fc;
    double gauss = kWg[3] * fc;
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * sum;
        if (j % 2 == 1) gauss += kWg[j / 2] * sum;
    }
    return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

template <class F>
double adaptive(F&& f, double a, double b, double tol, int depth) {
    const Estimate est = gauss_kronrod(f, a, b);
    if (est.error <= tol || est.error <= 1e-14 * std::abs(est.value)) return est.value;
    if (depth > 40) throw Error(ErrorKind::QuadratureFailure, "fourier quadrature did not converge");
    const double mid = 0.5 * (a + b);
    return adaptive(f, a, mid, 0.5 * tol, depth + 1) + adaptive(f, mid, b, 0.5 * tol, depth + 1);
}

}  // namespace

FourierPricer::FourierPricer(const ModelParams& p, double t, FourierOptions opts)
    : params_(p), t_(t), opts_(opts) {
    if (!(t > 0.0)) throw Error(ErrorKind::OutOfRange, "t");
    if (!(opts.damping > 0.0 && opts.damping < 1.0)) throw Error(ErrorKind::OutOfRange, "damping");
    if (!(opts.quad_tol > 0.0)) throw Error(ErrorKind::OutOfRange, "quad_tol");
}

Complex FourierPricer::transform(double v) {
    if (auto it = cache_.find(v); it != cache_.end()) return it->second;
    const Complex z{opts_.damping, v};
    const CgfResult r = cgf(params_, CgfQuery{z, {}, t_}, opts_.ode_tol);
    if (r.status != CgfStatus::converged) {
        throw Error(ErrorKind::OutsideDomain, "fourier transform at v=" + std::to_string(v));
    }
    const Complex value = std::exp(r.value);
    cache_.emplace(v, value);
    return value;
}

double FourierPricer::expected_min(double x) {
    const double a = opts_.damping;
    const double prefactor = std::exp((1.0 - a) * x) / std::numbers::pi;
    const double tol = opts_.quad_tol / prefactor;

    const auto integrand = [&](double v) {
        const Complex z{a, v};
        const Complex phase = std::exp(Complex{0.0, -v * x});
        return (transform(v) * phase / (z * (1.0 - z))).real();
    };

    // Panel length from a rough total-variance scale.
    const double d = params_.d();
    const double rough_variance = params_.eta() * t_ +
                                  std::max(params_.v0(), params_.theta()) * std::pow(t_, d + 1.0) / gamma_fn(d + 2.0);
    double panel = std::max(1.0, 4.0 / std::sqrt(std::max(rough_variance, 1e-12)));

    double total = adaptive(integrand, 0.0, panel, 0.25 * tol, 0);
    double lo = panel;
    for (int k = 0; k < 60; ++k) {
        const double hi = 2.0 * lo;
        const double piece = adaptive(integrand, lo, hi, 0.25 * tol, 0);
        total += piece;
        // |integrand| <= |T(v)| / v^2, so the tail beyond hi is at most ~|T(hi)|/hi.
        const double tail = std::abs(transform(hi)) / hi;
        if (std::abs(piece) < 0.25 * tol && tail < 0.25 * tol) return prefactor * total;
        lo = hi;
    }
    throw Error(ErrorKind::QuadratureFailure, "fourier truncation did not converge");
}

double FourierPricer::call_price(double x) {
    const double price = 1.0 - expected_min(x);
    const auto [lower, upper] = price_bounds(x, OptionKind::call);
    return std::clamp(price, lower, upper);
}

double FourierPricer::put_price(double x) {
    const double price = std::exp(x) - expected_min(x);
    const auto [lower, upper] = price_bounds(x, OptionKind::put);
    return std::clamp(price, lower, upper);
}

double FourierPricer::implied_vol(double x) {
    if (x < 0.0) return fheston::implied_vol(OptionQuote{x, t_, put_price(x)}, OptionKind::put);
    return fheston::implied_vol(OptionQuote{x, t_, call_price(x)}, OptionKind::call);
}

double fourier_call_price(const ModelParams& p, double x, double t, FourierOptions opts) {
    FourierPricer pricer(p, t, opts);
    return pricer.call_price(x);
}

}  // namespace fheston
