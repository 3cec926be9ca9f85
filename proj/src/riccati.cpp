#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "riccati_detail.hpp"

namespace fheston::detail {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b* (difference between the fifth and fourth order weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct State {
    Complex b;
    Complex a;
};

class RiccatiRhs {
public:
    RiccatiRhs(const ModelParams& p, const CgfQuery& q)
        : kappa_(p.kappa()), kappa_theta_(p.kappa() * p.theta()), half_xi2_(0.5 * p.xi() * p.xi()), d_(p.d()),
          u_forcing_(q.u * (q.u - 1.0) * (0.5 * reciprocal_gamma(p.d() + 1.0))),
          w_forcing_(q.w * reciprocal_gamma(p.d())) {}

    State operator()(double s, const State& y) const {
        const double sd = std::pow(s, d_);
        Complex db = -kappa_ * y.b - half_xi2_ * y.b * y.b - u_forcing_ * sd;
        if (w_forcing_ != Complex{}) db -= w_forcing_ * (sd / s);
        return {db, -kappa_theta_ * y.b};
    }

    double kappa() const { return kappa_; }
    double kappa_theta() const { return kappa_theta_; }
    double half_xi2() const { return half_xi2_; }
    Complex u_forcing() const { return u_forcing_; }
    Complex w_forcing() const { return w_forcing_; }

private:
    double kappa_;
    double kappa_theta_;
    double half_xi2_;
    double d_;
    Complex u_forcing_;
    Complex w_forcing_;
};

// Two-term expansion of (B, A) near s = 0:
//   B ~ c s^(d+1) + e s^d - kappa(...) - (xi^2/2)(...),  with
//   c = -u(u-1)/(2 Gamma(d+2)),  e = -w/Gamma(d+1).
State startup_expansion(const RiccatiRhs& rhs, double d, double s) {
    const Complex c = -rhs.u_forcing() / (d + 1.0);
    const Complex e = d > 0.0 ? -rhs.w_forcing() / d : Complex{};
    const double k = rhs.kappa();
    const double h = rhs.half_xi2();

    // B = sum of coefficient * s^power; A integrates each term.
    struct Term {
        Complex coeff;
        double power;
    };
    const std::array<Term, 7> terms{{
        {c, d + 1.0},
        {e, d},
        {-k * c / (d + 2.0), d + 2.0},
        {-k * e / (d + 1.0), d + 1.0},
        {-h * c * c / (2.0 * d + 3.0), 2.0 * d + 3.0},
        {-h * 2.0 * c * e / (2.0 * d + 2.0), 2.0 * d + 2.0},
        {e == Complex{} ? Complex{} : -h * e * e / (2.0 * d + 1.0), 2.0 * d + 1.0},
    }};

    State y{};
    for (const auto& term : terms) {
        if (term.coeff == Complex{}) continue;
        const double sp = std::pow(s, term.power);
        y.b += term.coeff * sp;
        y.a += -rhs.kappa_theta() * term.coeff * (sp * s / (term.power + 1.0));
    }
    return y;
}

// Largest s0 for which the neglected third-order startup terms stay below
// roughly tol relative to the leading term.
double startup_length(const RiccatiRhs& rhs, double d, double t, double tol) {
    const double eps = 0.1 * std::sqrt(tol);
    double s0 = std::min(t, 1e-3 * std::max(t, 1.0));
    if (rhs.kappa() > 0.0) s0 = std::min(s0, eps / rhs.kappa());
    const double xi2 = 2.0 * rhs.half_xi2();
    if (xi2 > 0.0) {
        const double c = std::abs(rhs.u_forcing()) / (d + 1.0);
        if (c > 0.0) s0 = std::min(s0, std::pow(eps / (xi2 * c), 1.0 / (d + 2.0)));
        if (d > 0.0) {
            const double e = std::abs(rhs.w_forcing()) / d;
            if (e > 0.0) s0 = std::min(s0, std::pow(eps / (xi2 * e), 1.0 / (d + 1.0)));
        }
    }
    return s0;
}

double error_ratio(const State& err, const State& y0, const State& y1, double tol) {
    const double atol = 1e-3 * tol;
    const double sb = atol + tol * std::max(std::abs(y0.b), std::abs(y1.b));
    const double sa = atol + tol * std::max(std::abs(y0.a), std::abs(y1.a));
    return std::max(std::abs(err.b) / sb, std::abs(err.a) / sa);
}

State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> ks) {
    State out = y;
    for (const auto& [coef, k] : ks) {
        out.b += (h * coef) * k->b;
        out.a += (h * coef) * k->a;
    }
    return out;
}

}  // namespace

RiccatiEndpoint integrate_riccati(const ModelParams& p, const CgfQuery& q, double tol, std::size_t max_nodes,
                                  const RiccatiObserver& observer) {
    if (!(q.t > 0.0) || !std::isfinite(q.t)) throw Error(ErrorKind::OutOfRange, "t");
    if (!(tol > 0.0)) throw Error(ErrorKind::OutOfRange, "tol");
    if (!std::isfinite(q.u.real()) || !std::isfinite(q.u.imag())) throw Error(ErrorKind::NonFinite, "u");
    if (!std::isfinite(q.w.real()) || !std::isfinite(q.w.imag())) throw Error(ErrorKind::NonFinite, "w");
    if (q.w != Complex{} && !(p.d() > 0.0)) throw Error(ErrorKind::OutOfRange, "w (requires d > 0)");

    const RiccatiRhs rhs(p, q);
    const double d = p.d();
    const double t = q.t;

    RiccatiEndpoint out;
    if (observer) observer(0.0, {}, {});

    // Zero forcing: B and A stay at zero.
    if (rhs.u_forcing() == Complex{} && rhs.w_forcing() == Complex{}) {
        if (observer) observer(t, {}, {});
        out.time = t;
        return out;
    }

    double s = startup_length(rhs, d, t, tol);
    State y = startup_expansion(rhs, d, s);
    if (observer) observer(s, y.a, y.b);
    std::size_t nodes = 2;

    double h = std::min(s, t - s);
    State k1 = rhs(s, y);
    while (s < t) {
        if (nodes > max_nodes) throw Error(ErrorKind::QuadratureFailure, "riccati_solve exceeded max_nodes");
        bool last = false;
        if (s + h >= t || t - (s + h) < 1e-12 * t) {
            h = t - s;
            last = true;
        }

        const State k2 = rhs(s + c2 * h, axpy(y, h, {{a21, &k1}}));
        const State k3 = rhs(s + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
        const State k4 = rhs(s + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const State k5 = rhs(s + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const double s_next = last ? t : s + h;
        const State k6 = rhs(s_next, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const State y_next = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const State k7 = rhs(s_next, y_next);
        const State err = axpy(State{}, h, {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});

        const bool finite = std::isfinite(std::abs(y_next.b)) && std::isfinite(std::abs(y_next.a));
        const double ratio = finite ? error_ratio(err, y, y_next, tol) : HUGE_VAL;

        if (ratio <= 1.0) {
            if (std::abs(y_next.b) > kBlowUpThreshold) {
                out.time = s;
                out.a = y.a;
                out.b = y.b;
                out.blow_up_time = s_next;
                return out;
            }
            s = s_next;
            y = y_next;
            k1 = k7;
            ++nodes;
            if (observer) observer(s, y.a, y.b);
            const double grow = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
            h *= grow;
        } else {
            h *= std::clamp(0.9 * std::pow(ratio, -0.25), 0.1, 0.5);
        }

        if (s < t && h <= 1e-14 * std::max(s, 1e-300)) {
            // The step size collapsed: a pole is being approached.
            if (std::abs(y.b) > 1e3) {
                out.time = s;
                out.a = y.a;
                out.b = y.b;
                out.blow_up_time = s;
                return out;
            }
            throw Error(ErrorKind::QuadratureFailure, "riccati_solve step size underflow at s=" + std::to_string(s));
        }
    }

    out.time = t;
    out.a = y.a;
    out.b = y.b;
    return out;
}

}  // namespace fheston::detail
