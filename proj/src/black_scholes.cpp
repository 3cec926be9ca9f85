#include <algorithm>
#include <cmath>
#include <numbers>

#include "fheston/pricing.hpp"

namespace fheston {

namespace {

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

double bs_call_price(double x, double t, double sigma) {
    if (!(t > 0.0)) throw Error(ErrorKind::OutOfRange, "t");
    if (sigma < 0.0) throw Error(ErrorKind::OutOfRange, "sigma");
    const double total = sigma * std::sqrt(t);
    if (total == 0.0) return std::max(1.0 - std::exp(x), 0.0);
    const double d1 = -x / total + 0.5 * total;
    const double d2 = d1 - total;
    return std_normal_cdf(d1) - std::exp(x) * std_normal_cdf(d2);
}

double bs_put_price(double x, double t, double sigma) {
    if (!(t > 0.0)) throw Error(ErrorKind::OutOfRange, "t");
    if (sigma < 0.0) throw Error(ErrorKind::OutOfRange, "sigma");
    const double total = sigma * std::sqrt(t);
    if (total == 0.0) return std::max(std::exp(x) - 1.0, 0.0);
    const double d1 = -x / total + 0.5 * total;
    const double d2 = d1 - total;
    return std::exp(x) * std_normal_cdf(-d2) - std_normal_cdf(-d1);
}

std::pair<double, double> price_bounds(double x, OptionKind kind) {
    const double strike = std::exp(x);
    if (kind == OptionKind::call) return {std::max(1.0 - strike, 0.0), 1.0};
    return {std::max(strike - 1.0, 0.0), strike};
}

double implied_vol(const OptionQuote& quote, OptionKind kind) {
    const double x = quote.log_strike;
    const double t = quote.maturity;
    if (!(t > 0.0)) throw Error(ErrorKind::OutOfRange, "t");
    if (!std::isfinite(quote.price)) throw Error(ErrorKind::NonFinite, "price");

    const auto [lower, upper] = price_bounds(x, kind);
    if (!(quote.price > lower && quote.price < upper)) throw Error(ErrorKind::NoSolution, "price outside no-arbitrage bounds");
    if (quote.price - lower < 1e-12 || upper - quote.price < 1e-12) throw Error(ErrorKind::NoSolution, "NearBound");

    // Work with the out-of-the-money side; the time value is the same.
    const double strike = std::exp(x);
    OptionKind side = kind;
    double target = quote.price;
    if (kind == OptionKind::call && x < 0.0) {
        side = OptionKind::put;
        target = quote.price - 1.0 + strike;
    } else if (kind == OptionKind::put && x > 0.0) {
        side = OptionKind::call;
        target = quote.price + 1.0 - strike;
    }
    const auto price = [&](double sigma) {
        return side == OptionKind::call ? bs_call_price(x, t, sigma) : bs_put_price(x, t, sigma);
    };

    const double sqrt_t = std::sqrt(t);
    double lo = 1e-9;
    double hi = 40.0 / sqrt_t;
    if (price(lo) >= target || price(hi) <= target) throw Error(ErrorKind::NoSolution, "price not bracketed");

    double sigma = std::clamp(std::sqrt(2.0 * std::abs(x)) / sqrt_t, 0.1 / sqrt_t, 0.5 * hi);
    for (int iter = 0; iter < 300; ++iter) {
        const double diff = price(sigma) - target;
        if (diff == 0.0) return sigma;
        (diff > 0.0 ? hi : lo) = sigma;
        const double total = sigma * sqrt_t;
        const double vega = normal_pdf(-x / total + 0.5 * total) * sqrt_t;
        if (vega > 0.0) {
            const double newton = sigma - diff / vega;
            if (std::abs(newton - sigma) < 1e-13 * std::max(1.0, sigma)) return newton;
            sigma = newton > lo && newton < hi ? newton : 0.5 * (lo + hi);
        } else {
            sigma = 0.5 * (lo + hi);
        }
        if (hi - lo < 1e-14 * std::max(1.0, hi)) return sigma;
    }
    return sigma;
}

double covered_call_value(double call_price) {
    if (call_price < 0.0 || call_price > 1.0) throw Error(ErrorKind::OutOfRange, "call_price");
    return 1.0 - call_price;
}

}  // namespace fheston
