#pragma once

#include <complex>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "fheston/cgf_engine.hpp"
#include "fheston/core_model.hpp"

namespace fheston {

enum class OptionKind { call, put };
enum class SmileSource { fourier, mc, asymptotic };

constexpr std::string_view to_string(SmileSource s) {
    switch (s) {
        case SmileSource::fourier: return "fourier";
        case SmileSource::mc: return "mc";
        case SmileSource::asymptotic: return "asymptotic";
    }
    return "unknown";
}

/// European option on unit spot with strike e^log_strike, zero rates.
struct OptionQuote {
    double log_strike = 0.0;
    double maturity = 1.0;
    double price = 0.0;
};

struct SmilePoint {
    double log_strike = 0.0;
    double maturity = 1.0;
    double implied_vol = 0.0;
    SmileSource source = SmileSource::fourier;
};

// Black-Scholes on unit spot, zero rates.
double bs_call_price(double x, double t, double sigma);
double bs_put_price(double x, double t, double sigma);

/// Static no-arbitrage interval for a price quote: call in
/// [max(1 - e^x, 0), 1], put in [max(e^x - 1, 0), e^x].
std::pair<double, double> price_bounds(double x, OptionKind kind);

/// Inverts the Black-Scholes price to |dsigma| <= 1e-10. Newton steps are
/// safeguarded by a bisection bracket on [1e-9, 40/sqrt(t)]. Throws
/// Error{NoSolution} when the price is not strictly inside the
/// no-arbitrage interval (or within 1e-12 of an end).
double implied_vol(const OptionQuote& quote, OptionKind kind);

struct FourierOptions {
    double damping = 0.5;    // Re z of the inversion contour, in (0, 1)
    double quad_tol = 1e-10; // absolute tolerance on E min(e^X, e^x)
    double ode_tol = 1e-11;
};

/// Prices calls by inverting the characteristic function along
/// Re z = damping:
///   E min(e^X, e^x) = e^((1-a)x)/pi int_0^inf Re[exp(m(a+iv)) e^(-ivx) / ((a+iv)(1-a-iv))] dv,
///   call = 1 - E min(e^X, e^x).
/// Holds a cache of exp(m(z, t)) keyed by v, so a strike ladder at one
/// maturity reuses Riccati solves. Not thread-safe; use one pricer per thread.
class FourierPricer {
public:
    FourierPricer(const ModelParams& p, double t, FourierOptions opts = {});

    double call_price(double x);
    double put_price(double x);
    /// Implied volatility of the out-of-the-money option (put for x < 0).
    double implied_vol(double x);

    std::size_t cached_nodes() const noexcept { return cache_.size(); }

private:
    double expected_min(double x);
    Complex transform(double v);

    ModelParams params_;
    double t_;
    FourierOptions opts_;
    std::map<double, Complex> cache_;
};

double fourier_call_price(const ModelParams& p, double x, double t, FourierOptions opts = {});

/// 1 - call_price; the value of holding the stock and being short the call.
double covered_call_value(double call_price);

}  // namespace fheston
