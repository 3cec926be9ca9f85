#include <doctest.h>

#include <cmath>
#include <random>

#include "fheston/error.hpp"
#include "fheston/pricing.hpp"

using namespace fheston;

namespace {

ModelParams params(double kappa, double theta, double xi, double v0, double eta, double d) {
    return validate_params(RawParams{kappa, theta, xi, v0, eta, d});
}

}  // namespace

TEST_CASE("Black-Scholes against high-precision values") {
    // mpmath, 30 digits; unit spot, strike e^x
    CHECK(bs_call_price(0.0, 1.0, 0.2) == doctest::Approx(0.079655674554057967338).epsilon(1e-14));
    CHECK(bs_put_price(0.0, 1.0, 0.2) == doctest::Approx(0.079655674554057967338).epsilon(1e-14));
    CHECK(bs_call_price(0.1, 0.5, 0.3) == doctest::Approx(0.04598024982186467745).epsilon(1e-13));
    CHECK(bs_put_price(0.1, 0.5, 0.3) == doctest::Approx(0.1511511678975123084).epsilon(1e-13));
    CHECK(bs_call_price(-0.2, 2.0, 0.15) == doctest::Approx(0.19901802963989210533).epsilon(1e-13));
    CHECK(bs_put_price(-0.2, 2.0, 0.15) == doctest::Approx(0.017748782717873954906).epsilon(1e-12));
}

TEST_CASE("Black-Scholes with zero volatility is intrinsic value") {
    CHECK(bs_call_price(-0.1, 1.0, 0.0) == doctest::Approx(1.0 - std::exp(-0.1)));
    CHECK(bs_call_price(0.1, 1.0, 0.0) == 0.0);
    CHECK(bs_put_price(0.1, 1.0, 0.0) == doctest::Approx(std::exp(0.1) - 1.0));
}

TEST_CASE("put-call parity and implied-vol round trip") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> xs(-0.5, 0.5), ts(0.01, 5.0), vols(0.05, 1.0);
    for (int i = 0; i < 300; ++i) {
        const double x = xs(rng), t = ts(rng), vol = vols(rng);
        const double call = bs_call_price(x, t, vol);
        CHECK(call - bs_put_price(x, t, vol) == doctest::Approx(1.0 - std::exp(x)).epsilon(1e-12));
        const auto [lo, hi] = price_bounds(x, OptionKind::call);
        if (call - lo < 1e-10 || hi - call < 1e-10) continue;
        CHECK(implied_vol(OptionQuote{x, t, call}, OptionKind::call) == doctest::Approx(vol).epsilon(1e-8));
    }
}

TEST_CASE("implied_vol at the money, including the solver's starting point") {
    for (double vol : {0.1, 0.2, 0.3, 1.5}) {
        CHECK(implied_vol(OptionQuote{0.0, 1.0, bs_call_price(0.0, 1.0, vol)}, OptionKind::call) ==
              doctest::Approx(vol).epsilon(1e-12));
    }
}

TEST_CASE("implied_vol rejects prices outside the no-arbitrage interval") {
    for (double price : {-0.01, 0.0, 1.0, 1.5}) {
        try {
            implied_vol(OptionQuote{0.0, 1.0, price}, OptionKind::call);
            FAIL("accepted " << price);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NoSolution);
        }
    }
    const auto [lo, hi] = price_bounds(-0.2, OptionKind::put);
    CHECK(lo == 0.0);
    CHECK(hi == doctest::Approx(std::exp(-0.2)));
}

TEST_CASE("Fourier prices match a closed-form Heston transform at d = 0") {
    // Independent route: Lewis inversion of the CIR Laplace transform of the
    // integrated variance, 30-digit adaptive quadrature (mpmath).
    const ModelParams p = params(2.0, 0.04, 0.5, 0.04, 0.01, 0.0);
    FourierPricer pricer(p, 1.0);
    CHECK(pricer.call_price(-0.1) == doctest::Approx(0.13829378704453376811).epsilon(1e-8));
    CHECK(pricer.call_price(0.0) == doctest::Approx(0.085584010104451760683).epsilon(1e-8));
    CHECK(pricer.call_price(0.2) == doctest::Approx(0.024376354561516929712).epsilon(1e-8));

    const ModelParams q = params(0.5, 0.09, 1.0, 0.04, 0.0, 0.0);
    CHECK(fourier_call_price(q, -0.1, 0.25) == doctest::Approx(0.10396237388493105681).epsilon(1e-8));
    CHECK(fourier_call_price(q, 0.05, 0.25) == doctest::Approx(0.017687235286987547672).epsilon(1e-8));
}

TEST_CASE("deterministic variance prices equal Black-Scholes") {
    for (double d : {-0.3, 0.0, 0.3}) {
        const ModelParams p = params(0.0, 0.04, 0.0, 0.04, 0.01, d);
        const double sigma = std::sqrt(0.01 + 0.04 / std::tgamma(d + 2.0));
        for (double x : {-0.2, 0.0, 0.15}) {
            CHECK(fourier_call_price(p, x, 1.0) == doctest::Approx(bs_call_price(x, 1.0, sigma)).epsilon(1e-8));
        }
    }
}

TEST_CASE("Fourier price does not depend on the damping") {
    const ModelParams p = params(1.0, 0.04, 0.4, 0.04, 0.01, -0.2);
    for (double x : {-0.3, 0.0, 0.25}) {
        const double base = FourierPricer(p, 0.7, {0.5, 1e-11, 1e-11}).call_price(x);
        CHECK(FourierPricer(p, 0.7, {0.25, 1e-11, 1e-11}).call_price(x) == doctest::Approx(base).epsilon(1e-8));
        CHECK(FourierPricer(p, 0.7, {0.8, 1e-11, 1e-11}).call_price(x) == doctest::Approx(base).epsilon(1e-8));
    }
}

TEST_CASE("Fourier call prices are arbitrage-free across strikes") {
    const ModelParams p = params(1.0, 0.04, 0.5, 0.04, 0.01, 0.2);
    FourierPricer pricer(p, 1.0);
    double prev = 2.0;
    for (int i = 0; i <= 20; ++i) {
        const double x = -0.5 + 0.05 * i;
        const double call = pricer.call_price(x);
        const auto [lo, hi] = price_bounds(x, OptionKind::call);
        CHECK(call >= lo);
        CHECK(call <= hi);
        CHECK(call < prev);
        prev = call;
        CHECK(call - pricer.put_price(x) == doctest::Approx(1.0 - std::exp(x)).epsilon(1e-9));
    }
    CHECK(pricer.cached_nodes() > 0);
}

TEST_CASE("uncorrelated smiles are symmetric in log-strike") {
    const ModelParams p = params(1.0, 0.04, 0.6, 0.04, 0.01, 0.25);
    FourierPricer pricer(p, 0.5);
    for (double x : {0.05, 0.1, 0.2}) CHECK(pricer.implied_vol(x) == doctest::Approx(pricer.implied_vol(-x)).epsilon(1e-7));
}

TEST_CASE("covered call value") {
    CHECK(covered_call_value(0.3) == doctest::Approx(0.7));
    CHECK_THROWS_AS(covered_call_value(1.2), Error);
    CHECK_THROWS_AS(covered_call_value(-0.1), Error);
}
