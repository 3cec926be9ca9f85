#include <doctest.h>

#include <cmath>
#include <vector>

#include "fheston/error.hpp"
#include "fheston/pricing.hpp"
#include "fheston/simulation.hpp"

using namespace fheston;

namespace {

ModelParams params(double kappa, double theta, double xi, double v0, double eta, double d) {
    return validate_params(RawParams{kappa, theta, xi, v0, eta, d});
}

struct Sample {
    double mean = 0.0, se = 0.0;
};

template <class F>
Sample sample(std::size_t n, F&& draw) {
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = draw(i);
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n;
    return {mean, std::sqrt((sum2 / n - mean * mean) / (n - 1))};
}

}  // namespace

TEST_CASE("degenerate SDE gives a constant path") {
    const ModelParams p = params(0.0, 0.04, 0.0, 0.05, 0.0, 0.2);
    PathRng rng(1, 0);
    const auto path = simulate_cir_path(p, TimeGrid::uniform(1.0, 50), rng);
    for (double v : path.values) CHECK(v == 0.05);
}

TEST_CASE("simulated variance is nonnegative and starts at v0") {
    // xi^2 far above 2 kappa theta: the Euler iterate goes negative often
    const ModelParams p = params(1.0, 0.02, 1.5, 0.01, 0.0, 0.0);
    const TimeGrid grid = TimeGrid::uniform(2.0, 100);
    for (Scheme scheme : {Scheme::full_truncation, Scheme::exact_transition}) {
        for (std::uint64_t path = 0; path < 200; ++path) {
            PathRng rng(99, path);
            const auto vp = simulate_cir_path(p, grid, rng, scheme);
            REQUIRE(vp.values.size() == grid.size());
            CHECK(vp.values[0] == 0.01);
            for (double v : vp.values) REQUIRE(v >= 0.0);
        }
    }
}

TEST_CASE("CIR mean") {
    const ModelParams p = params(2.0, 0.04, 0.3, 0.09, 0.0, 0.0);
    const TimeGrid grid = TimeGrid::uniform(1.0, 200);
    const double expected = cir_mean(p, 1.0);
    CHECK(expected == doctest::Approx(0.04 + 0.05 * std::exp(-2.0)));
    Sample s[2];
    int i = 0;
    for (Scheme scheme : {Scheme::full_truncation, Scheme::exact_transition}) {
        s[i] = sample(100'000, [&](std::size_t path) {
            PathRng rng(2026, path);
            return simulate_cir_path(p, grid, rng, scheme).values.back();
        });
        CHECK(std::abs(s[i].mean - expected) <= 3.0 * s[i].se);
        ++i;
    }
    CHECK(std::abs(s[0].mean - s[1].mean) <= 3.0 * std::hypot(s[0].se, s[1].se));
}

TEST_CASE("exact transition without mean reversion") {
    const ModelParams p = params(0.0, 0.04, 0.4, 0.05, 0.0, 0.0);
    const TimeGrid grid = TimeGrid::uniform(1.0, 4);
    const Sample s = sample(100'000, [&](std::size_t path) {
        PathRng rng(3, path);
        return simulate_cir_path(p, grid, rng, Scheme::exact_transition).values.back();
    });
    CHECK(std::abs(s.mean - 0.05) <= 3.0 * s.se);
}

TEST_CASE("product integration is exact on constant paths") {
    const TimeGrid grid = TimeGrid::from_nodes({0.0, 0.1, 0.35, 0.6, 1.2, 1.5});
    const VariancePath path{grid, std::vector<double>(grid.size(), 0.07)};
    for (double d : {-0.5, -0.2, 0.0, 0.3, 0.5}) {
        const double expected = 0.01 * 1.5 + 0.07 * std::pow(1.5, d + 1.0) / std::tgamma(d + 2.0);
        CHECK(integrated_frac_variance(path, d, 0.01, 1.5) == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("d = 0 product integration is the left Riemann sum") {
    const TimeGrid grid = TimeGrid::from_nodes({0.0, 0.2, 0.5, 1.0});
    const VariancePath path{grid, {0.04, 0.06, 0.03, 0.5}};
    CHECK(integrated_frac_variance(path, 0.0, 0.02, 1.0) ==
          doctest::Approx(0.02 + 0.04 * 0.2 + 0.06 * 0.3 + 0.03 * 0.5).epsilon(1e-15));
}

TEST_CASE("product integration converges at first order on linear paths") {
    // int_0^t (t-u)^d (a + b u) du / Gamma(d+1) = a t^(d+1)/Gamma(d+2) + b t^(d+2)/Gamma(d+3)
    const double a = 0.04, b = 0.03, t = 2.0;
    for (double d : {-0.4, 0.25}) {
        const double exact = a * std::pow(t, d + 1.0) / std::tgamma(d + 2.0) + b * std::pow(t, d + 2.0) / std::tgamma(d + 3.0);
        double prev = INFINITY;
        for (std::size_t n : {16, 32, 64, 128}) {
            const TimeGrid grid = TimeGrid::uniform(t, n);
            std::vector<double> values(grid.size());
            for (std::size_t k = 0; k < grid.size(); ++k) values[k] = a + b * grid[k];
            const double err = std::abs(integrated_frac_variance({grid, values}, d, 0.0, t) - exact);
            if (std::isfinite(prev)) CHECK(prev / err == doctest::Approx(2.0).epsilon(0.05));
            prev = err;
        }
    }
}

TEST_CASE("integrated variance requires t at the last node") {
    const TimeGrid grid = TimeGrid::uniform(1.0, 4);
    const VariancePath path{grid, std::vector<double>(5, 0.04)};
    try {
        integrated_frac_variance(path, 0.2, 0.0, 0.9);
        FAIL("expected GridMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::GridMismatch);
    }
}

TEST_CASE("mc engine reproduces the single-path reference") {
    const ModelParams p = params(1.5, 0.04, 0.8, 0.04, 0.01, -0.25);
    McConfig cfg;
    cfg.n_paths = 7;  // not a multiple of the SIMD width
    cfg.steps_per_unit_time = 50;
    cfg.seed = 42;
    const double t = 0.8, x = 0.05;
    const TimeGrid grid = mc_grid(t, cfg.steps_per_unit_time);
    double mean = 0.0;
    for (std::size_t i = 0; i < cfg.n_paths; ++i) {
        PathRng rng(cfg.seed, i);
        const double iv = integrated_frac_variance(simulate_cir_path(p, grid, rng), p.d(), p.eta(), t);
        mean += bs_call_price(x, 1.0, std::sqrt(iv));
    }
    mean /= cfg.n_paths;
    CHECK(mc_call_price(p, x, t, cfg).mean == doctest::Approx(mean).epsilon(1e-14));
}

TEST_CASE("deterministic variance: every path identical") {
    for (double d : {-0.3, 0.0, 0.3}) {
        const ModelParams p = params(0.0, 0.04, 0.0, 0.04, 0.01, d);
        McConfig cfg;
        cfg.n_paths = 1000;
        const McEstimate est = mc_call_price(p, 0.0, 1.0, cfg);
        CHECK(est.std_error == 0.0);
        CHECK(est.n_paths == 1000);
        const double sigma = std::sqrt(0.01 + 0.04 / std::tgamma(d + 2.0));
        CHECK(est.mean == doctest::Approx(bs_call_price(0.0, 1.0, sigma)).epsilon(1e-13));
    }
}

TEST_CASE("output does not depend on the number of workers") {
    const ModelParams p = params(1.0, 0.04, 0.5, 0.04, 0.01, 0.2);
    McConfig cfg;
    cfg.n_paths = 5000;
    cfg.steps_per_unit_time = 50;
    cfg.seed = 9;
    cfg.workers = 1;
    const double xs[] = {-0.1, 0.0, 0.1};
    const auto one = mc_call_prices(p, xs, 1.0, cfg);
    cfg.workers = 8;
    const auto eight = mc_call_prices(p, xs, 1.0, cfg);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(one[i].mean == eight[i].mean);
        CHECK(one[i].std_error == eight[i].std_error);
    }
    cfg.seed = 10;
    CHECK(mc_call_prices(p, xs, 1.0, cfg)[1].mean != one[1].mean);
}

TEST_CASE("config validation") {
    const ModelParams p = params(1.0, 0.04, 0.5, 0.04, 0.01, 0.2);
    McConfig cfg;
    cfg.n_paths = 1;
    CHECK_THROWS_AS(mc_call_price(p, 0.0, 1.0, cfg), Error);
    cfg.n_paths = 10;
    cfg.steps_per_unit_time = 0;
    CHECK_THROWS_AS(mc_call_price(p, 0.0, 1.0, cfg), Error);
    CHECK_THROWS_AS(mc_call_price_euler(p, 0.0, 1.0, McConfig{}), Error);
}

TEST_CASE("Monte Carlo agrees with Fourier for d = 0, eta = 0") {
    const ModelParams p = params(2.0, 0.04, 0.3, 0.04, 0.0, 0.0);
    McConfig cfg;
    cfg.n_paths = 100'000;
    cfg.steps_per_unit_time = 200;
    cfg.seed = 5;
    const McEstimate est = mc_call_price(p, 0.0, 1.0, cfg);
    CHECK(std::abs(est.mean - fourier_call_price(p, 0.0, 1.0)) <= 3.0 * est.std_error);
}

TEST_CASE("discretisation bias shrinks as the grid is refined") {
    // strongly non-Feller parameters, so the truncation bias dominates the noise
    const ModelParams p = params(3.0, 0.04, 1.0, 0.09, 0.0, 0.0);
    const double exact = fourier_call_price(p, 0.0, 1.0);
    McConfig cfg;
    cfg.n_paths = 100'000;
    cfg.seed = 77;
    double prev = INFINITY;
    for (std::size_t steps : {2, 4, 8, 16}) {
        cfg.steps_per_unit_time = steps;
        const McEstimate est = mc_call_price(p, 0.0, 1.0, cfg);
        const double bias = std::abs(est.mean - exact);
        CHECK(bias < prev + 2.0 * est.std_error);
        prev = bias;
    }
}

TEST_CASE("mean of the fractional variance") {
    McConfig cfg;
    cfg.n_paths = 50'000;
    cfg.steps_per_unit_time = 200;
    const ModelParams rough = params(1.0, 0.04, 0.3, 0.09, 0.01, 0.3);
    const McEstimate r = mean_Vd_mc(rough, 1.5, cfg);
    CHECK(std::abs(r.mean - mean_Vd(rough, 1.5)) <= 3.0 * r.std_error);

    const ModelParams smooth = params(1.0, 0.04, 0.3, 0.09, 0.01, -0.2);
    const McEstimate s = mean_Vd_mc(smooth, 1.5, cfg);
    CHECK(std::abs(s.mean - mean_Vd_time_average(smooth, 1.5)) <= 3.0 * s.std_error);

    const ModelParams flat = params(1.0, 0.04, 0.3, 0.09, 0.01, 0.0);
    const McEstimate f = mean_Vd_mc(flat, 1.5, cfg);
    CHECK(std::abs(f.mean - mean_Vd(flat, 1.5)) <= 3.0 * f.std_error);
}

TEST_CASE("expected integrated variance against quadrature") {
    // mpmath: eta t + int_0^t (t-s)^d / Gamma(d+1) E V_s ds with kappa 1, theta 0.04, v0 0.09, eta 0.01, d -0.2, t 1.5
    const ModelParams p = params(1.0, 0.04, 0.3, 0.09, 0.01, -0.2);
    CHECK(expected_integrated_frac_variance(p, 1.5) == doctest::Approx(0.11006821864532623834).epsilon(1e-11));
    CHECK(mean_Vd_time_average(p, 1.5) == doctest::Approx(0.11006821864532623834 / 1.5).epsilon(1e-11));
}

TEST_CASE("stationary covariance") {
    const ModelParams p = params(2.0, 0.04, 0.3, 0.04, 0.0, 0.0);
    CHECK(cov_V_stationary(p, 0.0) == doctest::Approx(0.09 * 0.04 / 4.0));
    double prev = cov_V_stationary(p, 0.0);
    for (double h : {0.1, 0.5, 1.0, 5.0}) {
        const double c = cov_V_stationary(p, h);
        CHECK(c < prev);
        prev = c;
    }
    CHECK(cov_V_stationary(p, -0.5) == cov_V_stationary(p, 0.5));
    CHECK_THROWS_AS(cov_V_stationary(params(0.0, 0.04, 0.3, 0.04, 0.0, 0.0), 1.0), Error);
}
