#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "fheston/core_model.hpp"
#include "fheston/simd/kernels.hpp"
#include "fheston/simulation.hpp"

using namespace fheston;
using simd::Level;

namespace {

struct LevelGuard {
    explicit LevelGuard(Level level) { simd::force_level(level); }
    ~LevelGuard() { simd::force_level(std::nullopt); }
};

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

std::vector<double> random_vector(std::mt19937_64& gen, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(gen);
    return v;
}

}  // namespace

TEST_CASE("scalar is always available and detection picks an available level") {
    const auto levels = simd::available_levels();
    REQUIRE(!levels.empty());
    CHECK(levels.front() == Level::scalar);
    CHECK(std::find(levels.begin(), levels.end(), simd::detected_level()) != levels.end());
}

TEST_CASE("force_level overrides and restores the active level") {
    const Level before = simd::active_level();
    {
        LevelGuard guard(Level::scalar);
        CHECK(simd::active_level() == Level::scalar);
    }
    CHECK(simd::active_level() == before);
    const auto levels = simd::available_levels();
    for (Level level : {Level::avx2, Level::neon}) {
        if (std::find(levels.begin(), levels.end(), level) == levels.end()) {
            CHECK_THROWS_AS(simd::force_level(level), std::invalid_argument);
        }
    }
}

TEST_CASE("cir_step_accumulate is bit-identical across levels") {
    std::mt19937_64 gen(17);
    for (std::size_t n : {0, 1, 3, 4, 5, 8, 31, 512, 1027}) {
        auto state0 = random_vector(gen, n, -0.05, 0.2);
        if (n > 2) {
            state0[0] = 0.0;
            state0[1] = -0.0;
        }
        const auto integral0 = random_vector(gen, n, 0.0, 0.5);
        const auto dw = random_vector(gen, n, -0.2, 0.2);
        const simd::CirStep step{0.01, 0.0004, 0.7, 0.003};

        std::vector<double> ref_state = state0, ref_integral = integral0;
        simd::scalar::cir_step_accumulate(ref_state, ref_integral, dw, step);
        for (Level level : simd::available_levels()) {
            LevelGuard guard(level);
            std::vector<double> state = state0, integral = integral0;
            for (int rep = 0; rep < 3; ++rep) {
                simd::cir_step_accumulate(state, integral, dw, step);
                if (rep == 0) {
                    for (std::size_t i = 0; i < n; ++i) {
                        REQUIRE(same_bits(state[i], ref_state[i]));
                        REQUIRE(same_bits(integral[i], ref_integral[i]));
                    }
                }
            }
        }
    }
}

TEST_CASE("cir_step_accumulate lane formula") {
    std::vector<double> state{-0.01, 0.04}, integral{0.0, 1.0};
    const std::vector<double> dw{0.5, 0.1};
    simd::cir_step_accumulate(state, integral, dw, {0.1, 0.004, 0.5, 0.2});
    CHECK(state[0] == -0.01 + 0.004);
    CHECK(integral[0] == 0.0);
    CHECK(state[1] == doctest::Approx(0.04 + (0.004 - 0.1 * 0.04) + 0.5 * 0.2 * 0.1));
    CHECK(integral[1] == doctest::Approx(1.0 + 0.2 * 0.04));
}

TEST_CASE("weighted_sum is bit-identical across levels") {
    std::mt19937_64 gen(23);
    for (std::size_t n : {0, 1, 2, 3, 4, 7, 16, 401}) {
        const auto w = random_vector(gen, n, -1.0, 1.0);
        const auto v = random_vector(gen, n, -1e3, 1e3);
        const double ref = simd::scalar::weighted_sum(w, v);
        double naive = 0.0;
        for (std::size_t i = 0; i < n; ++i) naive += w[i] * v[i];
        CHECK(ref == doctest::Approx(naive).epsilon(1e-10));
        for (Level level : simd::available_levels()) {
            LevelGuard guard(level);
            CHECK(same_bits(simd::weighted_sum(w, v), ref));
        }
    }
}

TEST_CASE("Monte Carlo prices do not depend on the SIMD level") {
    const ModelParams p = validate_params(RawParams{1.0, 0.04, 0.9, 0.03, 0.01, -0.3});
    McConfig cfg;
    cfg.n_paths = 2001;
    cfg.steps_per_unit_time = 40;
    const double xs[] = {-0.1, 0.2};
    std::vector<McEstimate> ref;
    {
        LevelGuard guard(Level::scalar);
        ref = mc_call_prices(p, xs, 1.3, cfg);
    }
    for (Level level : simd::available_levels()) {
        LevelGuard guard(level);
        const auto est = mc_call_prices(p, xs, 1.3, cfg);
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(same_bits(est[i].mean, ref[i].mean));
            CHECK(same_bits(est[i].std_error, ref[i].std_error));
        }
    }
}
