#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "fheston/simd/kernels.hpp"

namespace fheston::simd {

namespace {

bool cpu_has_avx2() {
#if defined(FHESTON_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

bool is_available(Level level) {
    switch (level) {
        case Level::scalar: return true;
        case Level::avx2: return cpu_has_avx2();
        case Level::neon:
#if defined(FHESTON_WITH_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Level default_level() {
    if (const char* env = std::getenv("FHESTON_SIMD")) {
        const std::string name(env);
        for (Level level : {Level::scalar, Level::avx2, Level::neon}) {
            if (name == to_string(level) && is_available(level)) return level;
        }
    }
    return detected_level();
}

std::atomic<int> g_forced{-1};

}  // namespace

std::vector<Level> available_levels() {
    std::vector<Level> out;
    for (Level level : {Level::scalar, Level::avx2, Level::neon}) {
        if (is_available(level)) out.push_back(level);
    }
    return out;
}

Level detected_level() {
    if (is_available(Level::avx2)) return Level::avx2;
    if (is_available(Level::neon)) return Level::neon;
    return Level::scalar;
}

Level active_level() {
    const int forced = g_forced.load(std::memory_order_relaxed);
    if (forced >= 0) return static_cast<Level>(forced);
    static const Level level = default_level();
    return level;
}

void force_level(std::optional<Level> level) {
    if (level && !is_available(*level)) throw std::invalid_argument("SIMD level not available: " + std::string(to_string(*level)));
    g_forced.store(level ? static_cast<int>(*level) : -1, std::memory_order_relaxed);
}

void cir_step_accumulate(std::span<double> state, std::span<double> integral, std::span<const double> dw,
                         const CirStep& step) {
    switch (active_level()) {
#if defined(FHESTON_WITH_AVX2)
        case Level::avx2: return avx2::cir_step_accumulate(state, integral, dw, step);
#endif
#if defined(FHESTON_WITH_NEON)
        case Level::neon: return neon::cir_step_accumulate(state, integral, dw, step);
#endif
        default: return scalar::cir_step_accumulate(state, integral, dw, step);
    }
}

double weighted_sum(std::span<const double> w, std::span<const double> v) {
    switch (active_level()) {
#if defined(FHESTON_WITH_AVX2)
        case Level::avx2: return avx2::weighted_sum(w, v);
#endif
#if defined(FHESTON_WITH_NEON)
        case Level::neon: return neon::weighted_sum(w, v);
#endif
        default: return scalar::weighted_sum(w, v);
    }
}

}  // namespace fheston::simd
