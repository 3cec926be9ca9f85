#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

// Data-parallel inner loops of the Monte Carlo engine. Each kernel has a
// scalar reference and SIMD variants; the SIMD variants perform the same
// floating-point operations in the same order per lane, so every level
// returns bit-identical results.

namespace fheston::simd {

enum class Level { scalar, avx2, neon };

constexpr std::string_view to_string(Level level) {
    switch (level) {
        case Level::scalar: return "scalar";
        case Level::avx2: return "avx2";
        case Level::neon: return "neon";
    }
    return "unknown";
}

/// Levels compiled into this build and supported by the running CPU.
std::vector<Level> available_levels();
/// Best available level.
Level detected_level();
/// Level used by the dispatching entry points. Defaults to detected_level(),
/// or to the value of FHESTON_SIMD ("scalar", "avx2", "neon") when set.
Level active_level();
/// Overrides the active level; std::nullopt restores the default.
/// Throws std::invalid_argument for an unavailable level.
void force_level(std::optional<Level> level);

/// One full-truncation Euler step for a batch of CIR paths, fused with the
/// product-integration update. For every lane i:
///   v+ = max(state[i], 0)
///   integral[i] += weight * v+
///   state[i] += (kappa_theta_dt - kappa_dt * v+) + xi * sqrt(v+) * dw[i]
struct CirStep {
    double kappa_dt = 0.0;
    double kappa_theta_dt = 0.0;
    double xi = 0.0;
    double weight = 0.0;
};

void cir_step_accumulate(std::span<double> state, std::span<double> integral, std::span<const double> dw,
                         const CirStep& step);

/// sum_i w[i] * v[i], accumulated in four interleaved partial sums
/// (lane j takes indices j mod 4) combined as (s0 + s1) + (s2 + s3), then the
/// tail in index order.
double weighted_sum(std::span<const double> w, std::span<const double> v);

namespace scalar {
void cir_step_accumulate(std::span<double> state, std::span<double> integral, std::span<const double> dw,
                         const CirStep& step);
double weighted_sum(std::span<const double> w, std::span<const double> v);
}  // namespace scalar

namespace avx2 {
void cir_step_accumulate(std::span<double> state, std::span<double> integral, std::span<const double> dw,
                         const CirStep& step);
double weighted_sum(std::span<const double> w, std::span<const double> v);
}  // namespace avx2

namespace neon {
void cir_step_accumulate(std::span<double> state, std::span<double> integral, std::span<const double> dw,
                         const CirStep& step);
double weighted_sum(std::span<const double> w, std::span<const double> v);
}  // namespace neon

}  // namespace fheston::simd
