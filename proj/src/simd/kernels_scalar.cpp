#include <cmath>

#include "fheston/simd/kernels.hpp"

namespace fheston::simd::scalar {

void cir_step_accumulate(std::span<double> state, std::span<double> integral, std::span<const double> dw,
                         const CirStep& step) {
    const std::size_t n = state.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double s = state[i];
        const double vp = s > 0.0 ? s : 0.0;
        integral[i] = integral[i] + step.weight * vp;
        const double drift = step.kappa_theta_dt - step.kappa_dt * vp;
        const double diffusion = step.xi * std::sqrt(vp) * dw[i];
        state[i] = s + drift + diffusion;
    }
}

double weighted_sum(std::span<const double> w, std::span<const double> v) {
    const std::size_t n = w.size();
    const std::size_t body = n - n % 4;
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < body; i += 4) {
        for (std::size_t j = 0; j < 4; ++j) acc[j] = acc[j] + w[i + j] * v[i + j];
    }
    double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (std::size_t i = body; i < n; ++i) total = total + w[i] * v[i];
    return total;
}

}  // namespace fheston::simd::scalar
