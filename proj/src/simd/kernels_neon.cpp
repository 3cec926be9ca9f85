#include <arm_neon.h>

#include "fheston/simd/kernels.hpp"

namespace fheston::simd::neon {

void cir_step_accumulate(std::span<double> state, std::span<double> integral, std::span<const double> dw,
                         const CirStep& step) {
    const std::size_t n = state.size();
    const std::size_t body = n - n % 2;
    const float64x2_t zero = vdupq_n_f64(0.0);
    const float64x2_t weight = vdupq_n_f64(step.weight);
    const float64x2_t kdt = vdupq_n_f64(step.kappa_dt);
    const float64x2_t ktdt = vdupq_n_f64(step.kappa_theta_dt);
    const float64x2_t xi = vdupq_n_f64(step.xi);
    for (std::size_t i = 0; i < body; i += 2) {
        const float64x2_t s = vld1q_f64(state.data() + i);
        const float64x2_t vp = vbslq_f64(vcgtq_f64(s, zero), s, zero);
        const float64x2_t acc = vld1q_f64(integral.data() + i);
        vst1q_f64(integral.data() + i, vaddq_f64(acc, vmulq_f64(weight, vp)));
        const float64x2_t drift = vsubq_f64(ktdt, vmulq_f64(kdt, vp));
        const float64x2_t diffusion = vmulq_f64(vmulq_f64(xi, vsqrtq_f64(vp)), vld1q_f64(dw.data() + i));
        vst1q_f64(state.data() + i, vaddq_f64(vaddq_f64(s, drift), diffusion));
    }
    if (body < n) {
        scalar::cir_step_accumulate(state.subspan(body), integral.subspan(body), dw.subspan(body), step);
    }
}

double weighted_sum(std::span<const double> w, std::span<const double> v) {
    const std::size_t n = w.size();
    const std::size_t body = n - n % 4;
    float64x2_t acc01 = vdupq_n_f64(0.0);
    float64x2_t acc23 = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < body; i += 4) {
        acc01 = vaddq_f64(acc01, vmulq_f64(vld1q_f64(w.data() + i), vld1q_f64(v.data() + i)));
        acc23 = vaddq_f64(acc23, vmulq_f64(vld1q_f64(w.data() + i + 2), vld1q_f64(v.data() + i + 2)));
    }
    double total = (vgetq_lane_f64(acc01, 0) + vgetq_lane_f64(acc01, 1)) +
                   (vgetq_lane_f64(acc23, 0) + vgetq_lane_f64(acc23, 1));
    for (std::size_t i = body; i < n; ++i) total = total + w[i] * v[i];
    return total;
}

}  // namespace fheston::simd::neon
