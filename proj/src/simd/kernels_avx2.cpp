#include <immintrin.h>

#include "fheston/simd/kernels.hpp"

namespace fheston::simd::avx2 {

void cir_step_accumulate(std::span<double> state, std::span<double> integral, std::span<const double> dw,
                         const CirStep& step) {
    const std::size_t n = state.size();
    const std::size_t body = n - n % 4;
    const __m256d zero = _mm256_setzero_pd();
    const __m256d weight = _mm256_set1_pd(step.weight);
    const __m256d kdt = _mm256_set1_pd(step.kappa_dt);
    const __m256d ktdt = _mm256_set1_pd(step.kappa_theta_dt);
    const __m256d xi = _mm256_set1_pd(step.xi);
    for (std::size_t i = 0; i < body; i += 4) {
        const __m256d s = _mm256_loadu_pd(state.data() + i);
        // max_pd returns the second operand unless s > 0, matching the scalar ternary.
        const __m256d vp = _mm256_max_pd(s, zero);
        const __m256d acc = _mm256_loadu_pd(integral.data() + i);
        _mm256_storeu_pd(integral.data() + i, _mm256_add_pd(acc, _mm256_mul_pd(weight, vp)));
        const __m256d drift = _mm256_sub_pd(ktdt, _mm256_mul_pd(kdt, vp));
        const __m256d noise = _mm256_loadu_pd(dw.data() + i);
        const __m256d diffusion = _mm256_mul_pd(_mm256_mul_pd(xi, _mm256_sqrt_pd(vp)), noise);
        _mm256_storeu_pd(state.data() + i, _mm256_add_pd(_mm256_add_pd(s, drift), diffusion));
    }
    if (body < n) {
        scalar::cir_step_accumulate(state.subspan(body), integral.subspan(body), dw.subspan(body), step);
    }
}

double weighted_sum(std::span<const double> w, std::span<const double> v) {
    const std::size_t n = w.size();
    const std::size_t body = n - n % 4;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < body; i += 4) {
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w.data() + i), _mm256_loadu_pd(v.data() + i)));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (std::size_t i = body; i < n; ++i) total = total + w[i] * v[i];
    return total;
}

}  // namespace fheston::simd::avx2
