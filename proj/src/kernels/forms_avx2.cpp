// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "dubf/kernels.hpp"

namespace dubf::kernels {

void hermitian_forms_avx2(std::span<const std::complex<double>> r,
                          const PlanarBlock& a, std::span<double> out) {
  const std::size_t n = a.order;
  const std::size_t count = a.count;
  const std::size_t vec_end = count - count % 4;

  for (std::size_t t = 0; t < count; ++t) out[t] = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    const double* pi = a.re + i * count;
    const double* qi = a.im + i * count;
    const double d = r[i * n + i].real();
    const __m256d vd = _mm256_set1_pd(d);

    std::size_t t = 0;
    for (; t < vec_end; t += 4) {
      const __m256d p = _mm256_loadu_pd(pi + t);
      const __m256d q = _mm256_loadu_pd(qi + t);
      const __m256d mag = _mm256_fmadd_pd(p, p, _mm256_mul_pd(q, q));
      _mm256_storeu_pd(out.data() + t,
                       _mm256_fmadd_pd(vd, mag, _mm256_loadu_pd(out.data() + t)));
    }
    for (; t < count; ++t) out[t] += d * (pi[t] * pi[t] + qi[t] * qi[t]);

    for (std::size_t j = i + 1; j < n; ++j) {
      const double rr = 2.0 * r[i * n + j].real();
      const double ri = 2.0 * r[i * n + j].imag();
      const __m256d vrr = _mm256_set1_pd(rr);
      const __m256d vri = _mm256_set1_pd(ri);
      const double* pj = a.re + j * count;
      const double* qj = a.im + j * count;

      t = 0;
      for (; t < vec_end; t += 4) {
        const __m256d p0 = _mm256_loadu_pd(pi + t);
        const __m256d q0 = _mm256_loadu_pd(qi + t);
        const __m256d p1 = _mm256_loadu_pd(pj + t);
        const __m256d q1 = _mm256_loadu_pd(qj + t);
        const __m256d re = _mm256_fmadd_pd(p0, p1, _mm256_mul_pd(q0, q1));
        const __m256d im = _mm256_fmsub_pd(p0, q1, _mm256_mul_pd(q0, p1));
        __m256d acc = _mm256_loadu_pd(out.data() + t);
        acc = _mm256_fmadd_pd(vrr, re, acc);
        acc = _mm256_fnmadd_pd(vri, im, acc);
        _mm256_storeu_pd(out.data() + t, acc);
      }
      for (; t < count; ++t) {
        const double re = pi[t] * pj[t] + qi[t] * qj[t];
        const double im = pi[t] * qj[t] - qi[t] * pj[t];
        out[t] += rr * re - ri * im;
      }
    }
  }
}

}  // namespace dubf::kernels
