#include "dubf/kernels.hpp"

namespace dubf::kernels {

void hermitian_forms_scalar(std::span<const std::complex<double>> r,
                            const PlanarBlock& a, std::span<double> out) {
  const std::size_t n = a.order;
  const std::size_t count = a.count;

  for (std::size_t t = 0; t < count; ++t) out[t] = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    const double* pi = a.re + i * count;
    const double* qi = a.im + i * count;
    const double d = r[i * n + i].real();
    for (std::size_t t = 0; t < count; ++t) out[t] += d * (pi[t] * pi[t] + qi[t] * qi[t]);

    for (std::size_t j = i + 1; j < n; ++j) {
      // 2 Re(conj(a_i) r_ij a_j)
      const double rr = 2.0 * r[i * n + j].real();
      const double ri = 2.0 * r[i * n + j].imag();
      const double* pj = a.re + j * count;
      const double* qj = a.im + j * count;
      for (std::size_t t = 0; t < count; ++t) {
        const double re = pi[t] * pj[t] + qi[t] * qj[t];
        const double im = pi[t] * qj[t] - qi[t] * pj[t];
        out[t] += rr * re - ri * im;
      }
    }
  }
}

}  // namespace dubf::kernels
