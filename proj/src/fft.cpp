#include "dubf/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "dubf/errors.hpp"

namespace dubf::fft {

namespace {

// The FFTW planner is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per size under a lock and never freed.
// FFTW_UNALIGNED keeps results independent of buffer alignment.
class PlanCache {
 public:
  fftw_plan get(std::size_t size, bool forward) {
    const std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(size, forward);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    double* real = fftw_alloc_real(size);
    fftw_complex* cplx = fftw_alloc_complex(size / 2 + 1);
    const int n = static_cast<int>(size);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = forward ? fftw_plan_dft_r2c_1d(n, real, cplx, flags)
                             : fftw_plan_dft_c2r_1d(n, cplx, real, flags);
    fftw_free(real);
    fftw_free(cplx);
    if (plan == nullptr) throw NumericalError("FFTW failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, bool>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

CVector forward_real(std::span<const double> x) {
  if (x.empty()) throw InvalidArgument("fft::forward_real: empty input");
  std::vector<double> in(x.begin(), x.end());
  CVector out(x.size() / 2 + 1);
  fftw_execute_dft_r2c(cache().get(x.size(), true), in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> inverse_real(std::span<const cdouble> spectrum, std::size_t size) {
  if (size == 0 || spectrum.size() != size / 2 + 1)
    throw InvalidArgument("fft::inverse_real: spectrum must hold size/2+1 bins");
  CVector in(spectrum.begin(), spectrum.end());  // c2r overwrites its input
  std::vector<double> out(size);
  fftw_execute_dft_c2r(cache().get(size, false), reinterpret_cast<fftw_complex*>(in.data()),
                       out.data());
  const double scale = 1.0 / static_cast<double>(size);
  for (double& v : out) v *= scale;
  return out;
}

}  // namespace dubf::fft
