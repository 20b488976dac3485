#include "dubf/beamformers.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "dubf/errors.hpp"
#include "dubf/kernels.hpp"

namespace dubf {

namespace {

constexpr double kFloorScale = 1e-12;

void check_order(const HermitianMatrix& phi, const SteeringGrid& steering) {
  if (phi.order() != steering.sensors())
    throw InvalidArgument("PSD order " + std::to_string(phi.order()) +
                          " does not match array size " + std::to_string(steering.sensors()));
}

std::vector<double> forms(const HermitianMatrix& r, const SteeringGrid& steering,
                          std::size_t bin) {
  const kernels::PlanarBlock block = steering.block(bin);
  std::vector<double> out(block.count);
  kernels::hermitian_forms(r.data(), block, out);
  return out;
}

// 1 / max(q, floor), in place.
void reciprocal_floored(std::vector<double>& q, double floor) {
  for (double& v : q) v = 1.0 / std::max(v, floor);
}

double du_floor(const HermitianMatrix& phi) {
  return kFloorScale * trace(phi) * static_cast<double>(phi.order());
}

double music_floor(std::size_t order) { return kFloorScale * static_cast<double>(order); }

}  // namespace

Method parse_method(std::string_view name) {
  if (name == "srp") return Method::kSrp;
  if (name == "srp-phat") return Method::kSrpPhat;
  if (name == "du") return Method::kDu;
  if (name == "du-sigma") return Method::kDuSigma;
  if (name == "mvdr") return Method::kMvdr;
  if (name == "music") return Method::kMusic;
  throw InvalidArgument("unknown method '" + std::string(name) +
                        "' (expected srp, srp-phat, du, du-sigma, mvdr, music)");
}

std::string_view method_name(Method m) noexcept {
  switch (m) {
    case Method::kSrp: return "srp";
    case Method::kSrpPhat: return "srp-phat";
    case Method::kDu: return "du";
    case Method::kDuSigma: return "du-sigma";
    case Method::kMvdr: return "mvdr";
    case Method::kMusic: return "music";
  }
  return "?";
}

NarrowbandSpectrum srp_spectrum(const HermitianMatrix& phi, const SteeringGrid& steering,
                                std::size_t bin) {
  check_order(phi, steering);
  return {bin, forms(phi, steering, bin), Method::kSrp, false};
}

HermitianMatrix phase_normalized(const HermitianMatrix& phi) {
  const std::size_t n = phi.order();
  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const cdouble z = phi(i, j);
      const double mag = std::abs(z);
      out(i, j) = mag < 1e-15 ? cdouble{} : z / mag;
    }
  return HermitianMatrix::from(out);
}

NarrowbandSpectrum srp_phat_spectrum(const HermitianMatrix& phi, const SteeringGrid& steering,
                                     std::size_t bin) {
  check_order(phi, steering);
  return {bin, forms(phase_normalized(phi), steering, bin), Method::kSrpPhat, false};
}

HermitianMatrix du_unload(const HermitianMatrix& phi) {
  const double tr = trace(phi);
  if (tr == 0.0) throw InvalidArgument("du_unload: zero trace gives a null regularization");
  return phi.affine(-1.0, tr);
}

NarrowbandSpectrum du_spectrum(const HermitianMatrix& phi, const SteeringGrid& steering,
                               std::size_t bin) {
  check_order(phi, steering);
  std::vector<double> q = forms(du_unload(phi), steering, bin);
  reciprocal_floored(q, du_floor(phi));
  return {bin, std::move(q), Method::kDu, false};
}

NarrowbandSpectrum du_noise_aware_spectrum(const HermitianMatrix& phi, double noise_power,
                                           const SteeringGrid& steering, std::size_t bin) {
  if (!(noise_power >= 0.0))
    throw InvalidArgument("du_noise_aware_spectrum: noise power must be >= 0");
  check_order(phi, steering);
  const double tr = trace(phi);
  const double residual = static_cast<double>(phi.order() - 1) * noise_power;
  if (!(tr > residual)) {
    NarrowbandSpectrum s = du_spectrum(phi, steering, bin);
    s.method = Method::kDuSigma;
    s.fallback = true;
    return s;
  }
  std::vector<double> q = forms(phi.affine(-1.0, tr - residual), steering, bin);
  reciprocal_floored(q, du_floor(phi));
  return {bin, std::move(q), Method::kDuSigma, false};
}

double dl_load(const HermitianMatrix& phi, double delta, std::size_t fft_size) {
  return trace(phi) * delta / static_cast<double>(fft_size);
}

NarrowbandSpectrum mvdr_dl_spectrum(const HermitianMatrix& phi, double load,
                                    const SteeringGrid& steering, std::size_t bin) {
  if (!(load > 0.0)) throw InvalidArgument("mvdr_dl_spectrum: load must be > 0");
  check_order(phi, steering);
  std::vector<double> q = forms(regularized_inverse(phi, load), steering, bin);
  for (double& v : q) v = 1.0 / v;
  return {bin, std::move(q), Method::kMvdr, false};
}

HermitianMatrix noise_projector(const HermitianMatrix& phi, std::size_t sources) {
  const std::size_t n = phi.order();
  if (sources < 1 || sources >= n)
    throw InvalidArgument("MUSIC: source count " + std::to_string(sources) +
                          " must satisfy 1 <= S < N = " + std::to_string(n));
  const EigenSystem eig = hermitian_eig(phi);
  std::vector<double> select(n, 1.0);
  for (std::size_t k = 0; k < sources; ++k) select[k] = 0.0;
  return compose(eig, select);
}

NarrowbandSpectrum music_spectrum(const HermitianMatrix& phi, std::size_t sources,
                                  const SteeringGrid& steering, std::size_t bin) {
  check_order(phi, steering);
  std::vector<double> q = forms(noise_projector(phi, sources), steering, bin);
  reciprocal_floored(q, music_floor(phi.order()));
  return {bin, std::move(q), Method::kMusic, false};
}

NarrowbandSpectrum narrowband_spectrum(Method method, const PsdMatrix& psd,
                                       const MethodParams& params,
                                       const SteeringGrid& steering, std::size_t bin) {
  switch (method) {
    case Method::kSrp:
      return srp_spectrum(psd.phi, steering, bin);
    case Method::kSrpPhat:
      return srp_phat_spectrum(psd.phi, steering, bin);
    case Method::kDu:
      return du_spectrum(psd.phi, steering, bin);
    case Method::kDuSigma: {
      const std::optional<double> s2 = params.noise_power ? params.noise_power : psd.noise_power;
      if (!s2) throw InvalidArgument("du-sigma requires a known noise power");
      return du_noise_aware_spectrum(psd.phi, *s2, steering, bin);
    }
    case Method::kMvdr:
      return mvdr_dl_spectrum(psd.phi, dl_load(psd.phi, params.loading_constant, params.fft_size),
                              steering, bin);
    case Method::kMusic:
      return music_spectrum(psd.phi, params.sources, steering, bin);
  }
  throw InvalidArgument("narrowband_spectrum: unknown method");
}

std::vector<NarrowbandSpectrum> narrowband_spectra(Method method, const PsdTable& table,
                                                   const MethodParams& params,
                                                   const SteeringGrid& steering) {
  std::vector<NarrowbandSpectrum> out;
  out.reserve(table.bins().size());
  for (std::size_t b = table.bins().first; b <= table.bins().last; ++b)
    out.push_back(narrowband_spectrum(method, table.at(b), params, steering, b));
  return out;
}

BeamWeights beam_weights(Method method, const HermitianMatrix& phi, const MethodParams& params,
                         const SteeringGrid& steering, std::size_t bin) {
  check_order(phi, steering);
  const std::size_t n = phi.order();
  const std::size_t count = steering.grid().size();
  BeamWeights out{method, bin, {}};
  out.weights.reserve(count);

  if (method == Method::kSrp) {
    for (std::size_t t = 0; t < count; ++t) {
      CVector w = steering.vector(bin, t).entries;
      for (auto& z : w) z /= static_cast<double>(n);
      out.weights.push_back(std::move(w));
    }
    return out;
  }

  std::optional<HermitianMatrix> r;
  double floor = 0.0;
  switch (method) {
    case Method::kDu:
      r = du_unload(phi);
      floor = du_floor(phi);
      break;
    case Method::kMvdr: {
      const double load = dl_load(phi, params.loading_constant, params.fft_size);
      if (!(load > 0.0)) throw InvalidArgument("beam_weights: MVDR load must be > 0");
      r = regularized_inverse(phi, load);
      break;
    }
    case Method::kMusic:
      r = noise_projector(phi, params.sources);
      floor = music_floor(n);
      break;
    default:
      throw InvalidArgument("beam_weights: method " + std::string(method_name(method)) +
                            " has no weighting vector (use srp, du, mvdr or music)");
  }

  for (std::size_t t = 0; t < count; ++t) {
    const CVector a = steering.vector(bin, t).entries;
    CVector ra(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) ra[i] += (*r)(i, j) * a[j];
    cdouble denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) denom += std::conj(a[i]) * ra[i];
    if (!(denom.real() > floor)) {
      std::ostringstream msg;
      msg << "beam_weights: singular steering for " << method_name(method) << " at "
          << steering.grid()[t] << " deg (a^H R a = " << denom.real() << ")";
      throw NumericalError(msg.str());
    }
    for (auto& z : ra) z /= denom.real();
    out.weights.push_back(std::move(ra));
  }
  return out;
}

double du_gain(std::size_t sensors, double snr) {
  if (sensors < 2) throw InvalidArgument("du_gain: need N >= 2");
  if (!(snr >= 0.0)) throw InvalidArgument("du_gain: SNR must be >= 0");
  const double n = static_cast<double>(sensors);
  return (n - 1.0) / (n * (snr + 1.0));
}

std::pair<double, double> two_source_gains(std::size_t sensors, double snr1, double snr2) {
  if (sensors < 3) throw InvalidArgument("two_source_gains: need N >= 3");
  if (!(snr1 >= 0.0 && snr2 >= 0.0))
    throw InvalidArgument("two_source_gains: SNR must be >= 0");
  const double n = static_cast<double>(sensors);
  const double denom = n * (snr1 + snr2 + 1.0);
  return {(n * snr2 + (n - 1.0)) / denom, (n * snr1 + (n - 1.0)) / denom};
}

}  // namespace dubf
