#pragma once

// Narrowband spatial spectra: SRP, SRP-PHAT, diagonal unloading (DU, with and
// without known noise power), diagonally loaded MVDR and MUSIC. Each
// data-dependent method is a reciprocal quadratic form 1 / (a^H R a) with a
// method-specific regularized matrix R; the quadratic forms over the whole DOA
// grid run through kernels::hermitian_forms.

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "dubf/array_model.hpp"
#include "dubf/linalg.hpp"
#include "dubf/spectral.hpp"

namespace dubf {

enum class Method { kSrp, kSrpPhat, kDu, kDuSigma, kMvdr, kMusic };

// CLI names: srp, srp-phat, du, du-sigma, mvdr, music.
Method parse_method(std::string_view name);
std::string_view method_name(Method m) noexcept;

inline constexpr double kDefaultLoadingConstant = 1e-4;

struct NarrowbandSpectrum {
  std::size_t bin = 0;
  std::vector<double> values;  // one per grid angle
  Method method = Method::kSrp;
  // du-sigma only: the noise-aware precondition failed and plain DU was used.
  bool fallback = false;
};

// P = a^H Phi a (the 1/N^2 of w = a/N is dropped).
NarrowbandSpectrum srp_spectrum(const HermitianMatrix& phi, const SteeringGrid& steering,
                                std::size_t bin);

// Entrywise phase-only normalization: Phi_ij / |Phi_ij|, entries below 1e-15 in
// modulus set to zero. The diagonal becomes 1 wherever it is nonzero.
HermitianMatrix phase_normalized(const HermitianMatrix& phi);

// SRP on phase_normalized(phi).
NarrowbandSpectrum srp_phat_spectrum(const HermitianMatrix& phi, const SteeringGrid& steering,
                                     std::size_t bin);

// tr(Phi) I - Phi. Throws InvalidArgument when tr(Phi) == 0.
HermitianMatrix du_unload(const HermitianMatrix& phi);

// P = 1 / (a^H (tr(Phi) I - Phi) a), denominator floored at 1e-12 tr(Phi) N.
// Never calls the eigensolver.
NarrowbandSpectrum du_spectrum(const HermitianMatrix& phi, const SteeringGrid& steering,
                               std::size_t bin);

// P = 1 / (a^H ([tr(Phi) - (N-1) s2] I - Phi) a) with s2 the PSD-domain noise
// level. Falls back to du_spectrum (fallback = true) when
// tr(Phi) <= (N-1) s2. Throws InvalidArgument for s2 < 0.
NarrowbandSpectrum du_noise_aware_spectrum(const HermitianMatrix& phi, double noise_power,
                                           const SteeringGrid& steering, std::size_t bin);

// mu' = tr(Phi) delta / L
double dl_load(const HermitianMatrix& phi, double delta, std::size_t fft_size);

// P = 1 / (a^H (Phi + load I)^-1 a). Throws InvalidArgument for load <= 0.
NarrowbandSpectrum mvdr_dl_spectrum(const HermitianMatrix& phi, double load,
                                    const SteeringGrid& steering, std::size_t bin);

// U_v U_v^H from the eigenvectors S+1..N of Phi (descending eigenvalues).
HermitianMatrix noise_projector(const HermitianMatrix& phi, std::size_t sources);

// P = 1 / (a^H U_v U_v^H a), denominator floored at 1e-12 N. Throws
// InvalidArgument unless 1 <= S < N.
NarrowbandSpectrum music_spectrum(const HermitianMatrix& phi, std::size_t sources,
                                  const SteeringGrid& steering, std::size_t bin);

struct MethodParams {
  double loading_constant = kDefaultLoadingConstant;  // Delta
  std::size_t fft_size = 2048;                        // L, for the DL load
  std::size_t sources = 1;                            // MUSIC subspace split
  // PSD-domain noise level for du-sigma; falls back to PsdMatrix::noise_power.
  std::optional<double> noise_power;
};

// Dispatches on method for one PSD matrix.
NarrowbandSpectrum narrowband_spectrum(Method method, const PsdMatrix& psd,
                                       const MethodParams& params,
                                       const SteeringGrid& steering, std::size_t bin);

// One spectrum per bin of the table, in ascending bin order.
std::vector<NarrowbandSpectrum> narrowband_spectra(Method method, const PsdTable& table,
                                                   const MethodParams& params,
                                                   const SteeringGrid& steering);

struct BeamWeights {
  Method method = Method::kSrp;
  std::size_t bin = 0;
  std::vector<CVector> weights;  // one per grid angle
};

// Conventional (kSrp): w = a / N. kDu, kMvdr, kMusic: w = R a / (a^H R a) with
// R = tr(Phi) I - Phi, (Phi + mu' I)^-1 or U_v U_v^H. Throws NumericalError
// naming the angle where a^H R a falls below the method's floor.
BeamWeights beam_weights(Method method, const HermitianMatrix& phi, const MethodParams& params,
                         const SteeringGrid& steering, std::size_t bin);

// Signal-subspace gain of DU under white noise: (N-1) / (N (SNR + 1)).
double du_gain(std::size_t sensors, double snr);

// Two-source signal-subspace gains (G1, G2):
// G1 = (N SNR2 + (N-1)) / (N (SNR1 + SNR2 + 1)), G2 symmetric.
std::pair<double, double> two_source_gains(std::size_t sensors, double snr1, double snr2);

}  // namespace dubf
