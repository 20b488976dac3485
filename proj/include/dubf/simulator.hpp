#pragma once

// Synthetic free-field scenes: source waveforms, far-field propagation by
// exact fractional delays, superposition and calibrated white sensor noise.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dubf/array_model.hpp"
#include "dubf/spectral.hpp"

namespace dubf {

enum class SourceKind { kSinusoid, kWhiteBroadband, kBandlimited };

SourceKind parse_source_kind(std::string_view name);
std::string_view source_kind_name(SourceKind k) noexcept;

struct SourceSpec {
  SourceKind kind = SourceKind::kBandlimited;
  double frequency_hz = 0.0;  // sinusoid
  double f_lo_hz = 0.0;       // bandlimited
  double f_hi_hz = 0.0;       // bandlimited
  double duration_s = 1.0;
  double doa_deg = 0.0;
  double power = 1.0;
  // Bandlimited only: raised-cosine amplitude envelope at this rate, giving a
  // nonstationary (speech-like bursty) source. 0 keeps it stationary.
  double modulation_hz = 0.0;
};

// Throws InvalidArgument on duration <= 0, DOA outside [-90, 90], power <= 0
// or band edges that violate 0 <= f_lo < f_hi.
void validate(const SourceSpec& spec);

// Sinusoid of amplitude sqrt(2 P); white Gaussian of variance P; bandlimited
// noise filtered to [f_lo, f_hi] and rescaled to mean square P. Throws
// InvalidArgument when fs <= 2 x the highest requested frequency.
std::vector<double> generate_source(const SourceSpec& spec, double sample_rate,
                                    std::uint64_t seed);

// Samples trimmed from each end of a propagated signal:
// ceil(max_n |d_1n| fs / c). Depends on the geometry only, so every scene for
// one array has the same length.
std::size_t propagation_guard(const ArrayGeometry& geometry, double sample_rate);

// Channel n is the source delayed by tau_1n(theta) fs samples, applied as a
// linear phase over the full-length DFT (exact under periodic extension),
// with propagation_guard samples trimmed from both ends. Channels with zero
// delay are copied, not transformed.
MultichannelSignal propagate_freefield(std::span<const double> samples,
                                       const ArrayGeometry& geometry, double theta_deg,
                                       double sample_rate);

// Samplewise sum. Throws InvalidArgument on channel/length/rate mismatch.
MultichannelSignal mix(std::span<const MultichannelSignal> scenes);

struct NoiseSpec {
  std::optional<double> snr_db;  // empty: noise-free
  std::uint64_t seed = 0;
};

struct NoisySignal {
  MultichannelSignal signal;
  double noise_variance = 0.0;  // time-domain sigma^2 per sensor
};

// Independent zero-mean Gaussian noise per channel with variance
// P_ref / 10^(snr/10), P_ref the mean square of channel 1. Throws
// InvalidArgument for a zero-power signal.
NoisySignal add_noise(const MultichannelSignal& signal, const NoiseSpec& spec);

// Independent sub-seed for stream `stream` of a scene seeded with `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

}  // namespace dubf
