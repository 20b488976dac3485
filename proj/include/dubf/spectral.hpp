#pragma once

// STFT front end and per-bin snapshot PSD estimation.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dubf/array_model.hpp"
#include "dubf/linalg.hpp"

namespace dubf {

// N equal-length real channels at a common sample rate.
class MultichannelSignal {
 public:
  MultichannelSignal(std::vector<std::vector<double>> channels, double sample_rate);

  std::size_t channels() const noexcept { return channels_.size(); }
  std::size_t length() const noexcept { return channels_.empty() ? 0 : channels_[0].size(); }
  double sample_rate() const noexcept { return fs_; }
  std::span<const double> channel(std::size_t n) const { return channels_.at(n); }
  std::span<double> channel(std::size_t n) { return channels_.at(n); }

 private:
  std::vector<std::vector<double>> channels_;
  double fs_;
};

enum class Window { kHann, kRectangular };

// "hann" or "rectangular"; throws InvalidArgument otherwise.
Window parse_window(std::string_view name);
std::string_view window_name(Window w) noexcept;
// Periodic Hann or all-ones, length L.
std::vector<double> window_coefficients(Window w, std::size_t length);
// sum_n w[n]^2. White noise of variance s2 in the time domain appears with
// level s2 * window_energy on the diagonal of the STFT-domain PSD.
double window_energy(Window w, std::size_t length);

// Per-frame, per-bin sensor vectors for bins 0..L/2.
class SnapshotSpectra {
 public:
  SnapshotSpectra(std::size_t frames, std::size_t channels, std::size_t fft_size,
                  std::size_t hop);

  std::size_t frames() const noexcept { return frames_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t fft_size() const noexcept { return fft_size_; }
  std::size_t hop() const noexcept { return hop_; }
  std::size_t bins() const noexcept { return fft_size_ / 2 + 1; }

  // x(frame, bin): length-N sensor vector.
  std::span<const cdouble> snapshot(std::size_t frame, std::size_t bin) const;
  std::span<cdouble> snapshot(std::size_t frame, std::size_t bin);

 private:
  std::size_t frames_, channels_, fft_size_, hop_;
  std::vector<cdouble> data_;
};

// Frame k covers samples [k hop, k hop + L). Throws DataError when the signal
// is shorter than one frame, InvalidArgument for non-power-of-two L or hop 0.
SnapshotSpectra stft(const MultichannelSignal& signal, std::size_t fft_size, std::size_t hop,
                     Window window);

// floor((length - L) / hop) + 1, or 0 when length < L.
std::size_t frame_count(std::size_t length, std::size_t fft_size, std::size_t hop) noexcept;

struct PsdMatrix {
  HermitianMatrix phi;
  std::size_t snapshot_count = 0;
  std::optional<double> noise_power;  // sigma^2 on the PSD diagonal, if known
};

enum class PsdKind {
  kPlain,      // (1/M) sum x x^H
  kPhaseOnly,  // (1/M) sum x~ x~^H with x~_n = x_n / |x_n| (per-snapshot PHAT)
};

// PSD estimates for each bin of `bins`; bins outside are never materialized.
class PsdTable {
 public:
  PsdTable(BinRange bins, std::vector<PsdMatrix> matrices);

  const BinRange& bins() const noexcept { return bins_; }
  const PsdMatrix& at(std::size_t bin) const;
  std::span<const PsdMatrix> matrices() const noexcept { return matrices_; }

 private:
  BinRange bins_;
  std::vector<PsdMatrix> matrices_;
};

// Phi(f) = (1/M) sum_{p=0}^{M-1} x(k-p, f) x(k-p, f)^H for k = end_frame.
// Throws DataError naming the shortfall when fewer than M frames end at k.
PsdTable estimate_psd(const SnapshotSpectra& snapshots, std::size_t end_frame,
                      std::size_t snapshot_count, BinRange bins,
                      PsdKind kind = PsdKind::kPlain,
                      std::optional<double> noise_power = std::nullopt);

// Bins ceil(f_min L / fs) .. floor(f_max L / fs). Throws InvalidArgument when
// the band is invalid or contains no bin.
BinRange bin_range(double sample_rate, std::size_t fft_size, double f_min, double f_max);

}  // namespace dubf
