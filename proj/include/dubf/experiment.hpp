#pragma once

// Experiment orchestration shared by the CLI and the acceptance checks: scene
// synthesis from a config, windowed localization, Monte-Carlo sweeps and
// beampattern tables.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dubf/array_model.hpp"
#include "dubf/beamformers.hpp"
#include "dubf/config.hpp"
#include "dubf/fusion.hpp"
#include "dubf/spectral.hpp"

namespace dubf {

struct Scene {
  MultichannelSignal signal;
  double noise_variance = 0.0;  // time-domain sigma^2
  std::vector<double> doas_deg;
  std::uint64_t seed = 0;
};

// Source k uses derive_seed(seed, k), the noise derive_seed(seed, kNoiseStream).
inline constexpr std::uint64_t kNoiseStream = 1000;

// Throws ConfigError when the config has no sources.
Scene simulate_scene(const ExperimentConfig& config, std::uint64_t seed);

// Sidecar written next to a simulated WAV.
struct Truth {
  std::vector<double> doas_deg;
  double sigma2 = 0.0;
  std::uint64_t seed = 0;
  double sample_rate = 0.0;
  std::optional<double> snr_db;
  std::vector<double> spacings_m;
  double speed_of_sound = 0.0;
};

std::string truth_json(const ExperimentConfig& config, const Scene& scene);
// Throws DataError on malformed text.
Truth parse_truth(std::string_view json_text);

// Time-domain noise variance to PSD-domain level for the config's window.
double psd_noise_level(const ExperimentConfig& config, double sigma2_time);

// Geometry, grid, band and steering table for one config, reused across
// windows and trials. Read-only after construction.
class Pipeline {
 public:
  explicit Pipeline(const ExperimentConfig& config);

  const ExperimentConfig& config() const noexcept { return config_; }
  const ArrayGeometry& geometry() const noexcept { return geometry_; }
  const DoaGrid& grid() const noexcept { return steering_.grid(); }
  const BinRange& bins() const noexcept { return steering_.bins(); }
  const SteeringGrid& steering() const noexcept { return steering_; }

  SnapshotSpectra analyze(const MultichannelSignal& signal) const;

  // Fused spectrum of the M-frame window ending at end_frame. sigma2_time is
  // used by du-sigma only; empty means zero (plain DU).
  BroadbandSpectrum window_spectrum(const SnapshotSpectra& snapshots, Method method,
                                    std::size_t end_frame, std::size_t snapshot_count,
                                    std::optional<double> sigma2_time) const;

 private:
  ExperimentConfig config_;
  ArrayGeometry geometry_;
  SteeringGrid steering_;
};

// M-1, 2M-1, ... up to the last frame: non-overlapping PSD windows.
std::vector<std::size_t> window_ends(std::size_t frames, std::size_t snapshot_count);

struct WindowEstimate {
  std::size_t end_frame = 0;
  DoaEstimate doa;
};

struct Localization {
  std::vector<WindowEstimate> windows;
  BroadbandSpectrum spectrum;  // of the reported window
  std::size_t reported_end_frame = 0;
};

// Runs every window; reports the spectrum of report_frame (default: first
// window). Throws DataError when the signal is too short for one window.
Localization localize(const Pipeline& pipeline, const MultichannelSignal& signal, Method method,
                      std::optional<double> sigma2_time,
                      std::optional<std::size_t> report_frame = std::nullopt);

// Noise variance handed to du-sigma for a given config and known truth.
std::optional<double> sigma2_for(const ExperimentConfig& config,
                                 std::optional<double> truth_sigma2);

struct SweepRow {
  double axis_value = 0.0;
  Method method = Method::kDu;
  double rmse_deg = 0.0;
  std::size_t trials = 0;
};

// Trial t uses seed config.seed + t at every axis value. Rows come out in
// (axis value, method) order regardless of thread count. A failed trial
// aborts the sweep with a DataError naming its seed.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config, std::size_t threads = 1);
std::string sweep_csv(const std::vector<SweepRow>& rows);

struct Beampattern {
  DoaGrid grid;
  std::size_t bin = 0;
  // dB, max-normalized: conventional, du, mvdr, music.
  std::vector<double> conventional, du, mvdr, music;
};

// Scene: one noisy sinusoid at the centre of f's bin from theta0 (config SNR,
// config M). Pattern for look direction theta is |w(theta)^H a(theta0)|^2.
Beampattern beampattern(const ExperimentConfig& config, double frequency_hz,
                        double theta0_deg);
std::string beampattern_csv(const Beampattern& pattern);

}  // namespace dubf
