#pragma once

// Experiment configuration: a JSON document validated against a fixed schema.
// Unknown keys are rejected; every field is checked against the owning
// module's preconditions at load time. Errors are ConfigError with the JSON
// path of the offending field (or the parse position for malformed text).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dubf/array_model.hpp"
#include "dubf/beamformers.hpp"
#include "dubf/simulator.hpp"
#include "dubf/spectral.hpp"

namespace dubf {

// Where du-sigma takes its noise power from.
struct Sigma2Choice {
  enum class Kind { kTruth, kProvided, kNone };
  Kind kind = Kind::kTruth;
  double value = 0.0;  // time-domain sigma^2 when kProvided

  // "truth", "none" or a non-negative number. Throws ConfigError.
  static Sigma2Choice parse(std::string_view text);
};

enum class PhatMode {
  kAveraged,     // normalize the averaged PSD entrywise
  kPerSnapshot,  // normalize each snapshot before averaging
};

enum class SweepAxis { kSnrDb, kSnapshots };

std::string_view sweep_axis_name(SweepAxis a) noexcept;

struct ExperimentConfig {
  // array
  std::optional<double> spacing_m = 0.07;
  std::size_t sensors = 8;
  std::optional<std::vector<double>> spacings_m;  // overrides spacing/sensors
  double speed_of_sound = kDefaultSpeedOfSound;

  // front end
  double sample_rate = 44100.0;
  std::size_t fft_size = 2048;
  std::size_t hop = 1536;  // L - 512
  Window window = Window::kHann;
  double f_min = 80.0;
  double f_max = 8000.0;
  double grid_step_deg = 1.0;
  std::size_t snapshots = 10;

  // localization
  Method method = Method::kDu;
  std::vector<Method> methods{Method::kSrp, Method::kSrpPhat, Method::kDu, Method::kMvdr,
                              Method::kMusic};
  double beta = 1.0;
  double delta = kDefaultLoadingConstant;
  std::size_t source_count = 1;
  Sigma2Choice sigma2;
  PhatMode phat = PhatMode::kAveraged;
  double min_separation_deg = 5.0;

  // scene
  std::vector<SourceSpec> sources;
  std::optional<double> snr_db = 20.0;  // empty: noise-free

  // sweep
  SweepAxis axis = SweepAxis::kSnrDb;
  std::vector<double> axis_values{-20, -15, -10, -5, 0, 5, 10, 15, 20};
  std::size_t trials = 50;

  std::uint64_t seed = 1;

  ArrayGeometry geometry() const;
  DoaGrid grid() const;
  BinRange bins() const;
  MethodParams method_params() const;

  // Cross-field checks (geometry, band vs fs, L power of two, ...). Throws
  // ConfigError naming the field.
  void validate() const;
};

ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace dubf
