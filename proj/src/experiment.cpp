#include "dubf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <nlohmann/json.hpp>
#include <numeric>
#include <thread>

#include "dubf/csv.hpp"
#include "dubf/errors.hpp"
#include "dubf/simulator.hpp"

namespace dubf {

namespace {

using nlohmann::json;

ExperimentConfig at_axis_value(const ExperimentConfig& config, double v) {
  ExperimentConfig c = config;
  if (config.axis == SweepAxis::kSnrDb)
    c.snr_db = v;
  else
    c.snapshots = static_cast<std::size_t>(v);
  return c;
}

double fusion_beta(const ExperimentConfig& config, Method method) {
  return method == Method::kSrpPhat ? 0.0 : config.beta;
}

std::vector<double> to_db(const std::vector<double>& power) {
  const double peak = *std::max_element(power.begin(), power.end());
  std::vector<double> out(power.size());
  for (std::size_t k = 0; k < power.size(); ++k)
    out[k] = 10.0 * std::log10(std::max(power[k], peak * 1e-30) / peak);
  return out;
}

}  // namespace

Scene simulate_scene(const ExperimentConfig& config, std::uint64_t seed) {
  if (config.sources.empty()) throw ConfigError("config: scene.sources: at least one source needed");
  const ArrayGeometry geometry = config.geometry();
  std::vector<MultichannelSignal> parts;
  std::vector<double> doas;
  for (std::size_t k = 0; k < config.sources.size(); ++k) {
    const SourceSpec& s = config.sources[k];
    const std::vector<double> samples = generate_source(s, config.sample_rate, derive_seed(seed, k));
    parts.push_back(propagate_freefield(samples, geometry, s.doa_deg, config.sample_rate));
    doas.push_back(s.doa_deg);
  }
  NoisySignal noisy = add_noise(mix(parts), {config.snr_db, derive_seed(seed, kNoiseStream)});
  return {std::move(noisy.signal), noisy.noise_variance, std::move(doas), seed};
}

std::string truth_json(const ExperimentConfig& config, const Scene& scene) {
  const ArrayGeometry g = config.geometry();
  json j;
  j["doas_deg"] = scene.doas_deg;
  j["sigma2"] = scene.noise_variance;
  j["seed"] = scene.seed;
  j["sample_rate"] = config.sample_rate;
  j["snr_db"] = config.snr_db ? json(*config.snr_db) : json(nullptr);
  j["geometry"] = {{"spacings_m", std::vector<double>(g.spacings().begin(), g.spacings().end())},
                   {"speed_of_sound", g.speed_of_sound()}};
  return j.dump(2) + "\n";
}

Truth parse_truth(std::string_view json_text) {
  try {
    const json j = json::parse(json_text);
    Truth t;
    t.doas_deg = j.at("doas_deg").get<std::vector<double>>();
    t.sigma2 = j.at("sigma2").get<double>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.sample_rate = j.at("sample_rate").get<double>();
    if (!j.at("snr_db").is_null()) t.snr_db = j.at("snr_db").get<double>();
    t.spacings_m = j.at("geometry").at("spacings_m").get<std::vector<double>>();
    t.speed_of_sound = j.at("geometry").at("speed_of_sound").get<double>();
    return t;
  } catch (const json::exception& e) {
    throw DataError(std::string("truth sidecar: ") + e.what());
  }
}

double psd_noise_level(const ExperimentConfig& config, double sigma2_time) {
  return sigma2_time * window_energy(config.window, config.fft_size);
}

Pipeline::Pipeline(const ExperimentConfig& config)
    : config_(config),
      geometry_(config.geometry()),
      steering_(geometry_, config.fft_size, config.sample_rate, config.bins(), config.grid()) {}

SnapshotSpectra Pipeline::analyze(const MultichannelSignal& signal) const {
  if (signal.channels() != geometry_.sensors())
    throw ConfigError("signal has " + std::to_string(signal.channels()) +
                      " channels but the array has " + std::to_string(geometry_.sensors()) +
                      " sensors");
  return stft(signal, config_.fft_size, config_.hop, config_.window);
}

BroadbandSpectrum Pipeline::window_spectrum(const SnapshotSpectra& snapshots, Method method,
                                            std::size_t end_frame, std::size_t snapshot_count,
                                            std::optional<double> sigma2_time) const {
  const bool per_snapshot_phat =
      method == Method::kSrpPhat && config_.phat == PhatMode::kPerSnapshot;
  const PsdTable table =
      estimate_psd(snapshots, end_frame, snapshot_count, bins(),
                   per_snapshot_phat ? PsdKind::kPhaseOnly : PsdKind::kPlain);

  MethodParams params = config_.method_params();
  if (method == Method::kDuSigma) params.noise_power = psd_noise_level(config_, sigma2_time.value_or(0.0));

  std::vector<NarrowbandSpectrum> spectra;
  if (per_snapshot_phat) {
    spectra = narrowband_spectra(Method::kSrp, table, params, steering_);
    for (auto& s : spectra) s.method = Method::kSrpPhat;
  } else {
    spectra = narrowband_spectra(method, table, params, steering_);
  }
  return fuse(spectra, fusion_beta(config_, method));
}

std::vector<std::size_t> window_ends(std::size_t frames, std::size_t snapshot_count) {
  std::vector<std::size_t> ends;
  if (snapshot_count == 0) return ends;
  for (std::size_t e = snapshot_count - 1; e < frames; e += snapshot_count) ends.push_back(e);
  return ends;
}

Localization localize(const Pipeline& pipeline, const MultichannelSignal& signal, Method method,
                      std::optional<double> sigma2_time,
                      std::optional<std::size_t> report_frame) {
  const ExperimentConfig& config = pipeline.config();
  const std::size_t m = config.snapshots;
  const SnapshotSpectra snaps = pipeline.analyze(signal);
  const std::vector<std::size_t> ends = window_ends(snaps.frames(), m);
  if (ends.empty())
    throw DataError("signal has " + std::to_string(snaps.frames()) + " STFT frames, need " +
                    std::to_string(m) + " for one PSD window (short by " +
                    std::to_string(m - snaps.frames()) + ")");

  Localization out;
  out.reported_end_frame = report_frame.value_or(ends.front());
  bool reported = false;
  for (std::size_t e : ends) {
    BroadbandSpectrum s = pipeline.window_spectrum(snaps, method, e, m, sigma2_time);
    out.windows.push_back({e, locate(s.values, pipeline.grid(), config.source_count,
                                     config.min_separation_deg)});
    if (e == out.reported_end_frame) {
      out.spectrum = std::move(s);
      reported = true;
    }
  }
  if (!reported)
    out.spectrum = pipeline.window_spectrum(snaps, method, out.reported_end_frame, m, sigma2_time);
  return out;
}

std::optional<double> sigma2_for(const ExperimentConfig& config,
                                 std::optional<double> truth_sigma2) {
  switch (config.sigma2.kind) {
    case Sigma2Choice::Kind::kTruth:
      if (!truth_sigma2) throw ConfigError("sigma2: 'truth' requested but no truth is available");
      return truth_sigma2;
    case Sigma2Choice::Kind::kProvided:
      return config.sigma2.value;
    case Sigma2Choice::Kind::kNone:
      return std::nullopt;
  }
  return std::nullopt;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, std::size_t threads) {
  if (config.sources.empty()) throw ConfigError("config: scene.sources: at least one source needed");
  if (config.source_count != config.sources.size())
    throw ConfigError("config: source_count (" + std::to_string(config.source_count) +
                      ") must equal the number of scene sources (" +
                      std::to_string(config.sources.size()) + ") for a sweep");
  const Pipeline pipeline(config);
  const std::size_t n_axis = config.axis_values.size();
  const std::size_t n_methods = config.methods.size();
  const std::size_t n_jobs = n_axis * config.trials;

  // errors[job][method]: squared errors of every window of that trial.
  std::vector<std::vector<std::vector<double>>> errors(n_jobs);
  std::vector<std::string> failures(n_jobs);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t job = next++; job < n_jobs; job = next++) {
      const std::size_t a = job / config.trials;
      const std::size_t t = job % config.trials;
      const std::uint64_t seed = config.seed + t;
      try {
        const ExperimentConfig cfg = at_axis_value(config, config.axis_values[a]);
        const Scene scene = simulate_scene(cfg, seed);
        const SnapshotSpectra snaps = pipeline.analyze(scene.signal);
        const std::vector<std::size_t> ends = window_ends(snaps.frames(), cfg.snapshots);
        if (ends.empty())
          throw DataError("scene too short for " + std::to_string(cfg.snapshots) + " snapshots");
        const std::optional<double> s2 = sigma2_for(cfg, scene.noise_variance);
        errors[job].resize(n_methods);
        for (std::size_t k = 0; k < n_methods; ++k)
          for (std::size_t e : ends) {
            const BroadbandSpectrum s =
                pipeline.window_spectrum(snaps, config.methods[k], e, cfg.snapshots, s2);
            const DoaEstimate est =
                locate(s.values, pipeline.grid(), cfg.source_count, cfg.min_separation_deg);
            const std::vector<double> sq = matched_squared_errors(est.angles, scene.doas_deg);
            errors[job][k].insert(errors[job][k].end(), sq.begin(), sq.end());
          }
      } catch (const std::exception& ex) {
        failures[job] = std::string(ex.what());
      }
    }
  };

  const std::size_t n_threads = std::max<std::size_t>(1, std::min(threads, n_jobs));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < n_threads; ++k) pool.emplace_back(worker);
  }

  for (std::size_t job = 0; job < n_jobs; ++job)
    if (!failures[job].empty())
      throw DataError("sweep: trial " + std::to_string(job % config.trials) + " at " +
                      std::string(sweep_axis_name(config.axis)) + "=" +
                      format_double(config.axis_values[job / config.trials]) + " (seed " +
                      std::to_string(config.seed + job % config.trials) +
                      ") failed: " + failures[job]);

  std::vector<SweepRow> rows;
  for (std::size_t a = 0; a < n_axis; ++a)
    for (std::size_t k = 0; k < n_methods; ++k) {
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t t = 0; t < config.trials; ++t) {
        const std::vector<double>& sq = errors[a * config.trials + t][k];
        sum = std::accumulate(sq.begin(), sq.end(), sum);
        count += sq.size();
      }
      rows.push_back({config.axis_values[a], config.methods[k],
                      std::sqrt(sum / static_cast<double>(count)), config.trials});
    }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "axis_value,method,rmse_deg,trials\n";
  for (const SweepRow& r : rows) {
    out += format_double(r.axis_value);
    out += ',';
    out += method_name(r.method);
    out += ',';
    out += format_double(r.rmse_deg);
    out += ',';
    out += std::to_string(r.trials);
    out += '\n';
  }
  return out;
}

Beampattern beampattern(const ExperimentConfig& config, double frequency_hz,
                        double theta0_deg) {
  if (!(frequency_hz >= config.f_min && frequency_hz <= config.f_max))
    throw ConfigError("beampattern: frequency " + format_double(frequency_hz) +
                      " Hz outside the band [" + format_double(config.f_min) + ", " +
                      format_double(config.f_max) + "]");
  if (!(theta0_deg >= -90.0 && theta0_deg <= 90.0))
    throw ConfigError("beampattern: look direction must lie in [-90, 90] degrees");

  const ArrayGeometry geometry = config.geometry();
  const std::size_t bin = static_cast<std::size_t>(
      std::lround(frequency_hz * static_cast<double>(config.fft_size) / config.sample_rate));
  const BinRange one{bin, bin};

  ExperimentConfig scene_cfg = config;
  SourceSpec tone;
  tone.kind = SourceKind::kSinusoid;
  // centred on the analysed bin so the tone's phase matches the steering vectors
  tone.frequency_hz = static_cast<double>(bin) * config.sample_rate / static_cast<double>(config.fft_size);
  tone.doa_deg = theta0_deg;
  tone.power = 1.0;
  const double needed = static_cast<double>(config.fft_size + (config.snapshots - 1) * config.hop +
                                            2 * propagation_guard(geometry, config.sample_rate) + 1);
  tone.duration_s = std::max(1.0, needed / config.sample_rate);
  scene_cfg.sources = {tone};
  const Scene scene = simulate_scene(scene_cfg, config.seed);

  const SnapshotSpectra snaps = stft(scene.signal, config.fft_size, config.hop, config.window);
  const PsdTable table = estimate_psd(snaps, config.snapshots - 1, config.snapshots, one);
  const HermitianMatrix& phi = table.at(bin).phi;

  const SteeringGrid steering(geometry, config.fft_size, config.sample_rate, one, config.grid());
  const CVector a0 =
      steering_vector(geometry, bin, config.fft_size, config.sample_rate, theta0_deg).entries;
  MethodParams params = config.method_params();
  params.sources = 1;

  auto pattern = [&](Method m) {
    const BeamWeights bw = beam_weights(m, phi, params, steering, bin);
    std::vector<double> power(bw.weights.size());
    for (std::size_t t = 0; t < bw.weights.size(); ++t) {
      cdouble r = 0.0;
      for (std::size_t i = 0; i < a0.size(); ++i) r += std::conj(bw.weights[t][i]) * a0[i];
      power[t] = std::norm(r);
    }
    return to_db(power);
  };

  return {config.grid(), bin, pattern(Method::kSrp), pattern(Method::kDu),
          pattern(Method::kMvdr), pattern(Method::kMusic)};
}

std::string beampattern_csv(const Beampattern& p) {
  std::string out = "theta_deg,conventional,du,mvdr,music\n";
  for (std::size_t t = 0; t < p.grid.size(); ++t) {
    for (double v : {p.grid[t], p.conventional[t], p.du[t], p.mvdr[t]}) {
      out += format_double(v);
      out += ',';
    }
    out += format_double(p.music[t]);
    out += '\n';
  }
  return out;
}

}  // namespace dubf
