// dubf: simulate scenes, localize sources, dump beampatterns and run
// Monte-Carlo sweeps. Exit status: 0 success, 2 usage/config, 3 data/runtime.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "dubf/config.hpp"
#include "dubf/csv.hpp"
#include "dubf/errors.hpp"
#include "dubf/experiment.hpp"
#include "dubf/fusion.hpp"
#include "dubf/wav.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

struct Options {
  std::string config_path;
  std::optional<std::string> method;
  std::optional<std::size_t> snapshots;
  std::optional<double> beta;
  std::optional<double> delta;
  std::optional<std::size_t> sources;
  std::optional<std::string> sigma2;
  std::optional<double> grid_step;
  std::optional<double> fmin;
  std::optional<double> fmax;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> out;
  std::size_t threads = 1;
  std::optional<std::size_t> frame;
  double freq = 1000.0;
  double doa = -18.0;
  std::string wav;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment config");
  cmd->add_option("--method", o.method, "srp, srp-phat, du, du-sigma, mvdr or music");
  cmd->add_option("--snapshots", o.snapshots, "snapshots M per PSD estimate");
  cmd->add_option("--beta", o.beta, "fusion normalization exponent in [0, 1]");
  cmd->add_option("--delta", o.delta, "MVDR loading constant");
  cmd->add_option("--sources", o.sources, "number of sources S");
  cmd->add_option("--sigma2", o.sigma2, "du-sigma noise power: truth, none or a value");
  cmd->add_option("--grid-step", o.grid_step, "DOA grid step in degrees");
  cmd->add_option("--fmin", o.fmin, "lowest frequency in Hz");
  cmd->add_option("--fmax", o.fmax, "highest frequency in Hz");
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--trials", o.trials, "Monte-Carlo trials");
  cmd->add_option("--out", o.out, "output path");
}

dubf::ExperimentConfig build_config(const Options& o) {
  dubf::ExperimentConfig c =
      o.config_path.empty() ? dubf::ExperimentConfig{} : dubf::load_config(o.config_path);
  if (o.method) {
    try {
      c.method = dubf::parse_method(*o.method);
    } catch (const dubf::InvalidArgument& e) {
      throw dubf::ConfigError(std::string("--method: ") + e.what());
    }
    c.methods = {c.method};
  }
  if (o.snapshots) c.snapshots = *o.snapshots;
  if (o.beta) c.beta = *o.beta;
  if (o.delta) c.delta = *o.delta;
  if (o.sources) c.source_count = *o.sources;
  if (o.sigma2) c.sigma2 = dubf::Sigma2Choice::parse(*o.sigma2);
  if (o.grid_step) c.grid_step_deg = *o.grid_step;
  if (o.fmin) c.f_min = *o.fmin;
  if (o.fmax) c.f_max = *o.fmax;
  if (o.seed) c.seed = *o.seed;
  if (o.trials) c.trials = *o.trials;
  c.validate();
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw dubf::DataError("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw dubf::DataError("write failed for '" + path.string() + "'");
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw dubf::DataError("cannot read '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void emit(const Options& o, const std::string& text) {
  if (o.out)
    write_text(*o.out, text);
  else
    std::cout << text;
}

fs::path sidecar_path(const fs::path& wav) {
  fs::path p = wav;
  return p.replace_extension(".truth.json");
}

int cmd_simulate(const Options& o) {
  const dubf::ExperimentConfig c = build_config(o);
  const dubf::Scene scene = dubf::simulate_scene(c, c.seed);
  const fs::path wav = o.out.value_or("scene.wav");
  dubf::write_wav(wav, scene.signal);
  write_text(sidecar_path(wav), dubf::truth_json(c, scene));
  std::cout << "wrote " << wav.string() << " (" << scene.signal.channels() << " channels, "
            << scene.signal.length() << " samples) and " << sidecar_path(wav).string() << '\n';
  return 0;
}

int cmd_localize(const Options& o) {
  const dubf::ExperimentConfig c = build_config(o);
  const dubf::MultichannelSignal signal = dubf::read_wav(o.wav);
  if (signal.sample_rate() != c.sample_rate)
    throw dubf::ConfigError("WAV sample rate " + dubf::format_double(signal.sample_rate()) +
                            " differs from config sample_rate " +
                            dubf::format_double(c.sample_rate));

  std::optional<double> truth_sigma2;
  const fs::path sidecar = sidecar_path(o.wav);
  if (fs::exists(sidecar)) truth_sigma2 = dubf::parse_truth(read_text(sidecar)).sigma2;
  std::optional<double> s2;
  if (c.method == dubf::Method::kDuSigma) s2 = dubf::sigma2_for(c, truth_sigma2);

  const dubf::Pipeline pipeline(c);
  const dubf::Localization loc = dubf::localize(pipeline, signal, c.method, s2, o.frame);
  for (const auto& w : loc.windows) {
    std::cout << "end_frame=" << w.end_frame << " doa_deg=";
    for (std::size_t k = 0; k < w.doa.angles.size(); ++k)
      std::cout << (k ? " " : "") << dubf::format_double(w.doa.angles[k]);
    std::cout << '\n';
  }
  fs::path csv = o.out ? fs::path(*o.out) : fs::path(o.wav).replace_extension(".spectrum.csv");
  write_text(csv, dubf::spectrum_csv(loc.spectrum.values, pipeline.grid()));
  return 0;
}

int cmd_beampattern(const Options& o) {
  const dubf::ExperimentConfig c = build_config(o);
  emit(o, dubf::beampattern_csv(dubf::beampattern(c, o.freq, o.doa)));
  return 0;
}

int cmd_sweep(const Options& o) {
  const dubf::ExperimentConfig c = build_config(o);
  emit(o, dubf::sweep_csv(dubf::run_sweep(c, o.threads)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diagonal-unloading beamforming experiments"};
  app.require_subcommand(1);
  Options o;

  CLI::App* simulate = app.add_subcommand("simulate", "write a simulated scene WAV and truth sidecar");
  add_common(simulate, o);

  CLI::App* localize = app.add_subcommand("localize", "estimate DOAs from a WAV file");
  add_common(localize, o);
  localize->add_option("wav", o.wav, "multichannel WAV")->required();
  localize->add_option("--frame", o.frame, "end frame of the window whose spectrum is written");

  CLI::App* beampattern = app.add_subcommand("beampattern", "beampattern table in dB");
  add_common(beampattern, o);
  beampattern->add_option("--freq", o.freq, "frequency in Hz")->capture_default_str();
  beampattern->add_option("--doa", o.doa, "look direction in degrees")->capture_default_str();

  CLI::App* sweep = app.add_subcommand("sweep", "Monte-Carlo RMSE sweep");
  add_common(sweep, o);
  sweep->add_option("--threads", o.threads, "worker threads")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(o);
    if (*localize) return cmd_localize(o);
    if (*beampattern) return cmd_beampattern(o);
    return cmd_sweep(o);
  } catch (const dubf::ConfigError& e) {
    std::cerr << "dubf: " << e.what() << '\n';
    return kExitUsage;
  } catch (const dubf::InvalidArgument& e) {
    std::cerr << "dubf: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "dubf: " << e.what() << '\n';
    return kExitData;
  }
}
