#include "dubf/config.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <set>

#include "dubf/errors.hpp"

namespace dubf {

namespace {

using nlohmann::json;

[[noreturn]] void reject(const std::string& path, const std::string& why) {
  throw ConfigError("config: " + path + ": " + why);
}

// Reads the members of one JSON object and rejects any key never asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) reject(path_, "expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& at(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string child(const std::string& key) const { return path_ + "." + key; }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) reject(child(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) reject(child(key), "must be finite");
    return d;
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
      reject(child(key), "expected a non-negative integer");
    return v.get<std::size_t>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) reject(child(key), "expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) reject(child(item.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class F>
auto wrap(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InvalidArgument& e) {
    reject(path, e.what());
  }
}

SourceSpec parse_source(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  SourceSpec s;
  s.kind = wrap(r.child("kind"), [&] { return parse_source_kind(r.text("kind", "bandlimited")); });
  s.frequency_hz = r.number("frequency_hz", 0.0);
  s.f_lo_hz = r.number("f_lo_hz", 80.0);
  s.f_hi_hz = r.number("f_hi_hz", 8000.0);
  s.duration_s = r.number("duration_s", 1.0);
  s.doa_deg = r.number("doa_deg", 0.0);
  s.power = r.number("power", 1.0);
  s.modulation_hz = r.number("modulation_hz", 0.0);
  r.finish();
  wrap(path, [&] { validate(s); });
  return s;
}

}  // namespace

Sigma2Choice Sigma2Choice::parse(std::string_view text) {
  if (text == "truth") return {Kind::kTruth, 0.0};
  if (text == "none") return {Kind::kNone, 0.0};
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(text), &used);
    if (used == text.size() && v >= 0.0 && std::isfinite(v)) return {Kind::kProvided, v};
  } catch (const std::exception&) {
  }
  throw ConfigError("sigma2: expected 'truth', 'none' or a non-negative number, got '" +
                    std::string(text) + "'");
}

std::string_view sweep_axis_name(SweepAxis a) noexcept {
  return a == SweepAxis::kSnrDb ? "snr_db" : "snapshots";
}

ArrayGeometry ExperimentConfig::geometry() const {
  return wrap("array", [&] {
    if (spacings_m) return ArrayGeometry(*spacings_m, speed_of_sound);
    return ArrayGeometry::uniform_linear(sensors, spacing_m.value_or(0.0), speed_of_sound);
  });
}

DoaGrid ExperimentConfig::grid() const {
  return wrap("grid_step_deg", [&] { return DoaGrid::uniform(-90.0, 90.0, grid_step_deg); });
}

BinRange ExperimentConfig::bins() const {
  return wrap("band", [&] { return bin_range(sample_rate, fft_size, f_min, f_max); });
}

MethodParams ExperimentConfig::method_params() const {
  MethodParams p;
  p.loading_constant = delta;
  p.fft_size = fft_size;
  p.sources = source_count;
  return p;
}

void ExperimentConfig::validate() const {
  if (!(sample_rate > 0.0)) reject("sample_rate", "must be > 0");
  if (fft_size < 2 || !std::has_single_bit(fft_size))
    reject("fft_size", "must be a power of two >= 2");
  if (hop == 0) reject("hop", "must be >= 1");
  if (snapshots == 0) reject("snapshots", "must be >= 1");
  if (!(beta >= 0.0 && beta <= 1.0)) reject("beta", "must lie in [0, 1]");
  if (!(delta > 0.0)) reject("delta", "must be > 0");
  if (!(min_separation_deg >= 0.0)) reject("min_separation_deg", "must be >= 0");
  if (!(grid_step_deg > 0.0)) reject("grid_step_deg", "must be > 0");
  if (trials == 0) reject("sweep.trials", "must be >= 1");
  if (methods.empty()) reject("methods", "must list at least one method");
  if (axis_values.empty()) reject("sweep.values", "must not be empty");
  if (axis == SweepAxis::kSnapshots)
    for (double v : axis_values)
      if (!(v >= 1.0) || v != std::floor(v))
        reject("sweep.values", "snapshot counts must be positive integers");
  const ArrayGeometry g = geometry();
  if (source_count < 1) reject("source_count", "must be >= 1");
  const bool uses_music =
      method == Method::kMusic ||
      std::find(methods.begin(), methods.end(), Method::kMusic) != methods.end();
  if (uses_music && source_count >= g.sensors())
    reject("source_count", "MUSIC needs source_count < sensor count");
  grid();
  bins();
  for (std::size_t k = 1; k < sources.size(); ++k)
    if (sources[k].duration_s != sources[0].duration_s)
      reject("scene.sources[" + std::to_string(k) + "].duration_s",
             "all sources must share one duration");
  for (std::size_t k = 0; k < sources.size(); ++k) {
    const SourceSpec& s = sources[k];
    const double top = s.kind == SourceKind::kSinusoid      ? s.frequency_hz
                       : s.kind == SourceKind::kBandlimited ? s.f_hi_hz
                                                            : 0.0;
    if (!(sample_rate > 2.0 * top))
      reject("scene.sources[" + std::to_string(k) + "]", "frequency aliases at sample_rate");
  }
}

ExperimentConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: parse error at byte ") + std::to_string(e.byte) +
                      ": " + e.what());
  }

  ExperimentConfig c;
  ObjectReader r(root, "$");

  if (r.has("array")) {
    ObjectReader a(r.at("array"), "$.array");
    if (a.has("spacings_m")) {
      const json& v = a.at("spacings_m");
      if (!v.is_array()) reject("$.array.spacings_m", "expected an array of numbers");
      std::vector<double> d;
      for (const auto& x : v) {
        if (!x.is_number()) reject("$.array.spacings_m", "expected an array of numbers");
        d.push_back(x.get<double>());
      }
      c.spacings_m = std::move(d);
      c.sensors = c.spacings_m->size();
      c.spacing_m.reset();
    } else {
      c.spacing_m = a.number("spacing_m", *c.spacing_m);
      c.sensors = a.count("sensors", c.sensors);
    }
    c.speed_of_sound = a.number("speed_of_sound", c.speed_of_sound);
    a.finish();
  }

  c.sample_rate = r.number("sample_rate", c.sample_rate);
  c.fft_size = r.count("fft_size", c.fft_size);
  c.hop = r.count("hop", c.hop);
  c.window = wrap("$.window", [&] { return parse_window(r.text("window", "hann")); });
  if (r.has("band")) {
    ObjectReader b(r.at("band"), "$.band");
    c.f_min = b.number("f_min", c.f_min);
    c.f_max = b.number("f_max", c.f_max);
    b.finish();
  }
  c.grid_step_deg = r.number("grid_step_deg", c.grid_step_deg);
  c.snapshots = r.count("snapshots", c.snapshots);

  c.method = wrap("$.method", [&] { return parse_method(r.text("method", "du")); });
  if (r.has("methods")) {
    const json& v = r.at("methods");
    if (!v.is_array()) reject("$.methods", "expected an array of method names");
    c.methods.clear();
    for (const auto& m : v) {
      if (!m.is_string()) reject("$.methods", "expected an array of method names");
      c.methods.push_back(wrap("$.methods", [&] { return parse_method(m.get<std::string>()); }));
    }
  }
  c.beta = r.number("beta", c.beta);
  c.delta = r.number("delta", c.delta);
  c.source_count = r.count("source_count", c.source_count);
  if (r.has("sigma2")) {
    const json& v = r.at("sigma2");
    if (v.is_number())
      c.sigma2 = Sigma2Choice::parse(std::to_string(v.get<double>()));
    else if (v.is_string())
      c.sigma2 = Sigma2Choice::parse(v.get<std::string>());
    else
      reject("$.sigma2", "expected 'truth', 'none' or a number");
  }
  {
    const std::string phat = r.text("phat", "averaged");
    if (phat == "averaged")
      c.phat = PhatMode::kAveraged;
    else if (phat == "per_snapshot")
      c.phat = PhatMode::kPerSnapshot;
    else
      reject("$.phat", "expected 'averaged' or 'per_snapshot'");
  }
  c.min_separation_deg = r.number("min_separation_deg", c.min_separation_deg);

  if (r.has("scene")) {
    ObjectReader s(r.at("scene"), "$.scene");
    if (s.has("snr_db")) {
      const json& v = s.at("snr_db");
      if (v.is_null())
        c.snr_db.reset();
      else if (v.is_number())
        c.snr_db = v.get<double>();
      else
        reject("$.scene.snr_db", "expected a number or null (noise-free)");
    }
    if (s.has("sources")) {
      const json& v = s.at("sources");
      if (!v.is_array()) reject("$.scene.sources", "expected an array");
      for (std::size_t k = 0; k < v.size(); ++k)
        c.sources.push_back(parse_source(v[k], "$.scene.sources[" + std::to_string(k) + "]"));
    }
    s.finish();
  }

  if (r.has("sweep")) {
    ObjectReader w(r.at("sweep"), "$.sweep");
    const std::string axis = w.text("axis", "snr_db");
    if (axis == "snr_db")
      c.axis = SweepAxis::kSnrDb;
    else if (axis == "snapshots")
      c.axis = SweepAxis::kSnapshots;
    else
      reject("$.sweep.axis", "expected 'snr_db' or 'snapshots'");
    if (w.has("values")) {
      const json& v = w.at("values");
      if (!v.is_array()) reject("$.sweep.values", "expected an array of numbers");
      c.axis_values.clear();
      for (const auto& x : v) {
        if (!x.is_number()) reject("$.sweep.values", "expected an array of numbers");
        c.axis_values.push_back(x.get<double>());
      }
    } else if (c.axis == SweepAxis::kSnapshots) {
      c.axis_values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    }
    c.trials = w.count("trials", c.trials);
    w.finish();
  }

  if (r.has("seed")) {
    const json& v = r.at("seed");
    if (!v.is_number_unsigned()) reject("$.seed", "expected a non-negative integer");
    c.seed = v.get<std::uint64_t>();
  }
  r.finish();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open '" + path.string() + "'");
  const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return parse_config(text);
}

}  // namespace dubf
