#include "rydreg/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "rydreg/errors.hpp"
#include "rydreg/hash.hpp"

namespace rydreg {

namespace {

void check_keys(const YAML::Node& node, const std::string& where,
                std::initializer_list<std::string_view> allowed) {
  if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out, const std::string& where) {
  const auto v = node[key];
  if (!v) return;
  try {
    out = v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + "." + key + ": bad value");
  }
}

std::vector<LevelId> read_levels(const YAML::Node& node, const std::string& where) {
  std::vector<LevelId> out;
  if (!node.IsSequence()) throw ConfigError(where + ": expected a list of levels");
  for (const auto& item : node) out.push_back(parse_level(item.as<std::string>()));
  return out;
}

// Number, or the word "search" for an empty optional.
void read_time_or_search(const YAML::Node& node, const char* key, std::optional<double>& out,
                         const std::string& where) {
  const auto v = node[key];
  if (!v) return;
  if (v.IsScalar() && v.as<std::string>() == "search") {
    out.reset();
    return;
  }
  try {
    out = v.as<double>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + "." + key + ": expected a time in ps or 'search'");
  }
}

void read_pair(const YAML::Node& node, const char* key, double& lo, double& hi,
               const std::string& where) {
  const auto v = node[key];
  if (!v) return;
  if (!v.IsSequence() || v.size() != 2) throw ConfigError(where + "." + key + ": expected [lo, hi]");
  lo = v[0].as<double>();
  hi = v[1].as<double>();
}

void apply(const YAML::Node& root, ScenarioConfig& c) {
  check_keys(root, "config",
             {"seed", "cache_dir", "basis", "grid", "kick", "register", "reference", "sequence",
              "measurement", "analysis", "hide", "recover", "two_state", "info_sweep"});
  read(root, "seed", c.seed, "config");
  if (root["cache_dir"]) c.cache_dir = root["cache_dir"].as<std::string>();

  if (const auto b = root["basis"]) {
    check_keys(b, "basis",
               {"atom", "defects", "high_l_defect", "n_range", "l_max", "register_n",
                "register_l", "launch", "min_padding", "interior_margins"});
    if (b["atom"]) {
      const auto atom = b["atom"].as<std::string>();
      if (atom == "cesium") c.basis.defects = QuantumDefects::cesium();
      else if (atom == "hydrogen") c.basis.defects = QuantumDefects::hydrogen();
      else c.basis.defects.atom = atom;
    }
    read(b, "defects", c.basis.defects.by_l, "basis");
    read(b, "high_l_defect", c.basis.defects.high_l, "basis");
    if (b["n_range"]) {
      double lo = 0, hi = 0;
      read_pair(b, "n_range", lo, hi, "basis");
      c.basis.n_min = static_cast<int>(lo);
      c.basis.n_max = static_cast<int>(hi);
    }
    read(b, "l_max", c.basis.l_max, "basis");
    read(b, "register_n", c.basis.register_n, "basis");
    read(b, "register_l", c.basis.register_l, "basis");
    if (b["launch"]) c.basis.launch = parse_level(b["launch"].as<std::string>());
    read(b, "min_padding", c.basis.min_padding, "basis");
    if (const auto m = b["interior_margins"]) {
      check_keys(m, "basis.interior_margins", {"n_low", "n_high", "l"});
      read(m, "n_low", c.basis.interior_n_margin_low, "basis.interior_margins");
      read(m, "n_high", c.basis.interior_n_margin_high, "basis.interior_margins");
      read(m, "l", c.basis.interior_l_margin, "basis.interior_margins");
    }
    c.encode = EncodeSpec::equal([&] {
      std::vector<LevelId> lv;
      for (const int n : c.basis.register_n) lv.push_back({n, c.basis.register_l});
      return lv;
    }());
  }

  if (const auto g = root["grid"]) {
    check_keys(g, "grid",
               {"points_per_wavelength", "r_min", "tail_decay", "min_outer_factor",
                "inner_tolerance"});
    read(g, "points_per_wavelength", c.grid.points_per_wavelength, "grid");
    read(g, "r_min", c.grid.r_min, "grid");
    read(g, "tail_decay", c.grid.tail_decay, "grid");
    read(g, "min_outer_factor", c.grid.min_outer_factor, "grid");
    read(g, "inner_tolerance", c.grid.inner_tolerance, "grid");
  }

  if (const auto k = root["kick"]) {
    check_keys(k, "kick", {"q1", "q2", "l_cap", "tolerance"});
    read(k, "q1", c.q1, "kick");
    read(k, "q2", c.q2, "kick");
    read(k, "l_cap", c.kick.l_cap, "kick");
    read(k, "tolerance", c.kick.tolerance, "kick");
  }

  if (const auto r = root["register"]) {
    check_keys(r, "register", {"levels", "amplitudes", "phases_rad"});
    if (r["levels"]) c.encode = EncodeSpec::equal(read_levels(r["levels"], "register.levels"));
    read(r, "amplitudes", c.encode.amplitudes, "register");
    read(r, "phases_rad", c.encode.phases, "register");
  }

  if (const auto r = root["reference"]) {
    check_keys(r, "reference", {"identical", "global_phase_rad", "levels", "amplitudes",
                                "phases_rad"});
    read(r, "identical", c.reference_identical, "reference");
    read(r, "global_phase_rad", c.reference_phase, "reference");
    if (!c.reference_identical) {
      if (!r["levels"]) throw ConfigError("reference: levels required when not identical");
      c.reference.levels = read_levels(r["levels"], "reference.levels");
      std::vector<double> amps(c.reference.levels.size(),
                               1.0 / std::sqrt(static_cast<double>(c.reference.levels.size())));
      std::vector<double> phases(c.reference.levels.size(), 0.0);
      read(r, "amplitudes", amps, "reference");
      read(r, "phases_rad", phases, "reference");
      if (amps.size() != c.reference.levels.size() || phases.size() != c.reference.levels.size())
        throw ConfigError("reference: levels, amplitudes and phases differ in length");
      c.reference.amplitudes.clear();
      for (std::size_t i = 0; i < amps.size(); ++i)
        c.reference.amplitudes.push_back(std::polar(amps[i], phases[i]));
    }
  }

  if (const auto s = root["sequence"]) {
    check_keys(s, "sequence", {"t_meas_delay_ps"});
    read(s, "t_meas_delay_ps", c.t_meas_delay_ps, "sequence");
  }

  if (const auto m = root["measurement"]) {
    check_keys(m, "measurement", {"sigma_n", "shots", "merge_window_au", "clip_negative", "tau"});
    read(m, "sigma_n", c.sigma_n, "measurement");
    read(m, "shots", c.shots, "measurement");
    read(m, "merge_window_au", c.merge_window_au, "measurement");
    read(m, "clip_negative", c.clip_negative, "measurement");
    if (const auto t = m["tau"]) {
      check_keys(t, "measurement.tau", {"start_ps", "spacing_ps", "count", "window_fs", "step_fs"});
      double start = c.tau.centers_ps.front();
      double spacing = c.tau.centers_ps.size() > 1 ? c.tau.centers_ps[1] - start : 0.25;
      std::size_t count = c.tau.centers_ps.size();
      double window_fs = c.tau.window_ps * 1e3;
      double step_fs = c.tau.step_ps * 1e3;
      read(t, "start_ps", start, "measurement.tau");
      read(t, "spacing_ps", spacing, "measurement.tau");
      read(t, "count", count, "measurement.tau");
      read(t, "window_fs", window_fs, "measurement.tau");
      read(t, "step_fs", step_fs, "measurement.tau");
      c.tau = TauGrid::regular(start, spacing, count, window_fs * 1e-3, step_fs * 1e-3);
    }
  }

  if (const auto a = root["analysis"]) {
    check_keys(a, "analysis", {"bootstrap", "vanish_factor", "seed", "uncertainty"});
    if (a["uncertainty"]) c.fit.uncertainty = parse_phase_uncertainty(a["uncertainty"].as<std::string>());
    read(a, "bootstrap", c.fit.bootstrap, "analysis");
    read(a, "vanish_factor", c.fit.vanish_factor, "analysis");
    read(a, "seed", c.fit.seed, "analysis");
  }

  if (const auto h = root["hide"]) {
    check_keys(h, "hide", {"target", "t1_ps", "search_ps", "step_ps"});
    if (h["target"]) c.hide.target = parse_level(h["target"].as<std::string>());
    read_time_or_search(h, "t1_ps", c.hide.t1_ps, "hide");
    read_pair(h, "search_ps", c.hide.search_lo_ps, c.hide.search_hi_ps, "hide");
    read(h, "step_ps", c.hide.search_step_ps, "hide");
  }

  if (const auto r = root["recover"]) {
    check_keys(r, "recover", {"t2_delay_ps", "inverse_diagnostic"});
    read(r, "t2_delay_ps", c.recover.t2_delay_ps, "recover");
    read(r, "inverse_diagnostic", c.recover.inverse_diagnostic, "recover");
  }

  if (const auto t = root["two_state"]) {
    check_keys(t, "two_state", {"levels", "target", "t1_ps", "search_ps", "t2_ps"});
    if (t["levels"]) c.two_state.levels = read_levels(t["levels"], "two_state.levels");
    if (t["target"]) c.two_state.target = parse_level(t["target"].as<std::string>());
    read_time_or_search(t, "t1_ps", c.two_state.t1_ps, "two_state");
    read_pair(t, "search_ps", c.two_state.search_lo_ps, c.two_state.search_hi_ps, "two_state");
    read(t, "t2_ps", c.two_state.t2_ps, "two_state");
  }

  if (const auto s = root["info_sweep"]) {
    check_keys(s, "info_sweep", {"t1_ps", "t2_start_delay_ps", "t2_stop_delay_ps", "t2_step_ps"});
    read_time_or_search(s, "t1_ps", c.sweep.t1_ps, "info_sweep");
    read(s, "t2_start_delay_ps", c.sweep.t2_start_delay_ps, "info_sweep");
    read(s, "t2_stop_delay_ps", c.sweep.t2_stop_delay_ps, "info_sweep");
    read(s, "t2_step_ps", c.sweep.t2_step_ps, "info_sweep");
  }
}

void validate(const ScenarioConfig& c) {
  if (c.shots == 0) throw ConfigError("measurement.shots must be positive");
  if (c.sigma_n < 0.0) throw ConfigError("measurement.sigma_n must be non-negative");
  if (c.tau.centers_ps.empty()) throw ConfigError("measurement.tau.count must be positive");
  if (c.tau.centers_ps.front() - 0.5 * c.tau.window_ps < 0.0)
    throw ConfigError("measurement.tau: first window reaches negative delays");
  if (!(c.t_meas_delay_ps > 0.0)) throw ConfigError("sequence.t_meas_delay_ps must be positive");
  if (c.hide.search_step_ps > 0.05 || !(c.hide.search_step_ps > 0.0))
    throw ConfigError("hide.step_ps must lie in (0, 0.05]");
  if (!(c.hide.search_hi_ps > c.hide.search_lo_ps) || !(c.hide.search_lo_ps > 0.0))
    throw ConfigError("hide.search_ps must be an increasing positive interval");
  if (!(c.recover.t2_delay_ps > 0.0)) throw ConfigError("recover.t2_delay_ps must be positive");
  if (!(c.sweep.t2_step_ps > 0.0) || c.sweep.t2_stop_delay_ps < c.sweep.t2_start_delay_ps ||
      !(c.sweep.t2_start_delay_ps > 0.0))
    throw ConfigError("info_sweep: bad T2 grid");
  if (c.encode.amplitudes.size() != c.encode.levels.size() ||
      c.encode.phases.size() != c.encode.levels.size())
    throw ConfigError("register: levels, amplitudes and phases differ in length");
}

}  // namespace

ReferenceSpec ScenarioConfig::readout_reference() const {
  if (!reference_identical) {
    ReferenceSpec r = reference;
    r.global_phase = reference_phase;
    return r;
  }
  return ReferenceSpec::identical_to(encode, reference_phase);
}

std::uint64_t ScenarioConfig::hash() const {
  Fnv1a h;
  h.add(basis.n_min);
  h.add(basis.n_max);
  h.add(basis.l_max);
  for (const int n : basis.register_n) h.add(n);
  h.add(basis.register_l);
  h.add(std::string_view(basis.defects.atom));
  for (const double d : basis.defects.by_l) h.add(d);
  h.add(basis.defects.high_l);
  h.add(basis.launch.n);
  h.add(basis.launch.l);
  h.add(basis.min_padding);
  h.add(basis.interior_n_margin_low);
  h.add(basis.interior_n_margin_high);
  h.add(basis.interior_l_margin);
  h.add(grid.points_per_wavelength);
  h.add(grid.r_min);
  h.add(grid.tail_decay);
  h.add(grid.min_outer_factor);
  h.add(grid.inner_tolerance);
  h.add(kick.l_cap);
  h.add(kick.tolerance);
  h.add(q1);
  h.add(q2);
  for (std::size_t i = 0; i < encode.levels.size(); ++i) {
    h.add(encode.levels[i].n);
    h.add(encode.levels[i].l);
    h.add(encode.amplitudes[i]);
    h.add(encode.phases[i]);
  }
  const auto ref = readout_reference();
  for (std::size_t i = 0; i < ref.levels.size(); ++i) {
    h.add(ref.levels[i].n);
    h.add(ref.levels[i].l);
    h.add(ref.amplitudes[i].real());
    h.add(ref.amplitudes[i].imag());
  }
  h.add(ref.global_phase);
  h.add(t_meas_delay_ps);
  h.add(sigma_n);
  h.add(static_cast<std::uint64_t>(shots));
  h.add(merge_window_au);
  h.add(static_cast<std::uint64_t>(clip_negative));
  for (const double t : tau.centers_ps) h.add(t);
  h.add(tau.window_ps);
  h.add(tau.step_ps);
  h.add(static_cast<std::uint64_t>(fit.bootstrap));
  h.add(fit.seed);
  h.add(fit.vanish_factor);
  h.add(static_cast<std::uint64_t>(fit.uncertainty));
  h.add(hide.target.n);
  h.add(hide.target.l);
  h.add(hide.t1_ps.value_or(-1.0));
  h.add(hide.search_lo_ps);
  h.add(hide.search_hi_ps);
  h.add(hide.search_step_ps);
  h.add(recover.t2_delay_ps);
  h.add(static_cast<std::uint64_t>(recover.inverse_diagnostic));
  for (const auto& l : two_state.levels) {
    h.add(l.n);
    h.add(l.l);
  }
  h.add(two_state.target.n);
  h.add(two_state.target.l);
  h.add(two_state.t1_ps.value_or(-1.0));
  h.add(two_state.search_lo_ps);
  h.add(two_state.search_hi_ps);
  h.add(two_state.t2_ps);
  h.add(sweep.t1_ps.value_or(-1.0));
  h.add(sweep.t2_start_delay_ps);
  h.add(sweep.t2_stop_delay_ps);
  h.add(sweep.t2_step_ps);
  h.add(seed);
  return h.value();
}

ScenarioConfig default_config() {
  ScenarioConfig c;
  std::vector<LevelId> levels;
  for (const int n : c.basis.register_n) levels.push_back({n, c.basis.register_l});
  c.encode = EncodeSpec::equal(levels);
  return c;
}

ScenarioConfig parse_config(const std::string& yaml_text) {
  ScenarioConfig c = default_config();
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  if (root.IsNull()) return c;
  try {
    apply(root, c);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace rydreg
