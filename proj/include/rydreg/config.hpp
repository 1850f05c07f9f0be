#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "rydreg/analysis.hpp"
#include "rydreg/atomic_basis.hpp"
#include "rydreg/kick_operator.hpp"
#include "rydreg/measurement.hpp"
#include "rydreg/register_sim.hpp"

namespace rydreg {

struct HideSettings {
  LevelId target{31, 1};
  std::optional<double> t1_ps;  // empty: search
  double search_lo_ps = 3.0;
  double search_hi_ps = 7.0;
  double search_step_ps = 0.01;
};

struct RecoverSettings {
  double t2_delay_ps = 1.3;  // T2 - T1
  bool inverse_diagnostic = false;
};

struct TwoStateSettings {
  std::vector<LevelId> levels{{27, 1}, {32, 1}};
  LevelId target{32, 1};
  std::optional<double> t1_ps = 7.0;  // empty: search
  double search_lo_ps = 5.0;
  double search_hi_ps = 9.0;
  double t2_ps = 14.2;
};

struct SweepSettings {
  std::optional<double> t1_ps = 4.1;  // empty: use the hide search
  double t2_start_delay_ps = 0.2;
  double t2_stop_delay_ps = 12.0;
  double t2_step_ps = 0.2;
};

struct ScenarioConfig {
  BasisConfig basis;
  GridSpec grid;
  KickOptions kick;
  double q1 = 0.0017;
  double q2 = 0.0017;

  EncodeSpec encode;
  bool reference_identical = true;
  ReferenceSpec reference;  // used when reference_identical is false
  double reference_phase = 0.0;
  double t_meas_delay_ps = 1.0;

  double sigma_n = 4.0;
  std::size_t shots = 200;
  double merge_window_au = 1e-5;
  bool clip_negative = false;
  TauGrid tau = TauGrid::regular(0.25, 0.25, 100, 0.060, 0.0004);

  FitOptions fit;

  HideSettings hide;
  RecoverSettings recover;
  TwoStateSettings two_state;
  SweepSettings sweep;

  std::uint64_t seed = 1;
  std::filesystem::path cache_dir;

  // Reference spec actually used for readout.
  ReferenceSpec readout_reference() const;
  // FNV-1a digest of every setting.
  std::uint64_t hash() const;
};

ScenarioConfig default_config();

// Missing keys keep their defaults; unknown keys and bad values throw
// ConfigError.
ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig parse_config(const std::string& yaml_text);

}  // namespace rydreg
