#pragma once

#include <memory>

#include "rydreg/atomic_basis.hpp"
#include "rydreg/config.hpp"
#include "rydreg/kick_operator.hpp"
#include "rydreg/scenario.hpp"

namespace fixtures {

// Hydrogen n = 1..3 with the register on 2p and no padding requirements.
inline rydreg::BasisConfig hydrogen_config() {
  rydreg::BasisConfig c;
  c.n_min = 1;
  c.n_max = 3;
  c.l_max = 2;
  c.register_n = {2};
  c.register_l = 1;
  c.defects = rydreg::QuantumDefects::hydrogen();
  c.launch = {1, 0};
  c.min_padding = 0;
  c.interior_n_margin_low = 0;
  c.interior_n_margin_high = 0;
  c.interior_l_margin = 0;
  return c;
}

inline rydreg::ScenarioConfig test_config() {
  auto c = rydreg::default_config();
  c.cache_dir = RYDREG_TEST_CACHE;
  return c;
}

// Default cesium engine, built once per test binary.
inline const rydreg::Engine& cesium() {
  static const rydreg::Engine engine(test_config());
  return engine;
}

}  // namespace fixtures
