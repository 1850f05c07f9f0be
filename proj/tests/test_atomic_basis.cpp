#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "rydreg/errors.hpp"
#include "rydreg/units.hpp"

using namespace rydreg;

TEST_CASE("quantum-defect energies") {
  const auto cs = QuantumDefects::cesium();
  CHECK(level_energy(7, 0, cs) == doctest::Approx(-0.0574158).epsilon(1e-6));
  CHECK(level_energy(31, 1, cs) == doctest::Approx(-6.655059e-4).epsilon(1e-6));
  CHECK(level_energy(1, 0, QuantumDefects::hydrogen()) == -0.5);
  CHECK(effective_n(30, 7, cs) == 30.0);
  CHECK_THROWS_AS(level_energy(3, 3, cs), DomainError);
  CHECK_THROWS_AS(level_energy(0, 0, cs), DomainError);
  CHECK_THROWS_AS(level_energy(4, 0, cs), DomainError);  // n_eff < 0
}

TEST_CASE("Kepler period and carrier") {
  CHECK(kepler_period_ps(31 - 3.59) == doctest::Approx(3.12984).epsilon(1e-5));
  const auto basis = build_basis(BasisConfig{});
  const auto& lv = basis.level(basis.index({32, 1}));
  const double carrier_fs = units::two_pi / lv.omega * units::ps_per_au * 1e3;
  CHECK(carrier_fs == doctest::Approx(2.6759).epsilon(1e-4));
  CHECK(basis.launch_energy() == doctest::Approx(-0.0574158).epsilon(1e-6));
}

TEST_CASE("level labels") {
  CHECK(LevelId{31, 1}.label() == "31p");
  CHECK(LevelId{25, 4}.label() == "25g");
  CHECK(parse_level("33s") == LevelId{33, 0});
  CHECK(parse_level("31d") == LevelId{31, 2});
  CHECK_THROWS_AS(parse_level("p31"), ConfigError);
  CHECK_THROWS_AS(parse_level("31"), ConfigError);
  for (int l = 0; l <= 16; ++l) CHECK(parse_level(LevelId{40, l}.label()) == LevelId{40, l});
}

TEST_CASE("basis construction") {
  SUBCASE("hydrogen n in [1,3], l <= 2 has six levels") {
    const auto b = build_basis(fixtures::hydrogen_config());
    CHECK(b.size() == 6);
  }
  SUBCASE("ordering, register and interior") {
    const auto b = build_basis(BasisConfig{});
    // Sorted by (l, n).
    for (std::size_t i = 1; i < b.size(); ++i) {
      const auto& lo = b.level(i - 1);
      const auto& hi = b.level(i);
      CHECK((lo.l < hi.l || (lo.l == hi.l && lo.n < hi.n)));
    }
    CHECK(b.register_indices().size() == 6);
    for (const auto r : b.register_indices()) {
      CHECK(b.level(r).l == 1);
      CHECK(b.is_interior(r));
    }
    CHECK_FALSE(b.find({16, 16}).has_value());  // l >= n
    CHECK(b.find({18, 16}).has_value());
  }
  SUBCASE("configuration errors") {
    BasisConfig c;
    c.n_min = 40;
    c.n_max = 30;
    CHECK_THROWS_AS(build_basis(c), ConfigError);
    c = BasisConfig{};
    c.register_n = {27, 47};
    CHECK_THROWS_AS(build_basis(c), ConfigError);  // padding
    c = BasisConfig{};
    c.register_n = {12};
    CHECK_THROWS_AS(build_basis(c), ConfigError);
    c = BasisConfig{};
    c.l_max = 60;
    CHECK_THROWS_AS(build_basis(c), ConfigError);
  }
  SUBCASE("hash is stable and content dependent") {
    const auto a = build_basis(BasisConfig{});
    CHECK(a.hash() == build_basis(BasisConfig{}).hash());
    BasisConfig c;
    c.defects.by_l[1] = 3.5;
    CHECK(a.hash() != build_basis(c).hash());
  }
}

TEST_CASE("hydrogen radial functions against closed forms") {
  GridSpec spec;
  spec.points_per_wavelength = 1000;
  const auto b = build_basis(fixtures::hydrogen_config());
  const auto rf = radial_functions(b, spec);
  const auto& r = rf.front().grid->r();
  const auto& s1 = rf[b.index({1, 0})];
  const auto& p2 = rf[b.index({2, 1})];
  double worst_1s = 0.0, worst_2p = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    worst_1s = std::max(worst_1s, std::abs(s1.values[i] - 2.0 * std::exp(-r[i])));
    worst_2p = std::max(worst_2p, std::abs(p2.values[i] - r[i] * std::exp(-r[i] / 2.0) /
                                                             (2.0 * std::sqrt(6.0))));
  }
  CHECK(worst_1s < 1e-6);
  CHECK(worst_2p < 1e-6);
  CHECK(radial_integral(s1, p2, [](double x) { return x; }) ==
        doctest::Approx(1.2902).epsilon(1e-4));

  // 1s-3d with kernel r: closed form against quadrature of the analytic functions.
  const auto& d3 = rf[b.index({3, 2})];
  RadialFunction a1s = s1, a3d = d3;
  a1s.inner_cut = a3d.inner_cut = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    a1s.values[i] = 2.0 * std::exp(-r[i]);
    a3d.values[i] = 4.0 / (81.0 * std::sqrt(30.0)) * r[i] * r[i] * std::exp(-r[i] / 3.0);
  }
  const double exact = 8.0 / (81.0 * std::sqrt(30.0)) * 120.0 * std::pow(0.75, 6);
  const auto kernel = [](double x) { return x; };
  CHECK(std::abs(radial_integral(a1s, a3d, kernel) - exact) < 1e-8);
  CHECK(std::abs(radial_integral(s1, d3, kernel) - exact) < 1e-5);
}

TEST_CASE("normalization and orthogonality of the interior set") {
  const auto& engine = fixtures::cesium();
  const auto& basis = *engine.basis();
  const auto rf = radial_functions(basis, engine.config().grid);
  double worst_norm = 0.0;
  double worst_overlap = 0.0;
  double worst_overlap_d = 0.0;
  const auto& interior = basis.interior_indices();
  for (const auto a : interior) {
    worst_norm = std::max(worst_norm, std::abs(radial_overlap(rf[a], rf[a]) - 1.0));
    for (const auto c : interior) {
      if (c <= a || basis.level(a).l != basis.level(c).l) continue;
      double& worst = basis.level(a).l == 2 ? worst_overlap_d : worst_overlap;
      worst = std::max(worst, std::abs(radial_overlap(rf[a], rf[c])));
    }
  }
  CHECK(worst_norm < 1e-12);
  CHECK(worst_overlap < 1e-4);
  // Coulomb-approximation d states are cut where the defect is near one half.
  CHECK(worst_overlap_d < 2e-4);
}

TEST_CASE("radial integrals reject mixed grids") {
  const auto b = build_basis(fixtures::hydrogen_config());
  const auto f = radial_wavefunction(b.level(0), GridSpec{});
  GridSpec other;
  other.points_per_wavelength = 30;
  const auto g = radial_wavefunction(b.level(0), other);
  CHECK_THROWS_AS(radial_overlap(f, g), UsageError);
}

TEST_CASE("outer tail sign convention") {
  const auto b = build_basis(BasisConfig{});
  const auto f = radial_wavefunction(b.level(b.index({30, 1})), GridSpec{});
  // Last nonzero lobe before the exponential tail is positive.
  double last = 0.0;
  for (const double v : f.values)
    if (std::abs(v) > 1e-12) last = v;
  CHECK(last > 0.0);
}
