#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "rydreg/errors.hpp"
#include "rydreg/register_sim.hpp"
#include "rydreg/units.hpp"

using namespace rydreg;

namespace {

std::vector<LevelId> six() { return {{27, 1}, {28, 1}, {29, 1}, {30, 1}, {31, 1}, {32, 1}}; }

}  // namespace

TEST_CASE("encode_register") {
  const auto basis = fixtures::cesium().basis();
  SUBCASE("single level carries its phase") {
    EncodeSpec spec{{{31, 1}}, {1.0}, {1.3}};
    const auto psi = encode_register(basis, spec);
    CHECK(std::abs(psi.amplitude({31, 1}) - std::polar(1.0, 1.3)) < 1e-15);
    CHECK(psi.norm() == doctest::Approx(1.0));
    CHECK(psi.time_ps == 0.0);
  }
  SUBCASE("six-state register") {
    const auto psi = encode_register(basis, EncodeSpec::equal(six()));
    for (const auto& id : six()) CHECK(psi.population(id) == doctest::Approx(1.0 / 6.0));
    CHECK(psi.norm() == doctest::Approx(1.0));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(encode_register(basis, EncodeSpec::equal({{31, 2}})), UsageError);
    CHECK_THROWS_AS(encode_register(basis, EncodeSpec{{{31, 1}}, {0.5}, {0.0}}), UsageError);
  }
}

TEST_CASE("free evolution") {
  const auto basis = fixtures::cesium().basis();
  const auto psi = encode_register(basis, EncodeSpec::equal(six(), {0.1, 0.2, 0.3, 0.4, 0.5, 0.6}));
  SUBCASE("zero step is the identity") {
    CHECK(free_evolve(psi, 0.0).amplitudes == psi.amplitudes);
  }
  SUBCASE("norm preserved") {
    for (const double dt : {0.1, 3.7, 25.0}) CHECK(free_evolve(psi, dt).norm() == doctest::Approx(psi.norm()).epsilon(1e-14));
  }
  SUBCASE("relative 31p/32p phase returns after one beat period of 3.30 ps") {
    const auto two = encode_register(basis, EncodeSpec::equal({{31, 1}, {32, 1}}));
    const double beat_ps = 3.30214;
    const auto later = free_evolve(two, beat_ps);
    const auto rel0 = two.amplitude({31, 1}) / two.amplitude({32, 1});
    const auto rel1 = later.amplitude({31, 1}) / later.amplitude({32, 1});
    CHECK(std::abs(std::arg(rel1 / rel0)) < 1e-3);
  }
  SUBCASE("negative step rejected") {
    CHECK_THROWS_AS(free_evolve(psi, -1.0), DomainError);
  }
  SUBCASE("populations constant without kicks") {
    const auto later = free_evolve(psi, 11.0);
    for (Eigen::Index a = 0; a < psi.amplitudes.size(); ++a)
      CHECK(std::abs(later.amplitudes(a)) == doctest::Approx(std::abs(psi.amplitudes(a))));
  }
}

TEST_CASE("kicks and sequences") {
  const auto& engine = fixtures::cesium();
  const auto basis = engine.basis();
  const auto& k = engine.first_kick();
  const auto psi = encode_register(basis, EncodeSpec::equal(six()));

  SUBCASE("identity kick leaves the packet unchanged") {
    CHECK(apply_kick(psi, KickOperator::identity(*basis)).amplitudes == psi.amplitudes);
  }
  SUBCASE("basis mismatch") {
    const auto other = build_basis(fixtures::hydrogen_config());
    CHECK_THROWS_AS(apply_kick(psi, KickOperator::identity(other)), UsageError);
  }
  SUBCASE("kick at 5 ps depletes 31p and fills non-p levels") {
    const auto kicked = apply_kick(free_evolve(psi, 5.0), k);
    CHECK(kicked.population({31, 1}) < 0.5 * psi.population({31, 1}));
    double non_p = 0.0;
    for (std::size_t a = 0; a < basis->size(); ++a)
      if (basis->level(a).l != 1) non_p += std::norm(kicked.amplitudes(static_cast<Eigen::Index>(a)));
    CHECK(non_p > 0.3);
  }
  SUBCASE("composition is bit-identical to manual steps") {
    PulseSequence seq;
    seq.encode = EncodeSpec::equal(six());
    seq.t1_ps = 5.0;
    seq.t2_ps = 6.3;
    const auto a = run_sequence(seq, basis, k, k);
    auto b = encode_register(basis, seq.encode);
    b = apply_kick(free_evolve(b, 5.0), k);
    b = apply_kick(free_evolve(b, 6.3 - 5.0), k);
    b = free_evolve(b, 7.3 - 6.3);
    CHECK(a.amplitudes == b.amplitudes);
    CHECK(a.time_ps == doctest::Approx(7.3));
  }
  SUBCASE("round-trip norm after two kicks") {
    PulseSequence seq;
    seq.encode = EncodeSpec::equal(six());
    seq.t1_ps = 5.0;
    seq.t2_ps = 6.3;
    const double defect = unitarity_defect(k, basis->interior_indices());
    const double norm = run_sequence(seq, basis, k, k).norm();
    CHECK(norm <= 1.0 + 1e-6);
    CHECK(norm >= 1.0 - 2.0 * defect);
  }
  SUBCASE("zero kicks reproduce the free register") {
    PulseSequence seq;
    seq.encode = EncodeSpec::equal(six());
    seq.t1_ps = 5.0;
    seq.t2_ps = 6.3;
    const auto id = KickOperator::identity(*basis);
    PulseSequence free = seq;
    free.t1_ps.reset();
    free.t2_ps.reset();
    free.t_meas_ps = 7.3;
    const auto a = run_sequence(seq, basis, id, id);
    const auto b = run_sequence(free, basis, id, id);
    CHECK((a.amplitudes - b.amplitudes).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("invalid orderings") {
    PulseSequence seq;
    seq.encode = EncodeSpec::equal(six());
    seq.t1_ps = 5.0;
    seq.t2_ps = 4.0;
    CHECK_THROWS_AS(run_sequence(seq, basis, k, k), ConfigError);
    seq.t2_ps = 6.0;
    seq.t_meas_ps = 5.5;
    CHECK_THROWS_AS(run_sequence(seq, basis, k, k), ConfigError);
  }
}

TEST_CASE("holographic populations") {
  const auto basis = fixtures::cesium().basis();
  const auto spec = EncodeSpec::equal({{31, 1}});
  const auto psi = encode_register(basis, spec);
  const auto ref = ReferenceSpec::identical_to(spec);
  const double omega = basis->level(basis->index({31, 1})).omega;
  const double period_ps = units::au_to_ps(units::two_pi / omega);
  const auto i31 = basis->index({31, 1});

  CHECK(holographic_populations(psi, ref, 1000 * period_ps)[i31] == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(holographic_populations(psi, ref, 1000.5 * period_ps)[i31] == doctest::Approx(0.0).epsilon(1e-6));

  ReferenceSpec none = ref;
  none.amplitudes = {0.0};
  const auto kicked = apply_kick(psi, fixtures::cesium().first_kick());
  const auto p = holographic_populations(kicked, none, 0.3);
  for (std::size_t a = 0; a < basis->size(); ++a)
    CHECK(p[a] == doctest::Approx(std::norm(kicked.amplitudes(static_cast<Eigen::Index>(a)))));

  CHECK_THROWS_AS(holographic_populations(psi, ref, -0.1), DomainError);
  ReferenceSpec bad{{{31, 2}}, {1.0}, 0.0};
  CHECK_THROWS_AS(holographic_populations(psi, bad, 0.0), UsageError);
}

TEST_CASE("global phase covariance") {
  const auto basis = fixtures::cesium().basis();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, units::two_pi);
  std::vector<double> phases(6);
  for (auto& p : phases) p = u(rng);
  auto shifted = phases;
  for (auto& p : shifted) p += 0.77;
  const auto a = encode_register(basis, EncodeSpec::equal(six(), phases));
  const auto b = encode_register(basis, EncodeSpec::equal(six(), shifted));
  const auto ref = ReferenceSpec::identical_to(EncodeSpec::equal(six()));
  ReferenceSpec ref_shift = ref;
  ref_shift.global_phase = 0.77;
  for (const double tau : {0.0, 0.123, 4.5}) {
    const auto pa = holographic_populations(a, ref, tau);
    const auto pb = holographic_populations(b, ref_shift, tau);
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i] == doctest::Approx(pb[i]).epsilon(1e-12));
  }
}
