#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "rydreg/analysis.hpp"
#include "rydreg/errors.hpp"
#include "rydreg/units.hpp"

using namespace rydreg;

namespace {

constexpr double kDeg = units::two_pi / 360.0;

std::vector<LevelId> six() { return {{27, 1}, {28, 1}, {29, 1}, {30, 1}, {31, 1}, {32, 1}}; }

ScanDataset clean_scan(const std::vector<LevelId>& levels, std::size_t windows = 40) {
  const auto& engine = fixtures::cesium();
  const auto spec = EncodeSpec::equal(levels);
  ScanOptions opts;
  opts.shots = 1;
  return tau_scan(encode_register(engine.basis(), spec), ReferenceSpec::identical_to(spec),
                  TauGrid::regular(0.25, 0.25, windows, 0.060, 0.0004),
                  default_ssfi_model(*engine.basis(), 0.0), opts);
}

CorrelationSamples synthetic(double amplitude, double phi, double omega, double noise,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, noise);
  CorrelationSamples s;
  for (int i = 0; i < 100; ++i) {
    const double tau = 0.25 * (i + 1);
    s.tau_ps.push_back(tau);
    s.r.push_back(amplitude * std::cos(phi - omega * units::ps_to_au(tau)) + (noise > 0 ? n(rng) : 0.0));
  }
  return s;
}

}  // namespace

TEST_CASE("pearson") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{2, 4, 6, 8};
  const std::vector<double> z{8, 6, 4, 2};
  const std::vector<double> flat{1, 1, 1, 1};
  CHECK(pearson(x, x) == doctest::Approx(1.0));
  CHECK(pearson(x, y) == doctest::Approx(1.0));
  CHECK(pearson(x, z) == doctest::Approx(-1.0));
  CHECK(pearson(x, flat) == 0.0);
  CHECK(pearson(x, y) <= 1.0);
}

TEST_CASE("noise-free windowed correlation follows the beat") {
  const auto data = clean_scan({{31, 1}, {32, 1}});
  const std::size_t j = data.bin_index("31p"), k = data.bin_index("32p");
  const auto c = windowed_correlation(data, j, k);
  const double w = data.bin_omega[j] - data.bin_omega[k];
  REQUIRE(c.r.size() == 40);
  for (std::size_t i = 0; i < c.r.size(); ++i)
    CHECK(std::abs(c.r[i] - std::cos(w * units::ps_to_au(c.tau_ps[i]))) < 0.02);
  for (const double r : windowed_correlation(data, j, j).r) CHECK(r == doctest::Approx(1.0));
}

TEST_CASE("window limits are enforced per pair") {
  const auto& engine = fixtures::cesium();
  const auto spec = EncodeSpec::equal(six());
  ScanOptions opts;
  opts.shots = 1;
  const auto psi = encode_register(engine.basis(), spec);
  const auto model = default_ssfi_model(*engine.basis(), 0.0);
  // 120 fs exceeds 0.15 of the 27p-32p beat period.
  const auto wide = tau_scan(psi, ReferenceSpec::identical_to(spec),
                             TauGrid::regular(0.25, 0.25, 10, 0.120, 0.0004), model, opts);
  try {
    windowed_correlation(wide, wide.bin_index("27p"), wide.bin_index("32p"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("27p") != std::string::npos);
  }
  CHECK_NOTHROW(windowed_correlation(wide, wide.bin_index("31p"), wide.bin_index("32p")));
  const auto narrow = tau_scan(psi, ReferenceSpec::identical_to(spec),
                               TauGrid::regular(0.25, 0.25, 10, 0.030, 0.0004), model, opts);
  CHECK_THROWS_AS(windowed_correlation(narrow, 0, 1), ConfigError);
  CHECK_NOTHROW(windowed_correlation(narrow, 0, 1, false));
}

TEST_CASE("fit recovers a synthetic fringe") {
  const double omega = 0.02 * units::ps_per_au;  // 0.02 rad/ps in a.u.
  SUBCASE("noise free") {
    const auto fit = fit_correlation(synthetic(1.0, 1.0, omega, 0.0, 1), omega);
    CHECK(fit.amplitude == doctest::Approx(1.0).epsilon(0.01));
    CHECK(fit.phi == doctest::Approx(1.0).epsilon(0.01));
    CHECK(fit.dphi < 1e-6);
    CHECK_FALSE(fit.vanished);
  }
  SUBCASE("beat frequency of a real pair") {
    const auto& basis = *fixtures::cesium().basis();
    const double w = basis.level(basis.index({31, 1})).omega - basis.level(basis.index({32, 1})).omega;
    const auto fit = fit_correlation(synthetic(0.7, 4.0, w, 0.05, 2), w);
    CHECK(fit.amplitude == doctest::Approx(0.7).epsilon(0.05));
    CHECK(std::abs(fit.phi - 4.0) < 0.05);
    CHECK(fit.dphi < 0.1);
  }
  SUBCASE("pure noise vanishes") {
    const auto s = synthetic(0.0, 0.0, omega, 0.3, 3);
    const auto fit = fit_correlation(s, omega);
    CHECK(fit.vanished);
    CHECK(fit.dphi == doctest::Approx(units::two_pi));
  }
  SUBCASE("zero samples") {
    CorrelationSamples s;
    s.tau_ps.assign(20, 1.0);
    s.r.assign(20, 0.0);
    const auto fit = fit_correlation(s, omega);
    CHECK(fit.dphi == doctest::Approx(units::two_pi));
    CHECK(fit.vanished);
  }
  SUBCASE("deterministic bootstrap") {
    const auto s = synthetic(0.5, 2.0, omega, 0.2, 4);
    CHECK(fit_correlation(s, omega).dphi == fit_correlation(s, omega).dphi);
  }
  SUBCASE("uncertainty grows with noise") {
    const double a = fit_correlation(synthetic(0.8, 2.0, omega, 0.05, 5), omega).dphi;
    const double b = fit_correlation(synthetic(0.8, 2.0, omega, 0.3, 5), omega).dphi;
    CHECK(b > a);
  }
}

TEST_CASE("covariance cross-check agrees with the bootstrap") {
  const double omega = 0.02 * units::ps_per_au;
  FitOptions cov;
  cov.uncertainty = PhaseUncertainty::Covariance;
  for (const double noise : {0.02, 0.1}) {
    const auto s = synthetic(0.7, 2.5, omega, noise, 8);
    const auto a = fit_correlation(s, omega);
    const auto b = fit_correlation(s, omega, cov);
    CHECK(b.amplitude == a.amplitude);
    CHECK(b.phi == a.phi);
    CHECK(b.dphi / a.dphi == doctest::Approx(1.0).epsilon(0.5));
  }
  const auto noise_only = fit_correlation(synthetic(0.0, 0.0, omega, 0.3, 3), omega, cov);
  CHECK(noise_only.vanished);
  CHECK(parse_phase_uncertainty("covariance") == PhaseUncertainty::Covariance);
  CHECK_THROWS_AS(parse_phase_uncertainty("jackknife"), ConfigError);
}

TEST_CASE("predicted amplitude") {
  CHECK(predicted_amplitude(0.6, 1.0, 0.6, 1.0, 1.0) == doctest::Approx(0.64));
  CHECK(predicted_amplitude(0.0, 1.0, 0.0, 2.0, 0.3) == doctest::Approx(0.3));
  CHECK(predicted_amplitude(2.0, 1.0, 0.0, 1.0, 1.0) == 0.0);
  CHECK_THROWS_AS(predicted_amplitude(0.1, 0.0, 0.1, 1.0, 1.0), DomainError);
}

TEST_CASE("phase uncertainty and bits") {
  const std::vector<double> two{10 * kDeg, 30 * kDeg};
  CHECK(phase_uncertainty(two) / kDeg == doctest::Approx(15.0));
  CHECK(info_bits(7 * kDeg) == doctest::Approx(5.685).epsilon(1e-3));
  CHECK(info_bits(32 * kDeg) == doctest::Approx(3.492).epsilon(1e-3));
  CHECK(info_bits(12 * kDeg) == doctest::Approx(4.907).epsilon(1e-3));
  CHECK(info_bits(units::two_pi) == 0.0);
  CHECK_THROWS_AS(info_bits(0.0), DomainError);
  CHECK_THROWS_AS(info_bits(7.0), DomainError);
  CHECK_THROWS_AS(phase_uncertainty(std::vector<double>{}), DomainError);

  std::map<std::string, double> by_state;
  std::vector<std::string> names;
  for (int n = 27; n <= 32; ++n) {
    names.push_back(std::to_string(n) + "p");
    by_state[names.back()] = 7 * kDeg;
  }
  CHECK(total_info(by_state, names) == doctest::Approx(34.1).epsilon(1e-3));
  by_state.erase("29p");
  CHECK_THROWS_AS(total_info(by_state, names), AccountingError);
}

TEST_CASE("information properties") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(1e-3, units::two_pi);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = u(rng), b = u(rng);
    CHECK(info_bits(std::min(a, b)) >= info_bits(std::max(a, b)));
    std::vector<double> v(5);
    for (auto& x : v) x = u(rng);
    const double before = phase_uncertainty(v);
    std::shuffle(v.begin(), v.end(), rng);
    CHECK(phase_uncertainty(v) == doctest::Approx(before).epsilon(1e-12));
    // Lowering one partner uncertainty never raises the state uncertainty.
    v[0] *= 0.5;
    CHECK(phase_uncertainty(v) <= before + 1e-12);
  }
}

TEST_CASE("analyze a noise-free register") {
  const auto data = clean_scan(six(), 100);
  const auto report = analyze(data);
  CHECK(report.fits.size() == 15);
  CHECK(report.states.size() == 6);
  for (const auto& f : report.fits) {
    CHECK(f.amplitude > 0.9);
    CHECK(std::min(f.phi, units::two_pi - f.phi) < 0.05);
  }
  CHECK(report.total_bits > 6 * 8.0);
  CHECK(report.dataset_hash == data.hash());
  CHECK_THROWS_AS(report.fit("27p", "33p"), UsageError);
}

TEST_CASE("analyze rejects under-sampled scans") {
  const auto data = clean_scan(six(), 5);
  CHECK_THROWS_AS(analyze(data), ConfigError);
}

TEST_CASE("encoded phases appear as fitted phase differences") {
  const auto& engine = fixtures::cesium();
  const std::vector<double> phases{0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
  auto spec = EncodeSpec::equal(six(), phases);
  // Plain reference: equal amplitudes, zero phases.
  ReferenceSpec ref = ReferenceSpec::identical_to(EncodeSpec::equal(six()));
  ScanOptions opts;
  opts.shots = 1;
  const auto data = tau_scan(encode_register(engine.basis(), spec), ref,
                             TauGrid::regular(0.25, 0.25, 100, 0.060, 0.0004),
                             default_ssfi_model(*engine.basis(), 0.0), opts);
  const auto report = analyze(data);
  const auto& f = report.fit("27p", "30p");
  const double expected = std::fmod(phases[0] - phases[3] + 2 * units::two_pi, units::two_pi);
  const double diff = std::remainder(f.phi - expected, units::two_pi);
  CHECK(std::abs(diff) < 0.05);
}
