#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "fixtures.hpp"
#include "rydreg/errors.hpp"
#include "rydreg/measurement.hpp"
#include "rydreg/units.hpp"

using namespace rydreg;

namespace {

std::vector<LevelId> six() { return {{27, 1}, {28, 1}, {29, 1}, {30, 1}, {31, 1}, {32, 1}}; }

double sample_std(const std::vector<double>& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0.0;
  for (const double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

TEST_CASE("default bin map merges np with (n-1)d") {
  const auto& basis = *fixtures::cesium().basis();
  const auto model = default_ssfi_model(basis, 0.0);
  for (const auto& bin : model.bins) {
    if (!bin.measured) continue;
    const auto id = parse_level(bin.name);
    std::vector<std::size_t> expected{basis.index(id), basis.index({id.n - 1, 2})};
    std::sort(expected.begin(), expected.end());
    auto got = bin.levels;
    std::sort(got.begin(), got.end());
    CHECK(got == expected);
  }
  std::size_t measured = 0;
  for (const auto& bin : model.bins) measured += bin.measured ? 1 : 0;
  CHECK(measured == 6);
}

TEST_CASE("ssfi_bin") {
  const auto& basis = *fixtures::cesium().basis();
  const auto model = default_ssfi_model(basis, 0.0);
  std::vector<double> p(basis.size(), 0.0);
  p[basis.index({32, 1})] = 0.3;
  p[basis.index({31, 2})] = 0.1;
  p[basis.index({40, 5})] = 0.05;
  const auto binned = ssfi_bin(p, model);
  std::size_t b32 = 0;
  while (model.bins[b32].name != "32p") ++b32;
  CHECK(binned.bins[b32] == doctest::Approx(0.4));
  CHECK(binned.lost == doctest::Approx(0.05));

  SsfiModel singletons;
  for (std::size_t a = 0; a < 3; ++a) singletons.bins.push_back({"x", {a}, 0.0, true, 0.0});
  const auto id = ssfi_bin(std::vector<double>{0.2, 0.3, 0.5}, singletons);
  CHECK(id.bins == std::vector<double>{0.2, 0.3, 0.5});
  CHECK(id.lost == doctest::Approx(0.0));

  // A level in two bins is rejected.
  SsfiModel overlap = model;
  overlap.bins[1].levels.push_back(overlap.bins[0].levels.front());
  CHECK_THROWS_AS(overlap.validate(basis), ConfigError);
}

TEST_CASE("binning conserves population exactly") {
  const auto& engine = fixtures::cesium();
  const auto psi = apply_kick(free_evolve(encode_register(engine.basis(), EncodeSpec::equal(six())), 5.0),
                              engine.first_kick());
  std::vector<double> p(psi.basis->size());
  for (std::size_t a = 0; a < p.size(); ++a) p[a] = std::norm(psi.amplitudes(static_cast<Eigen::Index>(a)));
  const auto binned = ssfi_bin(p, engine.model());
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  const double sum = std::accumulate(binned.bins.begin(), binned.bins.end(), binned.lost);
  CHECK(sum == doctest::Approx(total).epsilon(1e-14));
}

TEST_CASE("add_noise statistics and determinism") {
  std::vector<double> zeros(1, 0.0);
  std::vector<double> sigma(1, 0.05);
  std::vector<double> draws;
  std::mt19937_64 rng(99);
  for (int i = 0; i < 10000; ++i) {
    std::vector<double> v = zeros;
    add_noise(v, sigma, rng);
    draws.push_back(v[0]);
  }
  CHECK(sample_std(draws) == doctest::Approx(0.05).epsilon(0.02));
  const std::vector<double> bins{0.1, 0.2};
  const std::vector<double> s2{0.01, 0.02};
  CHECK(add_noise(bins, s2, 5) == add_noise(bins, s2, 5));
  CHECK(add_noise(bins, s2, 5) != add_noise(bins, s2, 6));
}

TEST_CASE("tau grid") {
  const auto g = TauGrid::regular(0.25, 0.25, 100, 0.060, 0.0004);
  CHECK(g.points_per_window() == 151);
  CHECK(g.tau(0, 0) == doctest::Approx(0.22));
  CHECK(g.tau(0, 75) == doctest::Approx(0.25));
  CHECK(g.tau(99, 150) == doctest::Approx(25.03));
}

TEST_CASE("tau_scan") {
  const auto& engine = fixtures::cesium();
  const auto basis = engine.basis();
  const auto grid = TauGrid::regular(0.25, 0.25, 4, 0.060, 0.0004);

  SUBCASE("no reference and no noise gives flat populations") {
    const auto spec = EncodeSpec::equal(six());
    const auto psi = encode_register(basis, spec);
    ReferenceSpec none = ReferenceSpec::identical_to(spec);
    for (auto& a : none.amplitudes) a = 0.0;
    ScanOptions opts;
    opts.shots = 1;
    const auto data = tau_scan(psi, none, grid, default_ssfi_model(*basis, 0.0), opts);
    for (std::size_t t = 0; t < grid.size(); ++t)
      for (std::size_t b = 0; b < 6; ++b)
        CHECK(data.means[t * data.bin_count() + b] == doctest::Approx(1.0 / 6.0));
  }
  SUBCASE("noise-free fringes repeat at the carrier period") {
    const auto spec = EncodeSpec::equal({{31, 1}});
    const auto psi = encode_register(basis, spec);
    const double omega = basis->level(basis->index({31, 1})).omega;
    const double period = units::au_to_ps(units::two_pi / omega);
    TauGrid fine;
    fine.centers_ps = {1.0};
    fine.window_ps = 0.06;
    fine.step_ps = period / 40.0;
    ScanOptions opts;
    opts.shots = 1;
    const auto data = tau_scan(psi, ReferenceSpec::identical_to(spec), fine, default_ssfi_model(*basis, 0.0), opts);
    const std::size_t b = data.bin_index("31p");
    const std::size_t n = fine.points_per_window();
    for (std::size_t i = 0; i + 40 < n; ++i)
      CHECK(data.mean(0, i, b) == doctest::Approx(data.mean(0, i + 40, b)).epsilon(1e-9));
  }
  SUBCASE("sample variance = fringe variance + noise variance") {
    const auto spec = EncodeSpec::equal({{31, 1}});
    const auto psi = encode_register(basis, spec);
    const auto ref = ReferenceSpec::identical_to(spec);
    TauGrid g;
    g.centers_ps = {5.0};
    g.window_ps = 4.0;
    g.step_ps = 0.0004;  // 10001 points
    ScanOptions opts;
    opts.shots = 1;
    const auto clean = tau_scan(psi, ref, g, default_ssfi_model(*basis, 0.0), opts);
    const auto noisy = tau_scan(psi, ref, g, default_ssfi_model(*basis, 0.3), opts);
    const std::size_t b = clean.bin_index("31p");
    std::vector<double> c, d;
    for (std::size_t i = 0; i < g.points_per_window(); ++i) {
      c.push_back(clean.mean(0, i, b));
      d.push_back(noisy.mean(0, i, b));
    }
    const double expected = std::pow(sample_std(c), 2) + 0.09;
    CHECK(std::pow(sample_std(d), 2) == doctest::Approx(expected).epsilon(0.03));
  }
  SUBCASE("deterministic given the seed") {
    const auto seq = engine.sequence(5.0, std::nullopt);
    ScanOptions opts;
    opts.shots = 20;
    opts.seed = 11;
    const auto a = tau_scan(seq, basis, engine.first_kick(), engine.second_kick(), grid, engine.model(), opts);
    const auto b = tau_scan(seq, basis, engine.first_kick(), engine.second_kick(), grid, engine.model(), opts);
    CHECK(a.means == b.means);
    opts.seed = 12;
    const auto c = tau_scan(seq, basis, engine.first_kick(), engine.second_kick(), grid, engine.model(), opts);
    CHECK(a.means != c.means);
  }
  SUBCASE("clipping mode keeps populations non-negative") {
    const auto spec = EncodeSpec::equal(six());
    auto model = default_ssfi_model(*basis, 2.0);
    model.clip_negative = true;
    ScanOptions opts;
    opts.shots = 3;
    opts.keep_shots = true;
    const auto data = tau_scan(encode_register(basis, spec), ReferenceSpec::identical_to(spec), grid, model, opts);
    CHECK(data.clipped);
    CHECK(*std::min_element(data.samples.begin(), data.samples.end()) >= 0.0);
  }
}

TEST_CASE("dataset persistence") {
  const auto& engine = fixtures::cesium();
  const auto grid = TauGrid::regular(0.25, 0.25, 3, 0.060, 0.0004);
  ScanOptions opts;
  opts.shots = 4;
  opts.seed = 3;
  const auto seq = engine.sequence(5.0, std::nullopt);
  const auto data = tau_scan(seq, engine.basis(), engine.first_kick(), engine.second_kick(), grid, engine.model(), opts);
  const auto dir = std::filesystem::path(RYDREG_TEST_CACHE) / "datasets";
  std::filesystem::create_directories(dir);

  SUBCASE("binary round trip is exact") {
    save_dataset(dir / "scan.bin", data);
    const auto back = load_dataset(dir / "scan.bin");
    CHECK(back.means == data.means);
    CHECK(back.bin_names == data.bin_names);
    CHECK(back.hash() == data.hash());
  }
  SUBCASE("CSV round trip of shot means is exact") {
    write_dataset_csv(dir / "scan.csv", data);
    const auto back = read_dataset_csv(dir / "scan.csv");
    CHECK(back.means == data.means);
    CHECK(back.bin_omega == data.bin_omega);
    CHECK(back.grid.centers_ps == data.grid.centers_ps);
  }
  SUBCASE("per-shot CSV averages back to the means") {
    opts.keep_shots = true;
    const auto full = tau_scan(seq, engine.basis(), engine.first_kick(), engine.second_kick(), grid, engine.model(), opts);
    write_dataset_csv(dir / "shots.csv", full);
    const auto back = read_dataset_csv(dir / "shots.csv");
    for (std::size_t i = 0; i < full.means.size(); ++i)
      CHECK(back.means[i] == doctest::Approx(full.means[i]).epsilon(1e-12));
  }
}
