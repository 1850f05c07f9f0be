#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rydreg {

// Per-l quantum defects of a one-electron (alkali-like) atom. l beyond the
// table uses `high_l`.
struct QuantumDefects {
  std::string atom = "hydrogen";
  std::vector<double> by_l;
  double high_l = 0.0;

  double operator()(int l) const;

  static QuantumDefects hydrogen();
  // Cs defaults: s 4.049, p 3.59, d 2.475, f 0.033, l>=4 zero.
  static QuantumDefects cesium();
};

struct LevelId {
  int n = 0;
  int l = 0;

  auto operator<=>(const LevelId&) const = default;
  std::string label() const;  // "31p", "25g", "30l=12" for l beyond the letter table
};

// Parses "31p" / "32s"; throws ConfigError on malformed input.
LevelId parse_level(const std::string& text);

struct RydbergLevel {
  int n = 0;
  int l = 0;
  double n_eff = 0.0;
  double energy = 0.0;  // Hartree
  double omega = 0.0;   // |E - E_launch|, a.u.

  LevelId id() const { return {n, l}; }
  std::string label() const { return id().label(); }
};

// E = -1 / (2 (n - delta_l)^2). Throws DomainError for l >= n, l < 0, n < 1 or
// n_eff <= 0.
double level_energy(int n, int l, const QuantumDefects& defects);

double effective_n(int n, int l, const QuantumDefects& defects);

// Classical orbit period 2 pi n_eff^3 converted to picoseconds.
double kepler_period_ps(double n_eff);

struct BasisConfig {
  int n_min = 18;
  int n_max = 48;
  int l_max = 16;
  std::vector<int> register_n{27, 28, 29, 30, 31, 32};
  int register_l = 1;
  QuantumDefects defects = QuantumDefects::cesium();
  LevelId launch{7, 0};
  // Required gap between the register and each n edge.
  int min_padding = 3;
  // Interior set: levels at least this far from each truncation edge. The
  // kick spreads population much further upward in n than downward.
  int interior_n_margin_low = 4;
  int interior_n_margin_high = 16;
  int interior_l_margin = 6;
};

// Ordered (ascending l, then n) set of m = 0 levels with a designated
// register subspace and interior set.
class BasisSet {
 public:
  BasisSet() = default;

  std::size_t size() const { return levels_.size(); }
  const RydbergLevel& level(std::size_t i) const { return levels_.at(i); }
  const std::vector<RydbergLevel>& levels() const { return levels_; }

  std::optional<std::size_t> find(LevelId id) const;
  std::size_t index(LevelId id) const;  // throws UsageError when absent

  const std::vector<std::size_t>& register_indices() const { return register_; }
  const std::vector<std::size_t>& interior_indices() const { return interior_; }
  bool is_register(std::size_t i) const;
  bool is_interior(std::size_t i) const;

  const BasisConfig& config() const { return config_; }
  double launch_energy() const { return launch_energy_; }

  // Stable FNV-1a digest of every level's quantum numbers and energy.
  std::uint64_t hash() const;

  friend BasisSet build_basis(const BasisConfig& config);

 private:
  BasisConfig config_;
  std::vector<RydbergLevel> levels_;
  std::map<LevelId, std::size_t> lookup_;
  std::vector<std::size_t> register_;
  std::vector<std::size_t> interior_;
  std::vector<bool> register_mask_;
  std::vector<bool> interior_mask_;
  double launch_energy_ = 0.0;
};

// Throws ConfigError on an empty range, unreachable l_max, register outside
// the range or insufficient padding.
BasisSet build_basis(const BasisConfig& config);

// Square-root scaled mesh: x = sqrt(r) is uniform with step h.
struct GridSpec {
  double points_per_wavelength = 20.0;
  double r_min = 1e-3;
  // The outer edge sits where the WKB decay exponent past the outer turning
  // point reaches this value, but never inside 2.5 n_eff^2.
  double tail_decay = 32.0;
  double min_outer_factor = 2.5;
  // Inner cut is rejected when |u| there exceeds this fraction of max |u|.
  double inner_tolerance = 0.5;
};

class RadialGrid {
 public:
  RadialGrid(double x_min, double h, std::size_t count);

  std::size_t size() const { return x_.size(); }
  double h() const { return h_; }
  std::span<const double> x() const { return x_; }
  std::span<const double> r() const { return r_; }
  // Trapezoid weights for integrals of the form  integral f(r) r^2 dr.
  std::span<const double> weights() const { return w_; }

  bool same_as(const RadialGrid& other) const;

 private:
  double h_;
  std::vector<double> x_;
  std::vector<double> r_;
  std::vector<double> w_;
};

// Outer radius needed for a level to decay below ~exp(-tail_decay).
double outer_radius(const RydbergLevel& level, const GridSpec& spec);

std::shared_ptr<const RadialGrid> make_grid(double r_outer, const GridSpec& spec);

struct RadialFunction {
  std::shared_ptr<const RadialGrid> grid;
  std::vector<double> values;  // R_nl(r_i); sign fixed positive in the outer tail
  RydbergLevel level;
  std::size_t inner_cut = 0;  // values below this index are zero
};

// Inward Numerov solution of the Coulomb radial equation at the level's
// quantum-defect energy, normalized by quadrature.
RadialFunction radial_wavefunction(const RydbergLevel& level, const GridSpec& spec);
RadialFunction radial_wavefunction(const RydbergLevel& level,
                                   std::shared_ptr<const RadialGrid> grid,
                                   const GridSpec& spec);

// Every level of the basis on one shared grid.
std::vector<RadialFunction> radial_functions(const BasisSet& basis, const GridSpec& spec);

// integral f(r) kernel(r) g(r) r^2 dr. Throws UsageError on grid mismatch.
double radial_integral(const RadialFunction& f, const RadialFunction& g,
                       const std::function<double(double)>& kernel);
double radial_integral(const RadialFunction& f, const RadialFunction& g,
                       std::span<const double> kernel_on_grid);
double radial_overlap(const RadialFunction& f, const RadialFunction& g);

}  // namespace rydreg
