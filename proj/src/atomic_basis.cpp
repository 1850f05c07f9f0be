#include "rydreg/atomic_basis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "rydreg/errors.hpp"
#include "rydreg/hash.hpp"
#include "rydreg/units.hpp"

namespace rydreg {

namespace {

constexpr const char* kLetters = "spdfghiklmnoqrtuv";
constexpr int kLetterCount = 17;

}  // namespace

double QuantumDefects::operator()(int l) const {
  if (l < 0) throw DomainError("negative orbital angular momentum");
  return static_cast<std::size_t>(l) < by_l.size() ? by_l[static_cast<std::size_t>(l)] : high_l;
}

QuantumDefects QuantumDefects::hydrogen() { return {"hydrogen", {}, 0.0}; }

QuantumDefects QuantumDefects::cesium() {
  return {"cesium", {4.049, 3.59, 2.475, 0.033}, 0.0};
}

std::string LevelId::label() const {
  std::ostringstream out;
  out << n;
  if (l >= 0 && l < kLetterCount)
    out << kLetters[l];
  else
    out << "l=" << l;
  return out.str();
}

LevelId parse_level(const std::string& text) {
  std::size_t pos = 0;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos == 0 || pos == text.size()) throw ConfigError("malformed level label '" + text + "'");
  const int n = std::stoi(text.substr(0, pos));
  const std::string rest = text.substr(pos);
  if (rest.size() == 1) {
    const std::string letters(kLetters);
    const auto l = letters.find(rest[0]);
    if (l == std::string::npos) throw ConfigError("unknown orbital letter in '" + text + "'");
    return {n, static_cast<int>(l)};
  }
  if (rest.rfind("l=", 0) == 0) return {n, std::stoi(rest.substr(2))};
  throw ConfigError("malformed level label '" + text + "'");
}

double effective_n(int n, int l, const QuantumDefects& defects) {
  if (n < 1 || l < 0 || l >= n)
    throw DomainError("invalid quantum numbers n=" + std::to_string(n) + " l=" + std::to_string(l));
  const double n_eff = n - defects(l);
  if (!(n_eff > 0.0))
    throw DomainError("non-positive effective quantum number for " + LevelId{n, l}.label());
  return n_eff;
}

double level_energy(int n, int l, const QuantumDefects& defects) {
  const double n_eff = effective_n(n, l, defects);
  return -0.5 / (n_eff * n_eff);
}

double kepler_period_ps(double n_eff) {
  if (!(n_eff > 0.0)) throw DomainError("kepler_period: n_eff must be positive");
  return units::au_to_ps(units::two_pi * n_eff * n_eff * n_eff);
}

std::optional<std::size_t> BasisSet::find(LevelId id) const {
  const auto it = lookup_.find(id);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t BasisSet::index(LevelId id) const {
  if (const auto i = find(id)) return *i;
  throw UsageError("level " + id.label() + " is not in the basis");
}

bool BasisSet::is_register(std::size_t i) const { return register_mask_.at(i); }
bool BasisSet::is_interior(std::size_t i) const { return interior_mask_.at(i); }

std::uint64_t BasisSet::hash() const {
  Fnv1a h;
  for (const auto& level : levels_) {
    h.add(level.n);
    h.add(level.l);
    h.add(level.energy);
  }
  h.add(launch_energy_);
  return h.value();
}

BasisSet build_basis(const BasisConfig& config) {
  if (config.n_min < 1 || config.n_max < config.n_min)
    throw ConfigError("empty principal quantum number range");
  if (config.l_max < 0 || config.l_max >= config.n_max)
    throw ConfigError("l_max must satisfy 0 <= l_max < n_max");
  if (!config.register_n.empty()) {
    const auto [lo, hi] = std::minmax_element(config.register_n.begin(), config.register_n.end());
    if (*lo < config.n_min || *hi > config.n_max)
      throw ConfigError("register states lie outside the basis n range");
    if (*lo - config.n_min < config.min_padding || config.n_max - *hi < config.min_padding)
      throw ConfigError("basis needs at least " + std::to_string(config.min_padding) +
                        " padding n-values on each side of the register");
    if (config.register_l > config.l_max) throw ConfigError("register l exceeds l_max");
    if (std::set<int>(config.register_n.begin(), config.register_n.end()).size() !=
        config.register_n.size())
      throw ConfigError("duplicate register n");
  }

  BasisSet basis;
  basis.config_ = config;
  basis.launch_energy_ = level_energy(config.launch.n, config.launch.l, config.defects);
  for (int l = 0; l <= config.l_max; ++l) {
    for (int n = std::max(config.n_min, l + 1); n <= config.n_max; ++n) {
      RydbergLevel level;
      level.n = n;
      level.l = l;
      level.n_eff = effective_n(n, l, config.defects);
      level.energy = -0.5 / (level.n_eff * level.n_eff);
      level.omega = std::abs(level.energy - basis.launch_energy_);
      basis.lookup_.emplace(level.id(), basis.levels_.size());
      basis.levels_.push_back(level);
    }
  }

  const std::set<int> reg(config.register_n.begin(), config.register_n.end());
  basis.register_mask_.assign(basis.levels_.size(), false);
  basis.interior_mask_.assign(basis.levels_.size(), false);
  for (std::size_t i = 0; i < basis.levels_.size(); ++i) {
    const auto& level = basis.levels_[i];
    const bool interior = level.n >= config.n_min + config.interior_n_margin_low &&
                          level.n <= config.n_max - config.interior_n_margin_high &&
                          level.l <= config.l_max - config.interior_l_margin;
    const bool in_register = level.l == config.register_l && reg.contains(level.n);
    if (in_register && !interior)
      throw ConfigError("register level " + level.label() + " falls outside the interior set");
    basis.register_mask_[i] = in_register;
    basis.interior_mask_[i] = interior;
    if (in_register) basis.register_.push_back(i);
    if (interior) basis.interior_.push_back(i);
  }
  return basis;
}

RadialGrid::RadialGrid(double x_min, double h, std::size_t count) : h_(h) {
  if (count < 3 || !(h > 0.0) || x_min < 0.0) throw ConfigError("degenerate radial grid");
  x_.resize(count);
  r_.resize(count);
  w_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = x_min + h * static_cast<double>(i);
    x_[i] = x;
    r_[i] = x * x;
    // r^2 dr = x^4 * 2x dx
    w_[i] = 2.0 * std::pow(x, 5) * h;
  }
  w_.front() *= 0.5;
  w_.back() *= 0.5;
}

bool RadialGrid::same_as(const RadialGrid& other) const {
  return this == &other ||
         (x_.size() == other.x_.size() && h_ == other.h_ && x_.front() == other.x_.front());
}

double outer_radius(const RydbergLevel& level, const GridSpec& spec) {
  const double binding = -level.energy;
  const double ll = level.l * (level.l + 1.0);
  const double disc = std::max(0.0, 1.0 - 2.0 * binding * ll);
  const double r_turn = (1.0 + std::sqrt(disc)) / (2.0 * binding);
  const double dr = r_turn / 2000.0;
  double exponent = 0.0;
  double r = r_turn;
  while (exponent < spec.tail_decay) {
    const double rm = r + 0.5 * dr;
    const double kappa2 = 2.0 * (ll / (2.0 * rm * rm) - 1.0 / rm + binding);
    exponent += std::sqrt(std::max(0.0, kappa2)) * dr;
    r += dr;
  }
  return std::max(r, spec.min_outer_factor * level.n_eff * level.n_eff);
}

std::shared_ptr<const RadialGrid> make_grid(double r_outer, const GridSpec& spec) {
  if (!(spec.points_per_wavelength > 0.0) || !(spec.r_min > 0.0) || r_outer <= spec.r_min)
    throw ConfigError("invalid radial grid parameters");
  // In x = sqrt(r) the local wavenumber never exceeds sqrt(8).
  const double h = units::two_pi / (std::sqrt(8.0) * spec.points_per_wavelength);
  const double x_min = std::sqrt(spec.r_min);
  const auto count =
      static_cast<std::size_t>(std::ceil((std::sqrt(r_outer) - x_min) / h)) + 1;
  return std::make_shared<const RadialGrid>(x_min, h, count);
}

RadialFunction radial_wavefunction(const RydbergLevel& level, const GridSpec& spec) {
  return radial_wavefunction(level, make_grid(outer_radius(level, spec), spec), spec);
}

RadialFunction radial_wavefunction(const RydbergLevel& level,
                                   std::shared_ptr<const RadialGrid> grid,
                                   const GridSpec& spec) {
  if (!(level.energy < 0.0)) throw DomainError("radial_wavefunction needs a bound level");
  const auto x = grid->x();
  const std::size_t size = grid->size();
  const double h2 = grid->h() * grid->h();
  const double energy = level.energy;
  const double c = 4.0 * level.l * (level.l + 1.0) + 0.75;

  // With u = r R and y = x^{-1/2} u, the radial equation becomes y'' = f(x) y.
  auto f = [&](double xv) { return c / (xv * xv) - 8.0 - 8.0 * energy * xv * xv; };

  const double r_out = outer_radius(level, spec);
  const double x_out = std::sqrt(r_out);
  if (x_out > x.back() + 1e-12)
    throw ConfigError("radial grid too short for " + level.label());
  std::size_t start = size - 1;
  while (start > 2 && x[start] > x_out) --start;

  // Inner classical turning point of the y equation.
  const double binding = -energy;
  const double disc = std::max(0.0, 64.0 - 32.0 * binding * c);
  const double x_turn = std::sqrt((8.0 - std::sqrt(disc)) / (16.0 * binding));

  std::vector<double> y(size, 0.0);
  y[start] = 0.0;
  y[start - 1] = 1e-30;
  std::size_t cut = 0;
  double fp1 = f(x[start]);
  double f0 = f(x[start - 1]);
  for (std::size_t i = start - 1; i >= 1; --i) {
    const double fm1 = f(x[i - 1]);
    y[i - 1] = (2.0 * y[i] * (1.0 + 5.0 * h2 * f0 / 12.0) - y[i + 1] * (1.0 - h2 * fp1 / 12.0)) /
               (1.0 - h2 * fm1 / 12.0);
    fp1 = f0;
    f0 = fm1;
    if (std::abs(y[i - 1]) > 1e150) {
      for (std::size_t j = i - 1; j <= start; ++j) y[j] *= 1e-150;
    }
    // Inside the inner barrier a growing |u| means the irregular solution has
    // taken over; keep the minimum and discard the core region.
    if (x[i - 1] < x_turn &&
        std::abs(y[i - 1]) * std::sqrt(x[i - 1]) > std::abs(y[i]) * std::sqrt(x[i])) {
      cut = i;
      std::fill(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(i), 0.0);
      break;
    }
  }

  if (cut > 0) {
    double u_max = 0.0;
    for (std::size_t i = cut; i <= start; ++i) u_max = std::max(u_max, std::abs(y[i]) * std::sqrt(x[i]));
    const double u_cut = std::abs(y[cut]) * std::sqrt(x[cut]);
    if (u_cut > spec.inner_tolerance * u_max)
      throw IntegrationError("solution for " + level.label() +
                             " does not decay at the inner boundary");
  }

  RadialFunction out;
  out.grid = grid;
  out.level = level;
  out.inner_cut = cut;
  out.values.assign(size, 0.0);
  for (std::size_t i = cut; i < size; ++i) out.values[i] = y[i] / std::pow(x[i], 1.5);
  double norm = 0.0;
  const auto w = grid->weights();
  for (std::size_t i = 0; i < size; ++i) norm += w[i] * out.values[i] * out.values[i];
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw IntegrationError("radial integration for " + level.label() + " produced no norm");
  const double scale = 1.0 / std::sqrt(norm);
  for (auto& v : out.values) v *= scale;
  return out;
}

std::vector<RadialFunction> radial_functions(const BasisSet& basis, const GridSpec& spec) {
  double r_outer = 0.0;
  for (const auto& level : basis.levels()) r_outer = std::max(r_outer, outer_radius(level, spec));
  const auto grid = make_grid(r_outer, spec);
  std::vector<RadialFunction> out;
  out.reserve(basis.size());
  for (const auto& level : basis.levels()) out.push_back(radial_wavefunction(level, grid, spec));
  return out;
}

double radial_integral(const RadialFunction& f, const RadialFunction& g,
                       std::span<const double> kernel_on_grid) {
  if (!f.grid || !g.grid || !f.grid->same_as(*g.grid))
    throw UsageError("radial_integral: functions live on different grids");
  if (kernel_on_grid.size() != f.grid->size())
    throw UsageError("radial_integral: kernel size does not match grid");
  const auto w = f.grid->weights();
  const std::size_t lo = std::max(f.inner_cut, g.inner_cut);
  double sum = 0.0;
  for (std::size_t i = lo; i < w.size(); ++i) sum += w[i] * f.values[i] * g.values[i] * kernel_on_grid[i];
  return sum;
}

double radial_integral(const RadialFunction& f, const RadialFunction& g,
                       const std::function<double(double)>& kernel) {
  if (!f.grid) throw UsageError("radial_integral: empty function");
  const auto r = f.grid->r();
  std::vector<double> k(r.size());
  std::transform(r.begin(), r.end(), k.begin(), kernel);
  return radial_integral(f, g, k);
}

double radial_overlap(const RadialFunction& f, const RadialFunction& g) {
  return radial_integral(f, g, [](double) { return 1.0; });
}

}  // namespace rydreg
