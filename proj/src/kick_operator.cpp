#include "rydreg/kick_operator.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>

#include "rydreg/binary_io.hpp"
#include "rydreg/errors.hpp"
#include "rydreg/hash.hpp"
#include "rydreg/parallel.hpp"

namespace rydreg {

namespace {

std::complex<double> i_power(int l) {
  switch (l % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void check_radial(const BasisSet& basis, std::span<const RadialFunction> radial) {
  if (radial.size() != basis.size())
    throw UsageError("radial function count does not match the basis");
  for (std::size_t i = 1; i < radial.size(); ++i)
    if (!radial[i].grid->same_as(*radial[0].grid))
      throw UsageError("radial functions must share one grid");
}

constexpr char kMagic[8] = {'R', 'Y', 'D', 'K', 'I', 'C', 'K', '1'};

}  // namespace

double wigner_3j_zero(int l1, int l2, int l3) {
  if (l1 < 0 || l2 < 0 || l3 < 0) return 0.0;
  const int big_j = l1 + l2 + l3;
  if (big_j % 2 != 0) return 0.0;
  if (l3 > l1 + l2 || l3 < std::abs(l1 - l2)) return 0.0;
  const int g = big_j / 2;
  const auto lf = [](int k) { return std::lgamma(static_cast<double>(k) + 1.0); };
  const double log_mag = 0.5 * (lf(big_j - 2 * l1) + lf(big_j - 2 * l2) + lf(big_j - 2 * l3) -
                                lf(big_j + 1)) +
                         lf(g) - lf(g - l1) - lf(g - l2) - lf(g - l3);
  const double sign = (g % 2 == 0) ? 1.0 : -1.0;
  return sign * std::exp(log_mag);
}

double angular_coupling(int l, int l_prime, int big_l) {
  const double w = wigner_3j_zero(l, big_l, l_prime);
  return std::sqrt((2.0 * l + 1.0) * (2.0 * l_prime + 1.0)) * w * w;
}

KickOperator KickOperator::identity(const BasisSet& basis) {
  KickOperator k;
  const auto n = static_cast<Eigen::Index>(basis.size());
  k.matrix = ComplexMatrix::Identity(n, n);
  k.basis_hash = basis.hash();
  return k;
}

KickOperator kick_matrix(const BasisSet& basis, std::span<const RadialFunction> radial, double q,
                         const KickOptions& options) {
  check_radial(basis, radial);
  KickOperator out = KickOperator::identity(basis);
  out.q = q;
  if (q == 0.0) return out;

  const std::size_t dim = basis.size();
  const auto& grid = *radial.front().grid;
  const auto r = grid.r();
  out.matrix.setZero();

  std::vector<double> bessel(r.size());
  std::vector<double> change(dim);
  int quiet = 0;
  int big_l = 0;
  for (; big_l <= options.l_cap; ++big_l) {
    for (std::size_t i = 0; i < r.size(); ++i)
      bessel[i] = std::sph_bessel(static_cast<unsigned>(big_l), std::abs(q) * r[i]);
    // j_L(-x) = (-1)^L j_L(x)
    const double parity = (q < 0.0 && big_l % 2 == 1) ? -1.0 : 1.0;
    const std::complex<double> prefactor = i_power(big_l) * (2.0 * big_l + 1.0) * parity;

    parallel_for(dim, [&](std::size_t b) {
      double worst = 0.0;
      for (std::size_t a = 0; a < dim; ++a) {
        const double ang = angular_coupling(basis.level(b).l, basis.level(a).l, big_l);
        if (ang == 0.0) continue;
        const auto term = prefactor * ang * radial_integral(radial[a], radial[b], bessel);
        out.matrix(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += term;
        worst = std::max(worst, std::abs(term));
      }
      change[b] = worst;
    });

    out.residual = *std::max_element(change.begin(), change.end());
    quiet = out.residual < options.tolerance ? quiet + 1 : 0;
    // Odd and even L couple disjoint parity classes, so two quiet partial
    // waves in a row are required.
    if (quiet >= 2) break;
  }
  if (quiet < 2) {
    std::size_t worst = 0;
    for (std::size_t b = 1; b < dim; ++b)
      if (change[b] > change[worst]) worst = b;
    std::ostringstream msg;
    msg << "kick matrix not converged at L=" << options.l_cap << "; worst column "
        << basis.level(worst).label() << " changes by " << change[worst];
    throw ConvergenceError(msg.str());
  }
  out.l_max_used = big_l;
  return out;
}

ComplexMatrix dipole_matrix(const BasisSet& basis, std::span<const RadialFunction> radial) {
  check_radial(basis, radial);
  const auto dim = static_cast<Eigen::Index>(basis.size());
  ComplexMatrix z = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    for (Eigen::Index b = 0; b < dim; ++b) {
      const int la = basis.level(static_cast<std::size_t>(a)).l;
      const int lb = basis.level(static_cast<std::size_t>(b)).l;
      if (std::abs(la - lb) != 1) continue;
      const double ang = angular_coupling(lb, la, 1);
      z(a, b) = ang * radial_integral(radial[static_cast<std::size_t>(a)],
                                      radial[static_cast<std::size_t>(b)],
                                      [](double rv) { return rv; });
    }
  }
  return z;
}

ComplexMatrix first_order_kick(const BasisSet& basis, std::span<const RadialFunction> radial,
                               double q) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  return ComplexMatrix::Identity(dim, dim) +
         std::complex<double>(0.0, q) * dipole_matrix(basis, radial);
}

double unitarity_defect(const ComplexMatrix& k, std::span<const std::size_t> subset) {
  const ComplexMatrix g = k.adjoint() * k;
  double worst = 0.0;
  for (const auto a : subset) {
    for (const auto b : subset) {
      const auto ia = static_cast<Eigen::Index>(a);
      const auto ib = static_cast<Eigen::Index>(b);
      const std::complex<double> expected = a == b ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(g(ia, ib) - expected));
    }
  }
  return worst;
}

double unitarity_defect(const KickOperator& k, std::span<const std::size_t> subset) {
  return unitarity_defect(k.matrix, subset);
}

std::uint64_t kick_cache_key(const BasisSet& basis, const GridSpec& grid, double q) {
  Fnv1a h;
  h.add(basis.hash());
  h.add(grid.points_per_wavelength);
  h.add(grid.r_min);
  h.add(grid.tail_decay);
  h.add(grid.min_outer_factor);
  h.add(q);
  return h.value();
}

void save_kick(const std::filesystem::path& path, const KickOperator& k, std::uint64_t key) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write kick cache " + path.string());
  out.write(kMagic, sizeof kMagic);
  binary::write_u64(out, key);
  binary::write_u64(out, k.size());
  binary::write_u64(out, static_cast<std::uint64_t>(static_cast<std::int64_t>(k.l_max_used)));
  binary::write_f64(out, k.residual);
  binary::write_f64(out, k.q);
  for (Eigen::Index a = 0; a < k.matrix.rows(); ++a) {
    for (Eigen::Index b = 0; b < k.matrix.cols(); ++b) {
      binary::write_f64(out, k.matrix(a, b).real());
      binary::write_f64(out, k.matrix(a, b).imag());
    }
  }
}

std::optional<KickOperator> load_kick(const std::filesystem::path& path, std::uint64_t key) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + 8, kMagic)) return std::nullopt;
  KickOperator k;
  const auto stored_key = binary::read_u64(in);
  if (!in || stored_key != key) return std::nullopt;
  const auto dim = static_cast<Eigen::Index>(binary::read_u64(in));
  k.l_max_used = static_cast<int>(static_cast<std::int64_t>(binary::read_u64(in)));
  k.residual = binary::read_f64(in);
  k.q = binary::read_f64(in);
  if (!in || dim <= 0 || dim > 100000) return std::nullopt;
  k.matrix.resize(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    for (Eigen::Index b = 0; b < dim; ++b) {
      const double re = binary::read_f64(in);
      const double im = binary::read_f64(in);
      k.matrix(a, b) = {re, im};
    }
  }
  if (!in) return std::nullopt;
  return k;
}

KickOperator cached_kick_matrix(const std::filesystem::path& cache_dir, const BasisSet& basis,
                                std::span<const RadialFunction> radial, const GridSpec& grid,
                                double q, const KickOptions& options) {
  if (cache_dir.empty()) return kick_matrix(basis, radial, q, options);
  const auto key = kick_cache_key(basis, grid, q);
  std::ostringstream name;
  name << "kick-" << std::hex << key << ".bin";
  const auto path = cache_dir / name.str();
  if (auto hit = load_kick(path, key); hit && static_cast<std::size_t>(hit->size()) == basis.size()) {
    hit->basis_hash = basis.hash();
    return *hit;
  }
  auto k = kick_matrix(basis, radial, q, options);
  std::filesystem::create_directories(cache_dir);
  save_kick(path, k, key);
  return k;
}

}  // namespace rydreg
