#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "rydreg/atomic_basis.hpp"

namespace rydreg {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// <l' 0| P_L(cos theta) |l 0> = sqrt((2l+1)(2l'+1)) (l L l'; 0 0 0)^2.
double angular_coupling(int l, int l_prime, int big_l);

// Wigner 3j symbol with all projections zero.
double wigner_3j_zero(int l1, int l2, int l3);

struct KickOptions {
  int l_cap = 40;
  double tolerance = 1e-10;
};

// Impulsive half-cycle-pulse action exp(iQz) on a basis.
struct KickOperator {
  double q = 0.0;
  ComplexMatrix matrix;
  int l_max_used = 0;
  double residual = 0.0;  // largest element change from the last partial wave
  std::uint64_t basis_hash = 0;

  std::size_t size() const { return static_cast<std::size_t>(matrix.rows()); }
  static KickOperator identity(const BasisSet& basis);
};

// K[a,b] = sum_L i^L (2L+1) <l_a|P_L|l_b> integral R_a j_L(Qr) R_b r^2 dr,
// with L increased until two consecutive partial waves change no element by
// more than the tolerance. Q = 0 returns the identity exactly. Throws
// ConvergenceError naming the worst element when the cap is reached.
KickOperator kick_matrix(const BasisSet& basis, std::span<const RadialFunction> radial, double q,
                         const KickOptions& options = {});

// Dipole matrix Z[a,b] = <a|z|b>.
ComplexMatrix dipole_matrix(const BasisSet& basis, std::span<const RadialFunction> radial);

// Small-kick oracle I + iQZ.
ComplexMatrix first_order_kick(const BasisSet& basis, std::span<const RadialFunction> radial,
                               double q);

// max |(K^dagger K - I)_{ab}| over a, b in subset.
double unitarity_defect(const ComplexMatrix& k, std::span<const std::size_t> subset);
double unitarity_defect(const KickOperator& k, std::span<const std::size_t> subset);

// Binary cache keyed by (basis hash, grid spec, Q). Layout, little-endian:
//   char[8] "RYDKICK1" | u64 key | u64 dim | i64 l_max_used | f64 residual |
//   f64 q | dim*dim * (f64 re, f64 im) row-major
std::uint64_t kick_cache_key(const BasisSet& basis, const GridSpec& grid, double q);
void save_kick(const std::filesystem::path& path, const KickOperator& k, std::uint64_t key);
std::optional<KickOperator> load_kick(const std::filesystem::path& path, std::uint64_t key);

// Loads from cache_dir when a matching entry exists; otherwise builds and
// stores it. An empty cache_dir disables caching.
KickOperator cached_kick_matrix(const std::filesystem::path& cache_dir, const BasisSet& basis,
                                std::span<const RadialFunction> radial, const GridSpec& grid,
                                double q, const KickOptions& options = {});

}  // namespace rydreg
