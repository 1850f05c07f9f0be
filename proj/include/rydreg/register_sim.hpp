#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "rydreg/atomic_basis.hpp"
#include "rydreg/kick_operator.hpp"

namespace rydreg {

// Data register state: amplitudes over a basis, phase-referenced at time_ps.
struct WavePacket {
  std::shared_ptr<const BasisSet> basis;
  ComplexVector amplitudes;
  double time_ps = 0.0;

  double norm() const { return amplitudes.squaredNorm(); }
  std::complex<double> amplitude(LevelId id) const;
  double population(LevelId id) const { return std::norm(amplitude(id)); }
};

struct EncodeSpec {
  std::vector<LevelId> levels;
  std::vector<double> amplitudes;  // real, sum of squares 1
  std::vector<double> phases;      // radians

  // Equal amplitudes 1/sqrt(N) and the given (default zero) phases.
  static EncodeSpec equal(std::vector<LevelId> levels, std::vector<double> phases = {});
};

// Reference excitation b_j exp(i phi_j2) on register levels, plus a global
// phase theta applied to every level.
struct ReferenceSpec {
  std::vector<LevelId> levels;
  std::vector<std::complex<double>> amplitudes;
  double global_phase = 0.0;

  // A copy of the data excitation, as produced by an identical second pulse.
  static ReferenceSpec identical_to(const EncodeSpec& encode, double global_phase = 0.0);
};

struct PulseSequence {
  EncodeSpec encode;
  std::optional<double> t1_ps;
  std::optional<double> t2_ps;
  double q1 = 0.0017;
  double q2 = 0.0017;
  ReferenceSpec reference;
  // Defaults to the last kick + 1 ps.
  std::optional<double> t_meas_ps;

  double measurement_time() const;
  // Throws ConfigError unless 0 < T1 < T2 < t_meas where present.
  void validate() const;
};

// Throws UsageError when a level is outside the register subspace or the
// amplitudes are not normalized.
WavePacket encode_register(std::shared_ptr<const BasisSet> basis, const EncodeSpec& spec);

// c_a -> c_a exp(-i E_a dt). Throws DomainError for dt < 0.
WavePacket free_evolve(const WavePacket& psi, double dt_ps);

// c -> K c. Throws UsageError when K was built on another basis.
WavePacket apply_kick(const WavePacket& psi, const KickOperator& kick);

// encode -> evolve to T1 -> kick -> evolve to T2 -> kick -> evolve to t_meas.
// Kick operators for absent kick times are ignored.
WavePacket run_sequence(const PulseSequence& seq, std::shared_ptr<const BasisSet> basis,
                        const KickOperator& first, const KickOperator& second);

// Amplitudes with free evolution removed: c_a exp(+i E_a t).
ComplexVector interaction_picture(const WavePacket& psi);

// Basis indices and complex reference amplitudes (global phase included),
// validated against the basis.
struct ResolvedReference {
  std::vector<std::size_t> indices;
  std::vector<std::complex<double>> amplitudes;
};
ResolvedReference resolve_reference(const BasisSet& basis, const ReferenceSpec& ref);

// Per-level populations after the reference excitation at delay tau. Register
// levels interfere coherently with the reference; other levels keep |c|^2.
std::vector<double> holographic_populations(const WavePacket& data, const ReferenceSpec& ref,
                                            double tau_ps);

// Precomputed form of holographic_populations for repeated delays.
class HolographicReadout {
 public:
  HolographicReadout(const WavePacket& data, const ReferenceSpec& ref);

  std::size_t size() const { return static_populations_.size(); }
  // Writes size() populations into out.
  void populations(double tau_ps, std::span<double> out) const;

 private:
  std::vector<double> static_populations_;
  std::vector<std::size_t> indices_;
  std::vector<std::complex<double>> data_;
  std::vector<std::complex<double>> reference_;
  std::vector<double> omega_;
};

}  // namespace rydreg
