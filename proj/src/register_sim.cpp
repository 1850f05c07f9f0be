#include "rydreg/register_sim.hpp"

#include <cmath>
#include <sstream>

#include "rydreg/errors.hpp"
#include "rydreg/units.hpp"

namespace rydreg {

namespace {

std::complex<double> phase_factor(double angle) { return std::polar(1.0, angle); }

void check_basis(const WavePacket& psi) {
  if (!psi.basis) throw UsageError("wave packet has no basis");
  if (static_cast<std::size_t>(psi.amplitudes.size()) != psi.basis->size())
    throw UsageError("wave packet size does not match its basis");
}

}  // namespace

std::complex<double> WavePacket::amplitude(LevelId id) const {
  return amplitudes(static_cast<Eigen::Index>(basis->index(id)));
}

EncodeSpec EncodeSpec::equal(std::vector<LevelId> levels, std::vector<double> phases) {
  EncodeSpec s;
  const double a = 1.0 / std::sqrt(static_cast<double>(levels.size()));
  s.amplitudes.assign(levels.size(), a);
  if (phases.empty()) phases.assign(levels.size(), 0.0);
  s.phases = std::move(phases);
  s.levels = std::move(levels);
  return s;
}

ReferenceSpec ReferenceSpec::identical_to(const EncodeSpec& encode, double global_phase) {
  ReferenceSpec r;
  r.levels = encode.levels;
  for (std::size_t i = 0; i < encode.levels.size(); ++i)
    r.amplitudes.push_back(encode.amplitudes.at(i) * phase_factor(encode.phases.at(i)));
  r.global_phase = global_phase;
  return r;
}

double PulseSequence::measurement_time() const {
  if (t_meas_ps) return *t_meas_ps;
  if (t2_ps) return *t2_ps + 1.0;
  if (t1_ps) return *t1_ps + 1.0;
  return 1.0;
}

void PulseSequence::validate() const {
  if (t2_ps && !t1_ps) throw ConfigError("second kick requires a first kick");
  if (t1_ps && !(*t1_ps > 0.0)) throw ConfigError("T1 must be positive");
  if (t1_ps && t2_ps && !(*t2_ps > *t1_ps)) throw ConfigError("T2 must exceed T1");
  const double last = t2_ps ? *t2_ps : (t1_ps ? *t1_ps : 0.0);
  if (!(measurement_time() > last)) throw ConfigError("measurement must follow the last kick");
}

WavePacket encode_register(std::shared_ptr<const BasisSet> basis, const EncodeSpec& spec) {
  if (!basis) throw UsageError("encode_register: null basis");
  if (spec.levels.empty()) throw UsageError("encode_register: no levels");
  if (spec.amplitudes.size() != spec.levels.size() || spec.phases.size() != spec.levels.size())
    throw UsageError("encode_register: levels, amplitudes and phases differ in length");
  double total = 0.0;
  for (const double a : spec.amplitudes) total += a * a;
  if (std::abs(total - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "encode_register: squared amplitudes sum to " << total << ", expected 1";
    throw UsageError(msg.str());
  }
  WavePacket psi;
  psi.amplitudes = ComplexVector::Zero(static_cast<Eigen::Index>(basis->size()));
  for (std::size_t i = 0; i < spec.levels.size(); ++i) {
    const auto idx = basis->find(spec.levels[i]);
    if (!idx || !basis->is_register(*idx))
      throw UsageError("encode_register: " + spec.levels[i].label() + " is not a register level");
    psi.amplitudes(static_cast<Eigen::Index>(*idx)) +=
        spec.amplitudes[i] * phase_factor(spec.phases[i]);
  }
  psi.basis = std::move(basis);
  return psi;
}

WavePacket free_evolve(const WavePacket& psi, double dt_ps) {
  check_basis(psi);
  if (!(dt_ps >= 0.0)) throw DomainError("free_evolve: negative time step");
  WavePacket out = psi;
  const double dt = units::ps_to_au(dt_ps);
  for (Eigen::Index a = 0; a < out.amplitudes.size(); ++a)
    out.amplitudes(a) *= phase_factor(-psi.basis->level(static_cast<std::size_t>(a)).energy * dt);
  out.time_ps = psi.time_ps + dt_ps;
  return out;
}

WavePacket apply_kick(const WavePacket& psi, const KickOperator& kick) {
  check_basis(psi);
  if (kick.basis_hash != psi.basis->hash() || kick.size() != psi.basis->size())
    throw UsageError("apply_kick: kick operator was built on a different basis");
  WavePacket out = psi;
  out.amplitudes = kick.matrix * psi.amplitudes;
  return out;
}

WavePacket run_sequence(const PulseSequence& seq, std::shared_ptr<const BasisSet> basis,
                        const KickOperator& first, const KickOperator& second) {
  seq.validate();
  WavePacket psi = encode_register(std::move(basis), seq.encode);
  if (seq.t1_ps) {
    psi = apply_kick(free_evolve(psi, *seq.t1_ps - psi.time_ps), first);
    if (seq.t2_ps) psi = apply_kick(free_evolve(psi, *seq.t2_ps - psi.time_ps), second);
  }
  return free_evolve(psi, seq.measurement_time() - psi.time_ps);
}

ComplexVector interaction_picture(const WavePacket& psi) {
  check_basis(psi);
  ComplexVector out = psi.amplitudes;
  const double t = units::ps_to_au(psi.time_ps);
  for (Eigen::Index a = 0; a < out.size(); ++a)
    out(a) *= phase_factor(psi.basis->level(static_cast<std::size_t>(a)).energy * t);
  return out;
}

ResolvedReference resolve_reference(const BasisSet& basis, const ReferenceSpec& ref) {
  if (ref.levels.size() != ref.amplitudes.size())
    throw UsageError("reference: levels and amplitudes differ in length");
  ResolvedReference out;
  const auto theta = phase_factor(ref.global_phase);
  for (std::size_t i = 0; i < ref.levels.size(); ++i) {
    const auto idx = basis.find(ref.levels[i]);
    if (!idx || !basis.is_register(*idx))
      throw UsageError("reference: " + ref.levels[i].label() + " is not a register level");
    out.indices.push_back(*idx);
    out.amplitudes.push_back(ref.amplitudes[i] * theta);
  }
  return out;
}

HolographicReadout::HolographicReadout(const WavePacket& data, const ReferenceSpec& ref) {
  check_basis(data);
  const auto& basis = *data.basis;
  const auto resolved = resolve_reference(basis, ref);
  const ComplexVector c = interaction_picture(data);
  static_populations_.resize(basis.size());
  for (std::size_t a = 0; a < basis.size(); ++a)
    static_populations_[a] = std::norm(c(static_cast<Eigen::Index>(a)));
  indices_ = resolved.indices;
  reference_ = resolved.amplitudes;
  for (const auto a : indices_) {
    data_.push_back(c(static_cast<Eigen::Index>(a)));
    omega_.push_back(basis.level(a).omega);
  }
}

void HolographicReadout::populations(double tau_ps, std::span<double> out) const {
  if (!(tau_ps >= 0.0)) throw DomainError("holographic_populations: negative delay");
  if (out.size() != size()) throw UsageError("holographic_populations: output size mismatch");
  std::copy(static_populations_.begin(), static_populations_.end(), out.begin());
  const double tau = units::ps_to_au(tau_ps);
  for (std::size_t i = 0; i < indices_.size(); ++i)
    out[indices_[i]] = std::norm(data_[i] * phase_factor(-omega_[i] * tau) + reference_[i]);
}

std::vector<double> holographic_populations(const WavePacket& data, const ReferenceSpec& ref,
                                            double tau_ps) {
  const HolographicReadout readout(data, ref);
  std::vector<double> p(readout.size());
  readout.populations(tau_ps, p);
  return p;
}

}  // namespace rydreg
