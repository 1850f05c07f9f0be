#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rydreg/csv.hpp"
#include "rydreg/measurement.hpp"

namespace rydreg {

struct CorrelationSamples {
  std::vector<double> tau_ps;  // window centers
  std::vector<double> r;
};

// Pearson correlation of the shot-averaged bins j and k inside each window.
// With check_window, throws ConfigError naming the pair unless the window
// holds at least 20 carrier periods and at most 0.15 beat periods.
CorrelationSamples windowed_correlation(const ScanDataset& data, std::size_t j, std::size_t k,
                                        bool check_window = true);

double pearson(std::span<const double> x, std::span<const double> y);

enum class PhaseUncertainty { Bootstrap, Covariance };

struct FitOptions {
  std::size_t bootstrap = 100;
  std::uint64_t seed = 24301;
  double vanish_factor = 2.0;
  PhaseUncertainty uncertainty = PhaseUncertainty::Bootstrap;
};

std::string_view to_string(PhaseUncertainty mode);
PhaseUncertainty parse_phase_uncertainty(std::string_view text);  // throws ConfigError

struct CorrelationFit {
  std::size_t j = 0;
  std::size_t k = 0;
  std::string j_name;
  std::string k_name;
  double omega = 0.0;      // omega_j - omega_k, a.u.
  double amplitude = 0.0;  // A >= 0
  double phi = 0.0;        // [0, 2 pi)
  double dphi = 0.0;       // (0, 2 pi]
  double amplitude_std = 0.0;
  bool vanished = false;
  bool flagged = false;  // ill-conditioned fit
  CorrelationSamples samples;
};

// Least-squares fit of r(tau) = A cos(Phi - omega tau) with omega known. The
// bootstrap resamples windows; dphi is the circular standard deviation of the
// resampled Phi and amplitude_std the RMS spread of the resampled
// (A cos Phi, A sin Phi) around the full fit. A <= vanish_factor *
// amplitude_std sets dphi = 2 pi. In Covariance mode both spreads come from
// the least-squares parameter covariance instead. Never throws on a bad fit.
CorrelationFit fit_correlation(const CorrelationSamples& samples, double omega_jk,
                               const FitOptions& options = {});

// Expected fringe amplitude under additive noise; factors clamp at zero.
// Throws DomainError for sigma_meas <= 0.
double predicted_amplitude(double sigma_n_j, double sigma_meas_j, double sigma_n_k,
                           double sigma_meas_k, double r_jk);

// (N - 1) / sum 1/dPhi_jk. Throws DomainError on an empty list or values
// outside (0, 2 pi].
double phase_uncertainty(std::span<const double> dphi);

// log2(2 pi / dphi). Throws DomainError outside (0, 2 pi].
double info_bits(double dphi);

// Sum of info_bits over the register. Throws AccountingError when a
// register state has no entry.
double total_info(const std::map<std::string, double>& dphi_by_state,
                  std::span<const std::string> register_states);

struct StateInfo {
  std::string name;
  double dphi = 0.0;
  double bits = 0.0;
  double phase = 0.0;  // relative to the first register state
};

struct InfoReport {
  std::vector<CorrelationFit> fits;
  std::vector<StateInfo> states;
  double total_bits = 0.0;
  std::size_t n_states = 0;
  std::uint64_t dataset_hash = 0;
  FitOptions options;

  const CorrelationFit& fit(std::string_view j, std::string_view k) const;
  const StateInfo& state(std::string_view name) const;
};

// Fits every pair of measured bins and aggregates per-state uncertainty.
InfoReport analyze(const ScanDataset& data, const FitOptions& options = {},
                   bool check_window = true);

// Report CSV: pair rows, state rows, TOTAL line.
void write_report_csv(const std::filesystem::path& path, const InfoReport& report,
                      const MetaHeader& meta);

}  // namespace rydreg
