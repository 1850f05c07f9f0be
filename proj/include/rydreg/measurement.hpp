#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rydreg/atomic_basis.hpp"
#include "rydreg/register_sim.hpp"

namespace rydreg {

struct SsfiBin {
  std::string name;
  std::vector<std::size_t> levels;  // basis indices
  double sigma_n = 0.0;             // additive noise per shot, population units
  bool measured = true;             // enters the correlation analysis
  // Carrier frequency of the bin: omega of its register level, 0 otherwise.
  double omega = 0.0;
};

// Field-ionization readout: basis levels merged into detector channels.
// Population outside every bin is reported as lost.
struct SsfiModel {
  std::vector<SsfiBin> bins;
  double merge_window_au = 1e-5;
  bool clip_negative = false;

  std::uint64_t hash() const;
  // Throws ConfigError when a level sits in two bins or a register level in
  // none.
  void validate(const BasisSet& basis) const;
};

// One measured bin per register level holding every level within the merge
// window of its energy (for Cs this joins np and (n-1)d), plus one unmeasured
// bin per s level with n in the register range.
SsfiModel default_ssfi_model(const BasisSet& basis, double sigma_n, double merge_window_au = 1e-5);

struct BinnedPopulations {
  std::vector<double> bins;
  double lost = 0.0;
};

BinnedPopulations ssfi_bin(std::span<const double> populations, const SsfiModel& model);

// Adds N(0, sigma[b]^2) to each bin, drawing in bin order from rng.
void add_noise(std::span<double> bins, std::span<const double> sigma, std::mt19937_64& rng);
std::vector<double> add_noise(std::span<const double> bins, std::span<const double> sigma,
                              std::uint64_t seed);

// Fine delay windows centered on coarse points.
struct TauGrid {
  std::vector<double> centers_ps;
  double window_ps = 0.060;
  double step_ps = 0.0004;

  std::size_t points_per_window() const;
  std::size_t size() const { return centers_ps.size() * points_per_window(); }
  double tau(std::size_t window, std::size_t point) const;

  // count centers start, start + spacing, ...
  static TauGrid regular(double start_ps, double spacing_ps, std::size_t count, double window_ps,
                         double step_ps);
};

struct ScanOptions {
  std::size_t shots = 200;
  std::uint64_t seed = 1;
  bool keep_shots = false;
};

// Shot-averaged (and optionally per-shot) binned populations over a TauGrid.
struct ScanDataset {
  TauGrid grid;
  std::vector<std::string> bin_names;
  std::vector<double> bin_omega;
  std::vector<double> bin_sigma;
  std::vector<bool> bin_measured;
  std::size_t shots = 0;
  std::uint64_t seed = 0;
  bool clipped = false;
  std::string descriptor;
  // means[(w * points + i) * bins + b]
  std::vector<double> means;
  // samples[((w * points + i) * shots + s) * bins + b], empty unless kept
  std::vector<double> samples;
  std::vector<double> lost;  // per tau point, noise free

  std::size_t bin_count() const { return bin_names.size(); }
  std::size_t bin_index(std::string_view name) const;  // throws UsageError
  double mean(std::size_t w, std::size_t i, std::size_t b) const {
    return means[(w * grid.points_per_window() + i) * bin_count() + b];
  }
  std::uint64_t hash() const;
};

// Noise-free populations are formed once per delay; shots add noise drawn
// from a stream seeded by (seed, tau index).
ScanDataset tau_scan(const WavePacket& data, const ReferenceSpec& reference, const TauGrid& grid,
                     const SsfiModel& model, const ScanOptions& options,
                     std::string descriptor = {});

ScanDataset tau_scan(const PulseSequence& seq, std::shared_ptr<const BasisSet> basis,
                     const KickOperator& first, const KickOperator& second, const TauGrid& grid,
                     const SsfiModel& model, const ScanOptions& options);

// CSV: metadata block then `tau_ps,bin,shot,population`. Shot-averaged rows
// carry shot = -1 when per-shot samples were not kept.
void write_dataset_csv(const std::filesystem::path& path, const ScanDataset& data);
ScanDataset read_dataset_csv(const std::filesystem::path& path);

// Binary layout, little-endian:
//   char[8] "RYDSCAN1" | u64 windows | u64 points | u64 bins | u64 shots |
//   u64 seed | u64 clipped | f64 window_ps | f64 step_ps | f64 centers[windows] |
//   per bin: u64 name_len, name bytes, f64 omega, f64 sigma, u64 measured |
//   u64 descriptor_len, bytes | f64 means[windows * points * bins] (row-major) |
//   f64 lost[windows * points]
void save_dataset(const std::filesystem::path& path, const ScanDataset& data);
ScanDataset load_dataset(const std::filesystem::path& path);

std::uint64_t split_mix64(std::uint64_t x);

}  // namespace rydreg
