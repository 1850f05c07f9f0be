#include "rydreg/measurement.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "rydreg/binary_io.hpp"
#include "rydreg/csv.hpp"
#include "rydreg/errors.hpp"
#include "rydreg/hash.hpp"
#include "rydreg/parallel.hpp"

namespace rydreg {

namespace {

constexpr char kMagic[8] = {'R', 'Y', 'D', 'S', 'C', 'A', 'N', '1'};

}  // namespace

std::uint64_t split_mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t SsfiModel::hash() const {
  Fnv1a h;
  for (const auto& bin : bins) {
    h.add(std::string_view(bin.name));
    h.add(static_cast<std::uint64_t>(bin.levels.size()));
    for (const auto l : bin.levels) h.add(static_cast<std::uint64_t>(l));
    h.add(bin.sigma_n);
    h.add(static_cast<std::uint64_t>(bin.measured));
    h.add(bin.omega);
  }
  h.add(merge_window_au);
  h.add(static_cast<std::uint64_t>(clip_negative));
  return h.value();
}

void SsfiModel::validate(const BasisSet& basis) const {
  std::vector<int> owner(basis.size(), -1);
  for (std::size_t b = 0; b < bins.size(); ++b) {
    if (bins[b].sigma_n < 0.0) throw ConfigError("bin " + bins[b].name + ": negative noise");
    for (const auto a : bins[b].levels) {
      if (a >= basis.size()) throw ConfigError("bin " + bins[b].name + ": level outside basis");
      if (owner[a] >= 0)
        throw ConfigError(basis.level(a).label() + " belongs to bins " +
                          bins[static_cast<std::size_t>(owner[a])].name + " and " + bins[b].name);
      owner[a] = static_cast<int>(b);
    }
  }
  for (const auto r : basis.register_indices())
    if (owner[r] < 0) throw ConfigError("register level " + basis.level(r).label() + " is unbinned");
}

SsfiModel default_ssfi_model(const BasisSet& basis, double sigma_n, double merge_window_au) {
  SsfiModel model;
  model.merge_window_au = merge_window_au;
  const auto& reg = basis.register_indices();
  std::vector<int> owner(basis.size(), -1);
  for (std::size_t a = 0; a < basis.size(); ++a) {
    double best = merge_window_au;
    for (std::size_t r = 0; r < reg.size(); ++r) {
      const double d = std::abs(basis.level(a).energy - basis.level(reg[r]).energy);
      if (d < best || a == reg[r]) {
        best = a == reg[r] ? -1.0 : d;
        owner[a] = static_cast<int>(r);
      }
    }
  }
  for (std::size_t r = 0; r < reg.size(); ++r) {
    SsfiBin bin;
    bin.name = basis.level(reg[r]).label();
    bin.sigma_n = sigma_n;
    bin.omega = basis.level(reg[r]).omega;
    for (std::size_t a = 0; a < basis.size(); ++a)
      if (owner[a] == static_cast<int>(r)) bin.levels.push_back(a);
    model.bins.push_back(std::move(bin));
  }
  for (const int n : basis.config().register_n) {
    const auto idx = basis.find({n, 0});
    if (!idx || owner[*idx] >= 0) continue;
    SsfiBin bin;
    bin.name = basis.level(*idx).label();
    bin.sigma_n = sigma_n;
    bin.measured = false;
    bin.levels.push_back(*idx);
    model.bins.push_back(std::move(bin));
  }
  model.validate(basis);
  return model;
}

BinnedPopulations ssfi_bin(std::span<const double> populations, const SsfiModel& model) {
  BinnedPopulations out;
  out.bins.resize(model.bins.size(), 0.0);
  double total = 0.0;
  for (const double p : populations) total += p;
  double binned = 0.0;
  for (std::size_t b = 0; b < model.bins.size(); ++b) {
    for (const auto a : model.bins[b].levels) {
      if (a >= populations.size()) throw UsageError("ssfi_bin: level index outside populations");
      out.bins[b] += populations[a];
    }
    binned += out.bins[b];
  }
  out.lost = total - binned;
  return out;
}

void add_noise(std::span<double> bins, std::span<const double> sigma, std::mt19937_64& rng) {
  if (bins.size() != sigma.size()) throw UsageError("add_noise: size mismatch");
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t b = 0; b < bins.size(); ++b) bins[b] += sigma[b] * normal(rng);
}

std::vector<double> add_noise(std::span<const double> bins, std::span<const double> sigma,
                              std::uint64_t seed) {
  std::vector<double> out(bins.begin(), bins.end());
  std::mt19937_64 rng(split_mix64(seed));
  add_noise(out, sigma, rng);
  return out;
}

std::size_t TauGrid::points_per_window() const {
  if (!(step_ps > 0.0) || !(window_ps > 0.0)) throw ConfigError("tau grid: non-positive step");
  return static_cast<std::size_t>(std::floor(window_ps / step_ps + 1e-9)) + 1;
}

double TauGrid::tau(std::size_t window, std::size_t point) const {
  const double half = 0.5 * static_cast<double>(points_per_window() - 1) * step_ps;
  return centers_ps[window] - half + static_cast<double>(point) * step_ps;
}

TauGrid TauGrid::regular(double start_ps, double spacing_ps, std::size_t count, double window_ps,
                         double step_ps) {
  TauGrid g;
  g.window_ps = window_ps;
  g.step_ps = step_ps;
  for (std::size_t i = 0; i < count; ++i)
    g.centers_ps.push_back(start_ps + spacing_ps * static_cast<double>(i));
  return g;
}

std::size_t ScanDataset::bin_index(std::string_view name) const {
  for (std::size_t b = 0; b < bin_names.size(); ++b)
    if (bin_names[b] == name) return b;
  throw UsageError("dataset has no bin '" + std::string(name) + "'");
}

std::uint64_t ScanDataset::hash() const {
  Fnv1a h;
  for (const double c : grid.centers_ps) h.add(c);
  h.add(grid.window_ps);
  h.add(grid.step_ps);
  for (std::size_t b = 0; b < bin_count(); ++b) {
    h.add(std::string_view(bin_names[b]));
    h.add(bin_omega[b]);
    h.add(bin_sigma[b]);
  }
  h.add(static_cast<std::uint64_t>(shots));
  h.add(seed);
  for (const double m : means) h.add(m);
  return h.value();
}

ScanDataset tau_scan(const WavePacket& data, const ReferenceSpec& reference, const TauGrid& grid,
                     const SsfiModel& model, const ScanOptions& options, std::string descriptor) {
  if (options.shots == 0) throw ConfigError("tau_scan: shots must be positive");
  model.validate(*data.basis);
  const HolographicReadout readout(data, reference);

  ScanDataset out;
  out.grid = grid;
  out.shots = options.shots;
  out.seed = options.seed;
  out.clipped = model.clip_negative;
  out.descriptor = std::move(descriptor);
  for (const auto& bin : model.bins) {
    out.bin_names.push_back(bin.name);
    out.bin_omega.push_back(bin.omega);
    out.bin_sigma.push_back(bin.sigma_n);
    out.bin_measured.push_back(bin.measured);
  }

  const std::size_t points = grid.points_per_window();
  const std::size_t total = grid.size();
  const std::size_t nb = model.bins.size();
  out.means.assign(total * nb, 0.0);
  out.lost.assign(total, 0.0);
  if (options.keep_shots) out.samples.assign(total * options.shots * nb, 0.0);

  parallel_for(total, [&](std::size_t t) {
    std::vector<double> levels(readout.size());
    readout.populations(grid.tau(t / points, t % points), levels);
    const auto binned = ssfi_bin(levels, model);
    out.lost[t] = binned.lost;

    std::mt19937_64 rng(split_mix64(options.seed ^ split_mix64(t)));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> sum(nb, 0.0);
    for (std::size_t s = 0; s < options.shots; ++s) {
      for (std::size_t b = 0; b < nb; ++b) {
        double v = binned.bins[b];
        if (model.bins[b].sigma_n > 0.0) v += model.bins[b].sigma_n * normal(rng);
        if (model.clip_negative && v < 0.0) v = 0.0;
        sum[b] += v;
        if (options.keep_shots) out.samples[(t * options.shots + s) * nb + b] = v;
      }
    }
    for (std::size_t b = 0; b < nb; ++b)
      out.means[t * nb + b] = sum[b] / static_cast<double>(options.shots);
  });
  return out;
}

ScanDataset tau_scan(const PulseSequence& seq, std::shared_ptr<const BasisSet> basis,
                     const KickOperator& first, const KickOperator& second, const TauGrid& grid,
                     const SsfiModel& model, const ScanOptions& options) {
  const auto data = run_sequence(seq, std::move(basis), first, second);
  std::ostringstream desc;
  desc << "T1=" << (seq.t1_ps ? format_double(*seq.t1_ps) : "none")
       << " T2=" << (seq.t2_ps ? format_double(*seq.t2_ps) : "none")
       << " Q1=" << format_double(seq.q1) << " Q2=" << format_double(seq.q2)
       << " t_meas=" << format_double(seq.measurement_time());
  return tau_scan(data, seq.reference, grid, model, options, desc.str());
}

void write_dataset_csv(const std::filesystem::path& path, const ScanDataset& data) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  MetaHeader meta;
  meta.set("version", std::string(kVersion));
  meta.set("kind", "scan");
  meta.set("descriptor", data.descriptor);
  meta.set("seed", std::to_string(data.seed));
  meta.set_int("shots", static_cast<long long>(data.shots));
  meta.set("shots_stored", data.samples.empty() ? "mean" : "all");
  meta.set("clipped", data.clipped ? "true" : "false");
  meta.set("window_ps", data.grid.window_ps);
  meta.set("step_ps", data.grid.step_ps);
  meta.set("centers_ps", join_doubles(data.grid.centers_ps));
  std::string names;
  std::string measured;
  for (std::size_t b = 0; b < data.bin_count(); ++b) {
    names += (b ? ";" : "") + data.bin_names[b];
    measured += (b ? ";" : "") + std::string(data.bin_measured[b] ? "1" : "0");
  }
  meta.set("bins", names);
  meta.set("bin_omega_au", join_doubles(data.bin_omega));
  meta.set("bin_sigma", join_doubles(data.bin_sigma));
  meta.set("bin_measured", measured);
  std::ostringstream hash;
  hash << std::hex << data.hash();
  meta.set("dataset_hash", hash.str());
  meta.write(out);
  out << "tau_ps,bin,shot,population\n";

  const std::size_t points = data.grid.points_per_window();
  const std::size_t nb = data.bin_count();
  for (std::size_t w = 0; w < data.grid.centers_ps.size(); ++w) {
    for (std::size_t i = 0; i < points; ++i) {
      const std::size_t t = w * points + i;
      const auto tau = format_double(data.grid.tau(w, i));
      for (std::size_t b = 0; b < nb; ++b) {
        if (data.samples.empty()) {
          out << tau << ',' << data.bin_names[b] << ",-1," << format_double(data.means[t * nb + b])
              << '\n';
          continue;
        }
        for (std::size_t s = 0; s < data.shots; ++s)
          out << tau << ',' << data.bin_names[b] << ',' << s << ','
              << format_double(data.samples[(t * data.shots + s) * nb + b]) << '\n';
      }
    }
  }
}

ScanDataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::string header;
  const auto meta = read_meta(in, header);
  if (header != "tau_ps,bin,shot,population")
    throw ConfigError(path.string() + ": unexpected header '" + header + "'");

  ScanDataset data;
  data.descriptor = meta.find("descriptor") ? *meta.find("descriptor") : "";
  data.seed = std::stoull(meta.get("seed"));
  data.shots = std::stoull(meta.get("shots"));
  data.clipped = meta.get("clipped") == "true";
  data.grid.window_ps = parse_double(meta.get("window_ps"));
  data.grid.step_ps = parse_double(meta.get("step_ps"));
  data.grid.centers_ps = parse_doubles(meta.get("centers_ps"));
  data.bin_names = split(meta.get("bins"), ';');
  data.bin_omega = parse_doubles(meta.get("bin_omega_au"));
  data.bin_sigma = parse_doubles(meta.get("bin_sigma"));
  for (const auto& m : split(meta.get("bin_measured"), ';')) data.bin_measured.push_back(m == "1");
  const std::size_t nb = data.bin_count();
  if (data.bin_omega.size() != nb || data.bin_sigma.size() != nb || data.bin_measured.size() != nb)
    throw ConfigError(path.string() + ": inconsistent bin metadata");

  std::map<std::string, std::size_t, std::less<>> bin_of;
  for (std::size_t b = 0; b < nb; ++b) bin_of[data.bin_names[b]] = b;
  const std::size_t points = data.grid.points_per_window();
  const std::size_t total = data.grid.size();
  data.means.assign(total * nb, 0.0);
  std::vector<std::size_t> counts(total * nb, 0);

  // Rows are grouped by tau point in grid order.
  std::string line;
  std::size_t t = 0;
  std::string last_tau;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != 4) throw ConfigError(path.string() + ": malformed row '" + line + "'");
    if (last_tau.empty()) {
      last_tau = cols[0];
    } else if (cols[0] != last_tau) {
      last_tau = cols[0];
      ++t;
    }
    if (t >= total) throw ConfigError(path.string() + ": more tau points than the grid holds");
    const auto it = bin_of.find(cols[1]);
    if (it == bin_of.end()) throw ConfigError(path.string() + ": unknown bin " + cols[1]);
    const double expected = data.grid.tau(t / points, t % points);
    if (std::abs(parse_double(cols[0]) - expected) > 1e-9)
      throw ConfigError(path.string() + ": tau column does not follow the grid");
    data.means[t * nb + it->second] += parse_double(cols[3]);
    ++counts[t * nb + it->second];
  }
  for (std::size_t i = 0; i < data.means.size(); ++i) {
    if (counts[i] == 0) throw ConfigError(path.string() + ": missing samples");
    data.means[i] /= static_cast<double>(counts[i]);
  }
  data.lost.assign(total, 0.0);
  return data;
}

void save_dataset(const std::filesystem::path& path, const ScanDataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  const std::size_t points = data.grid.points_per_window();
  binary::write_u64(out, data.grid.centers_ps.size());
  binary::write_u64(out, points);
  binary::write_u64(out, data.bin_count());
  binary::write_u64(out, data.shots);
  binary::write_u64(out, data.seed);
  binary::write_u64(out, data.clipped ? 1 : 0);
  binary::write_f64(out, data.grid.window_ps);
  binary::write_f64(out, data.grid.step_ps);
  for (const double c : data.grid.centers_ps) binary::write_f64(out, c);
  for (std::size_t b = 0; b < data.bin_count(); ++b) {
    binary::write_u64(out, data.bin_names[b].size());
    out.write(data.bin_names[b].data(), static_cast<std::streamsize>(data.bin_names[b].size()));
    binary::write_f64(out, data.bin_omega[b]);
    binary::write_f64(out, data.bin_sigma[b]);
    binary::write_u64(out, data.bin_measured[b] ? 1 : 0);
  }
  binary::write_u64(out, data.descriptor.size());
  out.write(data.descriptor.data(), static_cast<std::streamsize>(data.descriptor.size()));
  for (const double m : data.means) binary::write_f64(out, m);
  for (const double l : data.lost) binary::write_f64(out, l);
}

ScanDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + 8, kMagic))
    throw ConfigError(path.string() + ": not a scan dataset");
  const auto read_string = [&in] {
    const auto len = binary::read_u64(in);
    if (len > (1u << 20)) throw ConfigError("scan dataset: corrupt string length");
    std::string s(len, '\0');
    in.read(s.data(), static_cast<std::streamsize>(len));
    return s;
  };
  ScanDataset data;
  const auto windows = binary::read_u64(in);
  const auto points = binary::read_u64(in);
  const auto nb = binary::read_u64(in);
  data.shots = binary::read_u64(in);
  data.seed = binary::read_u64(in);
  data.clipped = binary::read_u64(in) != 0;
  data.grid.window_ps = binary::read_f64(in);
  data.grid.step_ps = binary::read_f64(in);
  if (!in || windows > (1u << 24) || nb > 4096) throw ConfigError(path.string() + ": corrupt header");
  for (std::uint64_t w = 0; w < windows; ++w) data.grid.centers_ps.push_back(binary::read_f64(in));
  for (std::uint64_t b = 0; b < nb; ++b) {
    data.bin_names.push_back(read_string());
    data.bin_omega.push_back(binary::read_f64(in));
    data.bin_sigma.push_back(binary::read_f64(in));
    data.bin_measured.push_back(binary::read_u64(in) != 0);
  }
  data.descriptor = read_string();
  if (data.grid.points_per_window() != points)
    throw ConfigError(path.string() + ": window does not match point count");
  data.means.resize(windows * points * nb);
  for (auto& m : data.means) m = binary::read_f64(in);
  data.lost.resize(windows * points);
  for (auto& l : data.lost) l = binary::read_f64(in);
  if (!in) throw ConfigError(path.string() + ": truncated");
  return data;
}

}  // namespace rydreg
