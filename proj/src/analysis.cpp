#include "rydreg/analysis.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <random>
#include <sstream>

#include "rydreg/errors.hpp"
#include "rydreg/parallel.hpp"
#include "rydreg/units.hpp"

namespace rydreg {

namespace {

constexpr double kMinDphi = 1e-9;

struct LinearFit {
  double c = 0.0;  // A cos Phi
  double s = 0.0;  // A sin Phi
  // Normal matrix [[a11, a12], [a12, a22]] and its determinant.
  double a11 = 0.0, a12 = 0.0, a22 = 0.0, det = 0.0;
  bool ok = false;
};

LinearFit solve(std::span<const double> tau_au, std::span<const double> r,
                std::span<const std::size_t> rows, double omega) {
  double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
  for (const auto i : rows) {
    const double cw = std::cos(omega * tau_au[i]);
    const double sw = std::sin(omega * tau_au[i]);
    a11 += cw * cw;
    a12 += cw * sw;
    a22 += sw * sw;
    b1 += cw * r[i];
    b2 += sw * r[i];
  }
  LinearFit f;
  const double det = a11 * a22 - a12 * a12;
  f.a11 = a11;
  f.a12 = a12;
  f.a22 = a22;
  f.det = det;
  const double scale = (a11 + a22) * (a11 + a22);
  if (!(scale > 0.0) || det < 1e-10 * scale) return f;
  f.c = (a22 * b1 - a12 * b2) / det;
  f.s = (a11 * b2 - a12 * b1) / det;
  f.ok = std::isfinite(f.c) && std::isfinite(f.s);
  return f;
}

double wrap_phase(double phi) {
  phi = std::fmod(phi, units::two_pi);
  if (phi < 0.0) phi += units::two_pi;
  return phi >= units::two_pi ? 0.0 : phi;
}

// Residual-variance estimate of (c, s) spread propagated to amplitude and phase.
void covariance_spread(const LinearFit& f, std::span<const double> tau_au, std::span<const double> r,
                       double omega, CorrelationFit& fit) {
  const std::size_t n = r.size();
  if (n < 3) {
    fit.amplitude_std = fit.amplitude;
    fit.dphi = units::two_pi;
    return;
  }
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = r[i] - f.c * std::cos(omega * tau_au[i]) - f.s * std::sin(omega * tau_au[i]);
    rss += e * e;
  }
  const double s2 = rss / static_cast<double>(n - 2);
  const double var_c = s2 * f.a22 / f.det;
  const double var_s = s2 * f.a11 / f.det;
  const double cov = -s2 * f.a12 / f.det;
  fit.amplitude_std = std::sqrt(var_c + var_s);
  const double a2 = f.c * f.c + f.s * f.s;
  if (!(a2 > 0.0)) {
    fit.dphi = units::two_pi;
    return;
  }
  const double var_phi = (f.c * f.c * var_s + f.s * f.s * var_c - 2.0 * f.c * f.s * cov) / (a2 * a2);
  fit.dphi = std::clamp(std::sqrt(std::max(var_phi, 0.0)), kMinDphi, units::two_pi);
}

}  // namespace

std::string_view to_string(PhaseUncertainty mode) {
  return mode == PhaseUncertainty::Covariance ? "covariance" : "bootstrap";
}

PhaseUncertainty parse_phase_uncertainty(std::string_view text) {
  if (text == "bootstrap") return PhaseUncertainty::Bootstrap;
  if (text == "covariance") return PhaseUncertainty::Covariance;
  throw ConfigError("unknown phase uncertainty mode '" + std::string(text) +
                    "' (expected bootstrap or covariance)");
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw UsageError("pearson: need two equal series");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationSamples windowed_correlation(const ScanDataset& data, std::size_t j, std::size_t k,
                                        bool check_window) {
  if (j >= data.bin_count() || k >= data.bin_count())
    throw UsageError("windowed_correlation: bin index out of range");
  if (check_window) {
    const double window_au = units::ps_to_au(data.grid.window_ps);
    const double slowest = std::min(data.bin_omega[j], data.bin_omega[k]);
    const double beat = std::abs(data.bin_omega[j] - data.bin_omega[k]);
    const std::string pair = data.bin_names[j] + "/" + data.bin_names[k];
    if (!(slowest > 0.0) || window_au * slowest < 20.0 * units::two_pi)
      throw ConfigError("window shorter than 20 carrier periods for pair " + pair);
    if (beat > 0.0 && window_au * beat > 0.15 * units::two_pi)
      throw ConfigError("window longer than 0.15 beat periods for pair " + pair);
  }
  const std::size_t points = data.grid.points_per_window();
  const std::size_t nb = data.bin_count();
  CorrelationSamples out;
  std::vector<double> x(points), y(points);
  for (std::size_t w = 0; w < data.grid.centers_ps.size(); ++w) {
    for (std::size_t i = 0; i < points; ++i) {
      x[i] = data.means[(w * points + i) * nb + j];
      y[i] = data.means[(w * points + i) * nb + k];
    }
    out.tau_ps.push_back(data.grid.centers_ps[w]);
    out.r.push_back(pearson(x, y));
  }
  return out;
}

CorrelationFit fit_correlation(const CorrelationSamples& samples, double omega_jk,
                               const FitOptions& options) {
  CorrelationFit fit;
  fit.omega = omega_jk;
  fit.samples = samples;
  fit.dphi = units::two_pi;
  const std::size_t n = samples.r.size();
  if (samples.tau_ps.size() != n) throw UsageError("fit_correlation: size mismatch");

  std::vector<double> tau_au(n);
  for (std::size_t i = 0; i < n; ++i) tau_au[i] = units::ps_to_au(samples.tau_ps[i]);
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;

  const auto full = solve(tau_au, samples.r, rows, omega_jk);
  if (n < 2 || !full.ok) {
    fit.flagged = true;
    fit.vanished = true;
    return fit;
  }
  fit.amplitude = std::hypot(full.c, full.s);
  fit.phi = wrap_phase(std::atan2(full.s, full.c));

  if (options.uncertainty == PhaseUncertainty::Covariance) {
    covariance_spread(full, tau_au, samples.r, omega_jk, fit);
    if (fit.amplitude <= options.vanish_factor * fit.amplitude_std) {
      fit.vanished = true;
      fit.dphi = units::two_pi;
    }
    return fit;
  }

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::complex<double> mean_dir = 0.0;
  double spread = 0.0;
  std::size_t good = 0;
  for (std::size_t b = 0; b < options.bootstrap; ++b) {
    for (auto& row : rows) row = pick(rng);
    const auto f = solve(tau_au, samples.r, rows, omega_jk);
    if (!f.ok) continue;
    ++good;
    spread += (f.c - full.c) * (f.c - full.c) + (f.s - full.s) * (f.s - full.s);
    const double a = std::hypot(f.c, f.s);
    if (a > 0.0) mean_dir += std::complex<double>(f.c / a, f.s / a);
  }
  if (options.bootstrap > 0 && 2 * good < options.bootstrap) {
    fit.flagged = true;
    fit.vanished = true;
    return fit;
  }
  if (good > 0) {
    fit.amplitude_std = std::sqrt(spread / static_cast<double>(good));
    const double resultant = std::abs(mean_dir) / static_cast<double>(good);
    const double circ = resultant > 0.0 ? std::sqrt(-2.0 * std::log(std::min(resultant, 1.0)))
                                        : units::two_pi;
    fit.dphi = std::clamp(circ, kMinDphi, units::two_pi);
  }
  if (fit.amplitude <= options.vanish_factor * fit.amplitude_std) {
    fit.vanished = true;
    fit.dphi = units::two_pi;
  }
  return fit;
}

double predicted_amplitude(double sigma_n_j, double sigma_meas_j, double sigma_n_k,
                           double sigma_meas_k, double r_jk) {
  if (!(sigma_meas_j > 0.0) || !(sigma_meas_k > 0.0))
    throw DomainError("predicted_amplitude: measured deviation must be positive");
  const double fj = std::max(0.0, 1.0 - (sigma_n_j * sigma_n_j) / (sigma_meas_j * sigma_meas_j));
  const double fk = std::max(0.0, 1.0 - (sigma_n_k * sigma_n_k) / (sigma_meas_k * sigma_meas_k));
  return std::sqrt(fj * fk) * r_jk;
}

double phase_uncertainty(std::span<const double> dphi) {
  if (dphi.empty()) throw DomainError("phase_uncertainty: no partner states");
  double inv = 0.0;
  for (const double d : dphi) {
    if (!(d > 0.0) || d > units::two_pi * (1.0 + 1e-12))
      throw DomainError("phase_uncertainty: value outside (0, 2pi]");
    inv += 1.0 / d;
  }
  return static_cast<double>(dphi.size()) / inv;
}

double info_bits(double dphi) {
  if (!(dphi > 0.0) || dphi > units::two_pi * (1.0 + 1e-12))
    throw DomainError("info_bits: phase uncertainty outside (0, 2pi]");
  return std::max(0.0, std::log2(units::two_pi / dphi));
}

double total_info(const std::map<std::string, double>& dphi_by_state,
                  std::span<const std::string> register_states) {
  double total = 0.0;
  for (const auto& s : register_states) {
    const auto it = dphi_by_state.find(s);
    if (it == dphi_by_state.end()) throw AccountingError("no phase uncertainty for state " + s);
    total += info_bits(it->second);
  }
  return total;
}

const CorrelationFit& InfoReport::fit(std::string_view j, std::string_view k) const {
  for (const auto& f : fits)
    if ((f.j_name == j && f.k_name == k) || (f.j_name == k && f.k_name == j)) return f;
  throw UsageError("report has no pair " + std::string(j) + "/" + std::string(k));
}

const StateInfo& InfoReport::state(std::string_view name) const {
  for (const auto& s : states)
    if (s.name == name) return s;
  throw UsageError("report has no state " + std::string(name));
}

InfoReport analyze(const ScanDataset& data, const FitOptions& options, bool check_window) {
  std::vector<std::size_t> measured;
  for (std::size_t b = 0; b < data.bin_count(); ++b)
    if (data.bin_measured[b]) measured.push_back(b);
  if (measured.size() < 2) throw ConfigError("analysis needs at least two measured bins");

  InfoReport report;
  report.options = options;
  report.dataset_hash = data.hash();
  report.n_states = measured.size();

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < measured.size(); ++a)
    for (std::size_t b = a + 1; b < measured.size(); ++b) pairs.emplace_back(a, b);

  if (check_window) {
    const auto& centers = data.grid.centers_ps;
    const double span = centers.empty() ? 0.0 : units::ps_to_au(centers.back() - centers.front());
    for (const auto& [a, b] : pairs) {
      const double beat = std::abs(data.bin_omega[measured[a]] - data.bin_omega[measured[b]]);
      if (centers.size() < 8 || !(span * beat >= units::two_pi))
        throw ConfigError("coarse delays do not cover one beat period of " +
                          data.bin_names[measured[a]] + "/" + data.bin_names[measured[b]]);
    }
  }

  report.fits.resize(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t p) {
    const auto j = measured[pairs[p].first];
    const auto k = measured[pairs[p].second];
    FitOptions opts = options;
    opts.seed = split_mix64(options.seed ^ split_mix64(p));
    auto fit = fit_correlation(windowed_correlation(data, j, k, check_window),
                               data.bin_omega[j] - data.bin_omega[k], opts);
    fit.j = j;
    fit.k = k;
    fit.j_name = data.bin_names[j];
    fit.k_name = data.bin_names[k];
    report.fits[p] = std::move(fit);
  });

  std::map<std::string, double> dphi_by_state;
  std::vector<std::string> names;
  for (std::size_t a = 0; a < measured.size(); ++a) {
    std::vector<double> partners;
    for (std::size_t p = 0; p < pairs.size(); ++p)
      if (pairs[p].first == a || pairs[p].second == a) partners.push_back(report.fits[p].dphi);
    StateInfo s;
    s.name = data.bin_names[measured[a]];
    s.dphi = phase_uncertainty(partners);
    s.bits = info_bits(s.dphi);
    // Phi_{k,ref} with the first measured state as reference: Phi_{ref,k} = -phi_k.
    if (a > 0) s.phase = wrap_phase(-report.fits[a - 1].phi);
    dphi_by_state[s.name] = s.dphi;
    names.push_back(s.name);
    report.states.push_back(std::move(s));
  }
  report.total_bits = total_info(dphi_by_state, names);
  return report;
}

void write_report_csv(const std::filesystem::path& path, const InfoReport& report,
                      const MetaHeader& meta) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  meta.write(out);
  out << "j,k,omega_au,amplitude,phi_rad,dphi_rad\n";
  for (const auto& f : report.fits)
    out << f.j_name << ',' << f.k_name << ',' << format_double(f.omega) << ','
        << format_double(f.amplitude) << ',' << format_double(f.phi) << ','
        << format_double(f.dphi) << '\n';
  out << "k,dphi_k_rad,bits\n";
  for (const auto& s : report.states)
    out << s.name << ',' << format_double(s.dphi) << ',' << format_double(s.bits) << '\n';
  out << "TOTAL," << format_double(report.total_bits) << '\n';
}

}  // namespace rydreg
