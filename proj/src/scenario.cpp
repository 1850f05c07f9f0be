#include "rydreg/scenario.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "rydreg/csv.hpp"
#include "rydreg/errors.hpp"
#include "rydreg/units.hpp"

namespace rydreg {

namespace {

enum Salt : std::uint64_t {
  kSaltBaseline = 1,
  kSaltOneKick = 2,
  kSaltTwoKick = 3,
  kSaltCounterfactual = 4,
  kSaltStageA = 5,
  kSaltStageB = 6,
  kSaltSpread = 100,
  kSaltSweep = 1000,
};

std::string deg(double rad) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(1) << units::rad_to_deg(rad);
  return s.str();
}

std::string fixed(double v, int digits = 3) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::ofstream open_csv(const std::filesystem::path& path, const MetaHeader& meta,
                       std::string_view header) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  meta.write(out);
  out << header << '\n';
  return out;
}

std::vector<std::pair<std::string, double>> populations(const WavePacket& psi,
                                                        const std::vector<LevelId>& levels) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& id : levels)
    if (psi.basis->find(id)) out.emplace_back(id.label(), psi.population(id));
  return out;
}

std::vector<LevelId> encoded_levels(const ScenarioConfig& c) { return c.encode.levels; }

void write_report_files(const Engine& engine, const std::filesystem::path& dir,
                        const std::string& stem, const InfoReport& report, MetaHeader meta,
                        ScenarioOutcome& outcome) {
  meta.set("stage", stem);
  const auto report_path = dir / (stem + "_report.csv");
  write_report_csv(report_path, report, meta);
  outcome.files.push_back(report_path);

  const auto corr_path = dir / (stem + "_correlations.csv");
  auto out = open_csv(corr_path, meta, "tau_ps,pair,r,fit");
  for (const auto& f : report.fits) {
    for (std::size_t w = 0; w < f.samples.r.size(); ++w) {
      const double tau = f.samples.tau_ps[w];
      const double model = f.amplitude * std::cos(f.phi - f.omega * units::ps_to_au(tau));
      out << format_double(tau) << ',' << f.j_name << '-' << f.k_name << ','
          << format_double(f.samples.r[w]) << ',' << format_double(model) << '\n';
    }
  }
  outcome.files.push_back(corr_path);
  (void)engine;
}

void write_summary(const std::filesystem::path& dir, const std::string& name,
                   ScenarioOutcome& outcome) {
  const auto path = dir / (name + "_summary.txt");
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << outcome.summary;
  outcome.files.push_back(path);
}

std::string report_table(const InfoReport& report) {
  std::ostringstream s;
  for (const auto& st : report.states)
    s << "  " << std::setw(4) << st.name << "  dphi " << std::setw(6) << deg(st.dphi)
      << " deg  " << fixed(st.bits, 2) << " bits\n";
  s << "  total " << fixed(report.total_bits, 2) << " bits\n";
  return s.str();
}

HidingSearch resolve_t1(const Engine& engine, const std::optional<double>& fixed_t1,
                        const EncodeSpec& encode, LevelId target, double lo, double hi,
                        double step, bool& searched) {
  if (fixed_t1) {
    searched = false;
    HidingSearch h;
    h.t1_ps = *fixed_t1;
    return h;
  }
  searched = true;
  return find_hiding_delay(engine.basis(), engine.first_kick(), encode, target, lo, hi, step);
}

}  // namespace

Engine::Engine(ScenarioConfig config) : config_(std::move(config)) {
  basis_ = std::make_shared<const BasisSet>(build_basis(config_.basis));
  const auto radial = radial_functions(*basis_, config_.grid);
  k1_ = cached_kick_matrix(config_.cache_dir, *basis_, radial, config_.grid, config_.q1,
                           config_.kick);
  k2_ = config_.q2 == config_.q1
            ? k1_
            : cached_kick_matrix(config_.cache_dir, *basis_, radial, config_.grid, config_.q2,
                                 config_.kick);
  model_ = default_ssfi_model(*basis_, config_.sigma_n, config_.merge_window_au);
  model_.clip_negative = config_.clip_negative;
}

PulseSequence Engine::sequence(std::optional<double> t1_ps, std::optional<double> t2_ps) const {
  PulseSequence seq;
  seq.encode = config_.encode;
  seq.reference = config_.readout_reference();
  seq.q1 = config_.q1;
  seq.q2 = config_.q2;
  seq.t1_ps = t1_ps;
  seq.t2_ps = t2_ps;
  const double last = t2_ps ? *t2_ps : (t1_ps ? *t1_ps : 0.0);
  seq.t_meas_ps = last + config_.t_meas_delay_ps;
  seq.validate();
  return seq;
}

ScanDataset Engine::scan(const WavePacket& data, std::uint64_t salt,
                         const SsfiModel* model) const {
  ScanOptions opts;
  opts.shots = config_.shots;
  opts.seed = split_mix64(config_.seed ^ split_mix64(salt));
  return tau_scan(data, config_.readout_reference(), config_.tau, model ? *model : model_, opts);
}

ScanDataset Engine::scan(const PulseSequence& seq, std::uint64_t salt) const {
  return scan(run_sequence(seq, basis_, k1_, k2_), salt);
}

InfoReport Engine::analyze(const ScanDataset& data) const {
  return rydreg::analyze(data, config_.fit);
}

MetaHeader Engine::meta(std::string_view kind) const {
  MetaHeader m;
  m.set("version", std::string(kVersion));
  m.set("kind", std::string(kind));
  std::ostringstream hash;
  hash << std::hex << config_.hash();
  m.set("config_hash", hash.str());
  m.set("seed", std::to_string(config_.seed));
  m.set("atom", config_.basis.defects.atom);
  m.set("defects", join_doubles(config_.basis.defects.by_l));
  m.set("defects_note", "configurable defaults; p fine-structure component unspecified");
  m.set("q1_au", config_.q1);
  m.set("q2_au", config_.q2);
  m.set("sigma_n", config_.sigma_n);
  m.set_int("shots", static_cast<long long>(config_.shots));
  m.set("reference_timing", "after last kick");
  return m;
}

HidingSearch find_hiding_delay(std::shared_ptr<const BasisSet> basis, const KickOperator& kick,
                               const EncodeSpec& encode, LevelId target, double lo_ps,
                               double hi_ps, double step_ps) {
  if (!(step_ps > 0.0) || step_ps > 0.05) throw ConfigError("hiding search step must be in (0, 0.05] ps");
  if (!(hi_ps > lo_ps) || !(lo_ps > 0.0)) throw ConfigError("hiding search interval is empty");
  const auto target_index = basis->find(target);
  if (!target_index) throw ConfigError("hiding target " + target.label() + " not in basis");
  const auto initial = encode_register(basis, encode);
  const double p0 = std::norm(initial.amplitudes(static_cast<Eigen::Index>(*target_index)));
  if (!(p0 > 0.0)) throw ConfigError("hiding target " + target.label() + " is not encoded");

  // Only the target row of K matters; the initial state is zero off the register.
  std::vector<Eigen::Index> support;
  for (Eigen::Index a = 0; a < initial.amplitudes.size(); ++a)
    if (initial.amplitudes(a) != 0.0) support.push_back(a);
  const auto row = static_cast<Eigen::Index>(*target_index);
  const auto residual = [&](double t_ps) {
    const double t = units::ps_to_au(t_ps);
    std::complex<double> c = 0.0;
    for (const auto a : support)
      c += kick.matrix(row, a) * initial.amplitudes(a) *
           std::polar(1.0, -basis->level(static_cast<std::size_t>(a)).energy * t);
    return std::norm(c) / p0;
  };

  HidingSearch out;
  const auto steps = static_cast<std::size_t>(std::floor((hi_ps - lo_ps) / step_ps + 1e-9));
  std::size_t best = 0;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = lo_ps + step_ps * static_cast<double>(i);
    out.curve.emplace_back(t, residual(t));
    if (out.curve[i].second < out.curve[best].second) best = i;
  }
  out.t1_ps = out.curve[best].first;
  out.residual = out.curve[best].second;
  if (best > 0 && best < steps) {
    const double rm = out.curve[best - 1].second;
    const double r0 = out.curve[best].second;
    const double rp = out.curve[best + 1].second;
    const double curvature = rp - 2.0 * r0 + rm;
    if (curvature > 0.0) {
      const double t = out.t1_ps - 0.5 * step_ps * (rp - rm) / curvature;
      const double r = residual(t);
      if (r < out.residual) {
        out.t1_ps = t;
        out.residual = r;
      }
    }
  }
  out.no_depletion = out.residual >= 1.0 - 1e-9;
  const double kepler = kepler_period_ps(basis->level(*target_index).n_eff);
  if (hi_ps - lo_ps < kepler) {
    std::ostringstream w;
    w << "search interval " << (hi_ps - lo_ps) << " ps is shorter than the " << target.label()
      << " Kepler period " << fixed(kepler, 2) << " ps; the minimum may be missed";
    out.warning = w.str();
  }
  return out;
}

HideResult scenario_hide(const Engine& engine, const std::filesystem::path& out_dir) {
  const auto& c = engine.config();
  HideResult res;
  res.search = resolve_t1(engine, c.hide.t1_ps, c.encode, c.hide.target, c.hide.search_lo_ps,
                          c.hide.search_hi_ps, c.hide.search_step_ps, res.searched);
  res.t1_ps = res.search.t1_ps;

  const auto none = engine.sequence(std::nullopt, std::nullopt);
  const auto one = engine.sequence(res.t1_ps, std::nullopt);
  res.baseline = engine.analyze(engine.scan(none, kSaltBaseline));
  const auto kicked = run_sequence(one, engine.basis(), engine.first_kick(), engine.second_kick());
  res.report = engine.analyze(engine.scan(kicked, kSaltOneKick));

  res.initial_populations = populations(encode_register(engine.basis(), c.encode), encoded_levels(c));
  res.kicked_populations = populations(kicked, encoded_levels(c));

  const auto target = c.hide.target.label();
  res.target_pairs_vanished = true;
  res.others_retained = true;
  bool any_target_pair = false;
  std::ostringstream vanished;
  for (const auto& f : res.report.fits) {
    const bool involves = f.j_name == target || f.k_name == target;
    if (f.vanished) vanished << ' ' << f.j_name << '-' << f.k_name;
    if (involves) {
      any_target_pair = true;
      res.target_pairs_vanished = res.target_pairs_vanished && f.vanished;
    } else {
      res.others_retained = res.others_retained && f.amplitude > 0.5;
    }
  }
  res.target_pairs_vanished = res.target_pairs_vanished && any_target_pair;

  std::ostringstream s;
  s << "scenario hide\n";
  s << "T1 = " << fixed(res.t1_ps, 3) << " ps";
  if (res.searched)
    s << " (search over [" << c.hide.search_lo_ps << ", " << c.hide.search_hi_ps << "] ps, residual "
      << target << " population " << fixed(res.search.residual, 4) << " of initial)";
  s << '\n';
  if (res.search.no_depletion) s << "warning: no depletion possible\n";
  if (!res.search.warning.empty()) s << "warning: " << res.search.warning << '\n';
  s << "populations after the kick (relative to initial):\n";
  for (std::size_t i = 0; i < res.kicked_populations.size(); ++i)
    s << "  " << res.kicked_populations[i].first << ' '
      << fixed(res.kicked_populations[i].second / res.initial_populations[i].second, 4) << '\n';
  s << "no kick:\n" << report_table(res.baseline);
  s << "after kick:\n" << report_table(res.report);
  s << "pairs below the vanish threshold:" << (vanished.str().empty() ? " none" : vanished.str())
    << '\n';
  s << "all " << target << " pairs vanished: " << (res.target_pairs_vanished ? "yes" : "no") << '\n';
  s << "all other pairs above 0.5: " << (res.others_retained ? "yes" : "no") << '\n';
  res.outcome.summary = s.str();
  res.outcome.assertion_ok = res.target_pairs_vanished;

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    auto meta = engine.meta("hide");
    meta.set("t1_ps", res.t1_ps);
    write_report_files(engine, out_dir, "hide_baseline", res.baseline, meta, res.outcome);
    write_report_files(engine, out_dir, "hide", res.report, meta, res.outcome);
    if (res.searched) {
      const auto path = out_dir / "hide_search.csv";
      auto out = open_csv(path, meta, "t1_ps,residual");
      for (const auto& [t, r] : res.search.curve)
        out << format_double(t) << ',' << format_double(r) << '\n';
      res.outcome.files.push_back(path);
    }
    const auto path = out_dir / "hide_populations.csv";
    auto out = open_csv(path, meta, "level,initial,after_kick");
    for (std::size_t i = 0; i < res.kicked_populations.size(); ++i)
      out << res.kicked_populations[i].first << ',' << format_double(res.initial_populations[i].second)
          << ',' << format_double(res.kicked_populations[i].second) << '\n';
    res.outcome.files.push_back(path);
    write_summary(out_dir, "hide", res.outcome);
  }
  return res;
}

RecoverResult scenario_recover(const Engine& engine, const std::filesystem::path& out_dir) {
  const auto& c = engine.config();
  RecoverResult res;
  bool searched = false;
  const auto search = resolve_t1(engine, c.hide.t1_ps, c.encode, c.hide.target,
                                 c.hide.search_lo_ps, c.hide.search_hi_ps, c.hide.search_step_ps,
                                 searched);
  res.t1_ps = search.t1_ps;
  res.t2_ps = res.t1_ps + c.recover.t2_delay_ps;

  res.after_t1 = engine.analyze(engine.scan(engine.sequence(res.t1_ps, std::nullopt), kSaltOneKick));
  res.after_t2 = engine.analyze(engine.scan(engine.sequence(res.t1_ps, res.t2_ps), kSaltTwoKick));

  if (c.recover.inverse_diagnostic) {
    KickOperator inverse = engine.first_kick();
    inverse.matrix = engine.first_kick().matrix.inverse();
    PulseSequence seq = engine.sequence(res.t1_ps, res.t1_ps + 1e-6);
    const auto with_inverse = run_sequence(seq, engine.basis(), engine.first_kick(), inverse);
    seq.t1_ps.reset();
    seq.t2_ps.reset();
    const auto free = run_sequence(seq, engine.basis(), engine.first_kick(), engine.second_kick());
    res.inverse_deviation =
        (interaction_picture(with_inverse) - interaction_picture(free)).cwiseAbs().maxCoeff();
  }

  const auto target = c.hide.target.label();
  const double bits_t1 = res.after_t1.state(target).bits;
  const double bits_t2 = res.after_t2.state(target).bits;

  std::ostringstream s;
  s << "scenario recover\n";
  s << "T1 = " << fixed(res.t1_ps, 3) << " ps, T2 = " << fixed(res.t2_ps, 3) << " ps\n";
  s << "after T1:\n" << report_table(res.after_t1);
  s << "after T2:\n" << report_table(res.after_t2);
  s << target << " dphi " << deg(res.after_t1.state(target).dphi) << " -> "
    << deg(res.after_t2.state(target).dphi) << " deg\n";
  if (res.inverse_deviation)
    s << "inverse-kick diagnostic: max amplitude deviation from the free register "
      << res.inverse_deviation.value() << '\n';
  res.outcome.assertion_ok = bits_t2 > bits_t1;
  s << target << " bits increased: " << (res.outcome.assertion_ok ? "yes" : "no") << '\n';
  res.outcome.summary = s.str();

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    auto meta = engine.meta("recover");
    meta.set("t1_ps", res.t1_ps);
    meta.set("t2_ps", res.t2_ps);
    write_report_files(engine, out_dir, "recover_t1", res.after_t1, meta, res.outcome);
    write_report_files(engine, out_dir, "recover_t2", res.after_t2, meta, res.outcome);
    const auto path = out_dir / "recover_comparison.csv";
    auto out = open_csv(path, meta, "k,dphi_t1_rad,bits_t1,dphi_t2_rad,bits_t2");
    for (std::size_t i = 0; i < res.after_t1.states.size(); ++i) {
      const auto& a = res.after_t1.states[i];
      const auto& b = res.after_t2.states[i];
      out << a.name << ',' << format_double(a.dphi) << ',' << format_double(a.bits) << ','
          << format_double(b.dphi) << ',' << format_double(b.bits) << '\n';
    }
    out << "TOTAL,," << format_double(res.after_t1.total_bits) << ",,"
        << format_double(res.after_t2.total_bits) << '\n';
    res.outcome.files.push_back(path);
    write_summary(out_dir, "recover", res.outcome);
  }
  return res;
}

TwoStateResult scenario_two_state(const Engine& base, const std::filesystem::path& out_dir) {
  ScenarioConfig c = base.config();
  c.encode = EncodeSpec::equal(c.two_state.levels);
  c.reference_identical = true;
  const Engine& engine = base;  // basis and kicks are shared; only the register differs
  const auto reference = ReferenceSpec::identical_to(c.encode, c.reference_phase);

  TwoStateResult res;
  bool searched = false;
  const auto search = resolve_t1(engine, c.two_state.t1_ps, c.encode, c.two_state.target,
                                 c.two_state.search_lo_ps, c.two_state.search_hi_ps,
                                 c.hide.search_step_ps, searched);
  res.t1_ps = search.t1_ps;
  res.t2_ps = c.two_state.t2_ps;
  if (!(res.t2_ps > res.t1_ps)) throw ConfigError("two_state.t2_ps must exceed T1");

  // Only the encoded levels are read out.
  SsfiModel model = engine.model();
  for (auto& bin : model.bins) {
    bool keep = false;
    for (const auto& id : c.two_state.levels) keep = keep || bin.name == id.label();
    bin.measured = keep;
  }

  const auto basis = engine.basis();
  ScanOptions opts;
  opts.shots = c.shots;
  const auto scan_fit = [&](const WavePacket& psi, std::uint64_t salt) {
    opts.seed = split_mix64(c.seed ^ split_mix64(salt));
    const auto data = tau_scan(psi, reference, c.tau, model, opts);
    const auto report = analyze(data, c.fit);
    return report.fits.front();
  };
  const double dt = c.t_meas_delay_ps;

  const auto psi0 = encode_register(basis, c.encode);
  res.stage_a = scan_fit(free_evolve(psi0, dt), kSaltStageA);

  const auto after_k1 = apply_kick(free_evolve(psi0, res.t1_ps), engine.first_kick());
  res.stage_b = scan_fit(free_evolve(after_k1, dt), kSaltStageB);
  res.stage_b_populations =
      populations(after_k1, {{32, 1}, {27, 1}, {31, 2}, {32, 0}, {33, 0}, {31, 1}, {33, 1}});

  const auto before_k2 = free_evolve(after_k1, res.t2_ps - res.t1_ps);
  WavePacket zeroed = before_k2;
  for (std::size_t a = 0; a < basis->size(); ++a)
    if (basis->level(a).l != c.basis.register_l) zeroed.amplitudes(static_cast<Eigen::Index>(a)) = 0.0;
  const auto after_k2 = apply_kick(before_k2, engine.second_kick());
  const auto after_k2_cf = apply_kick(zeroed, engine.second_kick());
  res.stage_c = scan_fit(free_evolve(after_k2, dt), kSaltTwoKick);
  res.stage_c_counterfactual = scan_fit(free_evolve(after_k2_cf, dt), kSaltCounterfactual);

  const auto target = c.two_state.target;
  res.target_before_t2 = std::abs(before_k2.amplitude(target));
  res.recovery = std::max(0.0, std::abs(after_k2.amplitude(target)) - res.target_before_t2);
  res.counterfactual_recovery =
      std::max(0.0, std::abs(after_k2_cf.amplitude(target)) - res.target_before_t2);
  res.ratio = res.recovery > 0.0 ? res.counterfactual_recovery / res.recovery : 1.0;
  res.outcome.assertion_ok = res.recovery > 0.0 && res.ratio < 0.1;

  const auto pair = res.stage_a.j_name + "-" + res.stage_a.k_name;
  std::ostringstream s;
  s << "scenario two-state\n";
  s << "T1 = " << fixed(res.t1_ps, 3) << " ps, T2 = " << fixed(res.t2_ps, 3) << " ps\n";
  const auto line = [&](const char* label, const CorrelationFit& f) {
    s << "  " << label << ' ' << pair << " amplitude " << fixed(f.amplitude) << " dphi "
      << deg(f.dphi) << " deg" << (f.vanished ? " (vanished)" : "") << '\n';
  };
  line("a no kick      ", res.stage_a);
  line("b one kick     ", res.stage_b);
  line("c two kicks    ", res.stage_c);
  line("c counterfact. ", res.stage_c_counterfactual);
  s << "populations after the first kick:\n";
  for (const auto& [name, p] : res.stage_b_populations) s << "  " << name << ' ' << fixed(p, 4) << '\n';
  s << "|c_" << target.label() << "| before T2 " << fixed(res.target_before_t2, 4)
    << ", gain " << fixed(res.recovery, 4) << ", gain with non-p zeroed "
    << fixed(res.counterfactual_recovery, 4) << " (ratio " << fixed(res.ratio, 3) << ")\n";
  s << "recovery originates from non-p levels: " << (res.outcome.assertion_ok ? "yes" : "no") << '\n';
  res.outcome.summary = s.str();

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    auto meta = engine.meta("two_state");
    meta.set("t1_ps", res.t1_ps);
    meta.set("t2_ps", res.t2_ps);
    const auto path = out_dir / "two_state_stages.csv";
    auto out = open_csv(path, meta, "stage,amplitude,phi_rad,dphi_rad,vanished");
    const auto row = [&](const char* name, const CorrelationFit& f) {
      out << name << ',' << format_double(f.amplitude) << ',' << format_double(f.phi) << ','
          << format_double(f.dphi) << ',' << (f.vanished ? 1 : 0) << '\n';
    };
    row("no_kick", res.stage_a);
    row("one_kick", res.stage_b);
    row("two_kicks", res.stage_c);
    row("two_kicks_counterfactual", res.stage_c_counterfactual);
    res.outcome.files.push_back(path);

    const auto rec_path = out_dir / "two_state_recovery.csv";
    auto rec = open_csv(rec_path, meta, "quantity,value");
    rec << "target_before_t2," << format_double(res.target_before_t2) << '\n'
        << "recovery," << format_double(res.recovery) << '\n'
        << "counterfactual_recovery," << format_double(res.counterfactual_recovery) << '\n'
        << "ratio," << format_double(res.ratio) << '\n';
    for (const auto& [name, p] : res.stage_b_populations)
      rec << "population_after_t1_" << name << ',' << format_double(p) << '\n';
    res.outcome.files.push_back(rec_path);

    const auto corr_path = out_dir / "two_state_correlations.csv";
    auto corr = open_csv(corr_path, meta, "stage,tau_ps,r,fit");
    const auto series = [&](const char* name, const CorrelationFit& f) {
      for (std::size_t w = 0; w < f.samples.r.size(); ++w) {
        const double tau = f.samples.tau_ps[w];
        corr << name << ',' << format_double(tau) << ',' << format_double(f.samples.r[w]) << ','
             << format_double(f.amplitude * std::cos(f.phi - f.omega * units::ps_to_au(tau)))
             << '\n';
      }
    };
    series("no_kick", res.stage_a);
    series("one_kick", res.stage_b);
    series("two_kicks", res.stage_c);
    series("two_kicks_counterfactual", res.stage_c_counterfactual);
    res.outcome.files.push_back(corr_path);
    write_summary(out_dir, "two_state", res.outcome);
  }
  return res;
}

SweepResult scenario_info_sweep(const Engine& engine, const std::filesystem::path& out_dir) {
  const auto& c = engine.config();
  SweepResult res;
  bool searched = false;
  res.t1_ps = resolve_t1(engine, c.sweep.t1_ps, c.encode, c.hide.target, c.hide.search_lo_ps,
                         c.hide.search_hi_ps, c.hide.search_step_ps, searched)
                  .t1_ps;
  const auto target = c.hide.target.label();

  // No-kick total and its seed-to-seed spread.
  std::vector<double> none;
  for (std::uint64_t i = 0; i < 4; ++i)
    none.push_back(engine.analyze(engine.scan(engine.sequence(std::nullopt, std::nullopt),
                                              i == 0 ? kSaltBaseline : kSaltSpread + i))
                       .total_bits);
  double mean = 0.0;
  for (const double v : none) mean += v;
  mean /= static_cast<double>(none.size());
  double var = 0.0;
  for (const double v : none) var += (v - mean) * (v - mean);
  res.baseline_none = none.front();
  res.baseline_none_spread = std::sqrt(var / static_cast<double>(none.size() - 1));

  const auto one = engine.analyze(engine.scan(engine.sequence(res.t1_ps, std::nullopt), kSaltOneKick));
  res.baseline_one = one.total_bits;
  res.baseline_one_target_dphi = one.state(target).dphi;

  const auto count = static_cast<std::size_t>(
      std::floor((c.sweep.t2_stop_delay_ps - c.sweep.t2_start_delay_ps) / c.sweep.t2_step_ps + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) {
    SweepPoint p;
    p.t2_ps = res.t1_ps + c.sweep.t2_start_delay_ps + c.sweep.t2_step_ps * static_cast<double>(i);
    const auto report = engine.analyze(engine.scan(engine.sequence(res.t1_ps, p.t2_ps), kSaltSweep + i));
    p.total_bits = report.total_bits;
    p.target_dphi = report.state(target).dphi;
    if (p.total_bits > res.baseline_one) ++res.above_one_hcp;
    if (p.total_bits > mean + 3.0 * res.baseline_none_spread) ++res.above_no_hcp;
    res.points.push_back(p);
  }
  res.outcome.assertion_ok = res.baseline_none >= res.baseline_one;

  std::ostringstream s;
  s << "scenario info-sweep\n";
  s << "T1 = " << fixed(res.t1_ps, 3) << " ps, " << res.points.size() << " T2 points\n";
  s << "no-kick total " << fixed(res.baseline_none, 2) << " bits (spread over 4 seeds "
    << fixed(res.baseline_none_spread, 2) << ")\n";
  s << "one-kick total " << fixed(res.baseline_one, 2) << " bits, " << target << " dphi "
    << deg(res.baseline_one_target_dphi) << " deg\n";
  s << "points above the one-kick baseline: " << res.above_one_hcp << " of " << res.points.size() << '\n';
  s << "points above the no-kick baseline by more than 3 spreads: " << res.above_no_hcp << '\n';
  s << "baseline ordering (no kick >= one kick): " << (res.outcome.assertion_ok ? "yes" : "no") << '\n';
  res.outcome.summary = s.str();

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    auto meta = engine.meta("info_sweep");
    meta.set("t1_ps", res.t1_ps);
    meta.set("baseline_no_hcp_bits", res.baseline_none);
    meta.set("baseline_one_hcp_bits", res.baseline_one);
    const auto path = out_dir / "info_sweep.csv";
    auto out = open_csv(path, meta, "t2_ps,total_bits");
    for (const auto& p : res.points)
      out << format_double(p.t2_ps) << ',' << format_double(p.total_bits) << '\n';
    res.outcome.files.push_back(path);

    const auto detail_path = out_dir / "info_sweep_detail.csv";
    auto detail = open_csv(detail_path, meta, "t2_ps,total_bits,target_dphi_rad");
    for (const auto& p : res.points)
      detail << format_double(p.t2_ps) << ',' << format_double(p.total_bits) << ','
             << format_double(p.target_dphi) << '\n';
    res.outcome.files.push_back(detail_path);

    const auto base_path = out_dir / "info_sweep_baselines.csv";
    auto base = open_csv(base_path, meta, "baseline,total_bits");
    base << "no_hcp," << format_double(res.baseline_none) << '\n'
         << "one_hcp," << format_double(res.baseline_one) << '\n';
    res.outcome.files.push_back(base_path);
    write_summary(out_dir, "info_sweep", res.outcome);
  }
  return res;
}

}  // namespace rydreg
