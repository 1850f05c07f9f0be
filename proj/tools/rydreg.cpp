// rydreg command-line entry point.
//
// Exit codes: 0 success, 2 scenario assertion failed, 3 configuration error,
// 1 any other failure.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "rydreg/analysis.hpp"
#include "rydreg/config.hpp"
#include "rydreg/csv.hpp"
#include "rydreg/errors.hpp"
#include "rydreg/scenario.hpp"

namespace {

using namespace rydreg;

constexpr int kExitAssertion = 2;
constexpr int kExitConfig = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string cache_dir;
};

ScenarioConfig load(const Common& common) {
  ScenarioConfig c = common.config.empty() ? default_config() : load_config(common.config);
  if (common.seed) c.seed = *common.seed;
  if (!common.cache_dir.empty()) c.cache_dir = common.cache_dir;
  return c;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  return out;
}

MetaHeader base_meta(const ScenarioConfig& c, std::string_view kind) {
  MetaHeader m;
  m.set("version", std::string(kVersion));
  m.set("kind", std::string(kind));
  std::ostringstream hash;
  hash << std::hex << c.hash();
  m.set("config_hash", hash.str());
  m.set("atom", c.basis.defects.atom);
  m.set("defects", join_doubles(c.basis.defects.by_l));
  return m;
}

int cmd_basis(const Common& common, const std::string& out_path) {
  const auto c = load(common);
  const auto basis = build_basis(c.basis);
  auto out = open_out(out_path);
  auto meta = base_meta(c, "basis");
  std::ostringstream hash;
  hash << std::hex << basis.hash();
  meta.set("basis_hash", hash.str());
  meta.set_int("levels", static_cast<long long>(basis.size()));
  meta.write(out);
  out << "n,l,n_eff,energy_au,kepler_ps\n";
  for (const auto& lv : basis.levels())
    out << lv.n << ',' << lv.l << ',' << format_double(lv.n_eff) << ','
        << format_double(lv.energy) << ',' << format_double(kepler_period_ps(lv.n_eff)) << '\n';
  return 0;
}

int cmd_kick(const Common& common, std::optional<double> q, const std::string& out_path) {
  auto c = load(common);
  if (q) c.q1 = c.q2 = *q;
  const Engine engine(c);
  const auto& k = engine.first_kick();
  const auto& basis = *engine.basis();
  auto out = open_out(out_path);
  auto meta = base_meta(c, "kick");
  meta.set("q_au", c.q1);
  meta.set_int("l_max_used", k.l_max_used);
  meta.set("residual", k.residual);
  meta.set("interior_unitarity_defect", unitarity_defect(k, basis.interior_indices()));
  meta.write(out);
  out << "row,col,abs,arg_rad\n";
  for (Eigen::Index a = 0; a < k.matrix.rows(); ++a)
    for (Eigen::Index b = 0; b < k.matrix.cols(); ++b)
      out << basis.level(static_cast<std::size_t>(a)).label() << ','
          << basis.level(static_cast<std::size_t>(b)).label() << ','
          << format_double(std::abs(k.matrix(a, b))) << ','
          << format_double(std::arg(k.matrix(a, b))) << '\n';
  return 0;
}

int cmd_run(const Common& common, std::optional<double> t1, std::optional<double> t2,
            const std::string& out_path) {
  const Engine engine(load(common));
  const auto seq = engine.sequence(t1, t2);
  const auto psi =
      run_sequence(seq, engine.basis(), engine.first_kick(), engine.second_kick());
  auto out = open_out(out_path);
  auto meta = engine.meta("amplitudes");
  meta.set("t_meas_ps", seq.measurement_time());
  if (t1) meta.set("t1_ps", *t1);
  if (t2) meta.set("t2_ps", *t2);
  meta.set("norm", psi.norm());
  meta.write(out);
  out << "n,l,re,im,population\n";
  for (std::size_t a = 0; a < psi.basis->size(); ++a) {
    const auto& lv = psi.basis->level(a);
    const auto amp = psi.amplitudes(static_cast<Eigen::Index>(a));
    out << lv.n << ',' << lv.l << ',' << format_double(amp.real()) << ','
        << format_double(amp.imag()) << ',' << format_double(std::norm(amp)) << '\n';
  }
  return 0;
}

int cmd_scan(const Common& common, std::optional<double> t1, std::optional<double> t2,
             const std::string& out_path, const std::string& binary_path, bool keep_shots) {
  const auto c = load(common);
  const Engine engine(c);
  ScanOptions opts;
  opts.shots = c.shots;
  opts.seed = c.seed;
  opts.keep_shots = keep_shots;
  const auto data = tau_scan(engine.sequence(t1, t2), engine.basis(), engine.first_kick(),
                             engine.second_kick(), c.tau, engine.model(), opts);
  write_dataset_csv(out_path, data);
  if (!binary_path.empty()) save_dataset(binary_path, data);
  return 0;
}

int cmd_analyze(const Common& common, const std::string& data_path, const std::string& out_path) {
  const auto c = load(common);
  const auto data = data_path.ends_with(".bin") ? load_dataset(data_path) : read_dataset_csv(data_path);
  const auto report = analyze(data, c.fit);
  MetaHeader meta;
  meta.set("version", std::string(kVersion));
  meta.set("kind", "analysis");
  std::ostringstream hash;
  hash << std::hex << report.dataset_hash;
  meta.set("dataset_hash", hash.str());
  meta.set_int("bootstrap", static_cast<long long>(c.fit.bootstrap));
  meta.set("vanish_factor", c.fit.vanish_factor);
  meta.set("uncertainty", std::string(to_string(c.fit.uncertainty)));
  write_report_csv(out_path, report, meta);
  return 0;
}

int cmd_scenario(const Common& common, const std::string& name, const std::string& out_dir) {
  const Engine engine(load(common));
  ScenarioOutcome outcome;
  if (name == "hide") outcome = scenario_hide(engine, out_dir).outcome;
  else if (name == "recover") outcome = scenario_recover(engine, out_dir).outcome;
  else if (name == "two-state") outcome = scenario_two_state(engine, out_dir).outcome;
  else if (name == "info-sweep") outcome = scenario_info_sweep(engine, out_dir).outcome;
  else throw ConfigError("unknown scenario '" + name + "'");
  std::cout << outcome.summary;
  for (const auto& f : outcome.files) std::cout << "wrote " << f.string() << '\n';
  return outcome.assertion_ok ? 0 : kExitAssertion;
}

// Comma-separated file with metadata to whitespace-separated columns;
// section header lines become comments.
int cmd_plot(const std::string& in_path, const std::string& out_path) {
  std::ifstream in(in_path);
  if (!in) throw ConfigError("cannot read " + in_path);
  auto out = open_out(out_path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      out << line << '\n';
      continue;
    }
    const auto cols = split(line, ',');
    bool numeric = false;
    for (const auto& col : cols) {
      try {
        parse_double(col);
        numeric = true;
      } catch (const ConfigError&) {
      }
    }
    if (!numeric) out << "# ";
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? " " : "") << (cols[i].empty() ? "-" : cols[i]);
    out << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rydberg p-state phase register simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  Common common;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "YAML configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", common.seed, "Override the random seed");
    sub->add_option("--cache-dir", common.cache_dir, "Directory for cached kick matrices");
  };

  std::string out;
  std::optional<double> q, t1, t2;

  auto* basis = app.add_subcommand("basis", "Dump basis levels");
  add_common(basis);
  basis->add_option("--out", out)->required();

  auto* kick = app.add_subcommand("kick", "Dump |K| and arg K");
  add_common(kick);
  kick->add_option("--q", q, "Kick strength (a.u.)");
  kick->add_option("--out", out)->required();

  auto* run = app.add_subcommand("run", "Final amplitudes of a pulse sequence");
  add_common(run);
  run->add_option("--t1", t1, "First kick delay (ps)");
  run->add_option("--t2", t2, "Second kick delay (ps)");
  run->add_option("--out", out)->required();

  std::string binary_path;
  bool keep_shots = false;
  auto* scan = app.add_subcommand("scan", "Simulate a reference-delay scan dataset");
  add_common(scan);
  scan->add_option("--t1", t1, "First kick delay (ps)");
  scan->add_option("--t2", t2, "Second kick delay (ps)");
  scan->add_option("--out", out, "Dataset CSV")->required();
  scan->add_option("--binary", binary_path, "Also write the binary dataset");
  scan->add_flag("--keep-shots", keep_shots, "Store every shot instead of shot means");

  std::string data_path;
  auto* analyze_cmd = app.add_subcommand("analyze", "Correlation fits and information report");
  add_common(analyze_cmd);
  analyze_cmd->add_option("--data", data_path, "Dataset CSV or .bin")->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("--out", out)->required();

  std::string scenario_name;
  auto* scenario = app.add_subcommand("scenario", "Run a scenario end to end");
  add_common(scenario);
  scenario->add_option("name", scenario_name, "hide | recover | two-state | info-sweep")
      ->required()
      ->check(CLI::IsMember({"hide", "recover", "two-state", "info-sweep"}));
  scenario->add_option("--out", out, "Output directory")->required();

  std::string in_path;
  auto* plot = app.add_subcommand("plot", "Convert a CSV into a gnuplot data file");
  plot->add_option("--in", in_path)->required()->check(CLI::ExistingFile);
  plot->add_option("--out", out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*basis) return cmd_basis(common, out);
    if (*kick) return cmd_kick(common, q, out);
    if (*run) return cmd_run(common, t1, t2, out);
    if (*scan) return cmd_scan(common, t1, t2, out, binary_path, keep_shots);
    if (*analyze_cmd) return cmd_analyze(common, data_path, out);
    if (*scenario) return cmd_scenario(common, scenario_name, out);
    if (*plot) return cmd_plot(in_path, out);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
