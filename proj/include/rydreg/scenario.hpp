#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rydreg/config.hpp"

namespace rydreg {

// Immutable per-config state shared by every scenario stage.
class Engine {
 public:
  explicit Engine(ScenarioConfig config);

  const ScenarioConfig& config() const { return config_; }
  std::shared_ptr<const BasisSet> basis() const { return basis_; }
  const KickOperator& first_kick() const { return k1_; }
  const KickOperator& second_kick() const { return k2_; }
  const SsfiModel& model() const { return model_; }

  PulseSequence sequence(std::optional<double> t1_ps, std::optional<double> t2_ps) const;
  // Scan with a noise stream keyed by (config seed, salt).
  ScanDataset scan(const WavePacket& data, std::uint64_t salt, const SsfiModel* model = nullptr) const;
  ScanDataset scan(const PulseSequence& seq, std::uint64_t salt) const;
  InfoReport analyze(const ScanDataset& data) const;
  MetaHeader meta(std::string_view kind) const;

 private:
  ScenarioConfig config_;
  std::shared_ptr<const BasisSet> basis_;
  KickOperator k1_;
  KickOperator k2_;
  SsfiModel model_;
};

struct HidingSearch {
  double t1_ps = 0.0;
  double residual = 1.0;  // |c_target|^2 after the kick over its initial value
  bool no_depletion = false;
  std::string warning;
  std::vector<std::pair<double, double>> curve;  // (T1, residual) on the grid
};

// Grid search over [lo, hi] with a local quadratic refinement of the best
// point; ties resolve to the smallest T1. Throws ConfigError when the step
// exceeds 0.05 ps or the target is not encoded.
HidingSearch find_hiding_delay(std::shared_ptr<const BasisSet> basis, const KickOperator& kick,
                               const EncodeSpec& encode, LevelId target, double lo_ps,
                               double hi_ps, double step_ps);

struct ScenarioOutcome {
  bool assertion_ok = true;
  std::string summary;
  std::vector<std::filesystem::path> files;
};

struct HideResult {
  HidingSearch search;
  bool searched = false;
  double t1_ps = 0.0;
  InfoReport baseline;  // no kick
  InfoReport report;    // after the kick
  std::vector<std::pair<std::string, double>> initial_populations;
  std::vector<std::pair<std::string, double>> kicked_populations;
  bool target_pairs_vanished = false;
  bool others_retained = false;  // every non-target pair amplitude > 0.5
  ScenarioOutcome outcome;
};

struct RecoverResult {
  double t1_ps = 0.0;
  double t2_ps = 0.0;
  InfoReport after_t1;
  InfoReport after_t2;
  std::optional<double> inverse_deviation;  // diagnostic: max |c - c_baseline|
  ScenarioOutcome outcome;
};

struct TwoStateResult {
  double t1_ps = 0.0;
  double t2_ps = 0.0;
  CorrelationFit stage_a;
  CorrelationFit stage_b;
  CorrelationFit stage_c;
  CorrelationFit stage_c_counterfactual;
  std::vector<std::pair<std::string, double>> stage_b_populations;
  double target_before_t2 = 0.0;  // |c_target| just before the second kick
  double recovery = 0.0;          // gain in |c_target| across the second kick
  double counterfactual_recovery = 0.0;
  double ratio = 0.0;
  ScenarioOutcome outcome;
};

struct SweepPoint {
  double t2_ps = 0.0;
  double total_bits = 0.0;
  double target_dphi = 0.0;
};

struct SweepResult {
  double t1_ps = 0.0;
  double baseline_none = 0.0;
  double baseline_none_spread = 0.0;
  double baseline_one = 0.0;
  double baseline_one_target_dphi = 0.0;
  std::vector<SweepPoint> points;
  std::size_t above_one_hcp = 0;
  std::size_t above_no_hcp = 0;  // points exceeding the no-kick total by > 3 spreads
  ScenarioOutcome outcome;
};

// Each scenario writes its CSVs and summary into out_dir unless it is empty.
HideResult scenario_hide(const Engine& engine, const std::filesystem::path& out_dir);
RecoverResult scenario_recover(const Engine& engine, const std::filesystem::path& out_dir);
TwoStateResult scenario_two_state(const Engine& engine, const std::filesystem::path& out_dir);
SweepResult scenario_info_sweep(const Engine& engine, const std::filesystem::path& out_dir);

}  // namespace rydreg
