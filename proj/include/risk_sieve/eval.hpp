#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "risk_sieve/risk_models.hpp"
#include "risk_sieve/scenario.hpp"

namespace risk_sieve {

/// Survival-analysis risk threshold defining baseline importance labels.
inline constexpr double kBaselineThreshold = 1e-25;

struct ImportanceLabel {
  std::string agent_id;
  bool important = false;
};

struct LabeledScenario {
  Scenario scenario;
  // one per other agent, ordered by agent id (the score_scenario order)
  std::vector<ImportanceLabel> labels;
  std::vector<double> baseline_scores;  // survival risk, same order as labels
};

std::vector<ImportanceLabel> label_baseline(
    const Scenario& scenario, const RiskConfig& cfg,
    double threshold = kBaselineThreshold);

/// Labels every scenario; jobs > 1 parallelizes across scenarios with a
/// deterministic, index-ordered result.
std::vector<LabeledScenario> label_all(std::span<const Scenario> scenarios,
                                       const RiskConfig& cfg,
                                       double threshold = kBaselineThreshold,
                                       int jobs = 1);

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  double tpr() const { return tp + fn == 0 ? 1.0 : double(tp) / double(tp + fn); }
  double fpr() const { return fp + tn == 0 ? 0.0 : double(fp) / double(fp + tn); }
};

/// Counts kept/dropped against labels. Throws DataError if kept contains an
/// id that is not labeled.
ConfusionCounts confusion(std::span<const std::string> kept_ids,
                          std::span<const ImportanceLabel> labels);

struct RocPoint {
  double threshold = 0.0;
  double mean_tpr = 0.0;
  double std_tpr = 0.0;
  double mean_fpr = 0.0;
  double std_fpr = 0.0;
  ConfusionCounts pooled;  // summed over all scenarios at this threshold
};

struct RocCurve {
  Model model = Model::survival;
  std::vector<RocPoint> points;  // ascending threshold, endpoints included
};

/// Sweeps thresholds (sorted ascending; 0 and +inf endpoints added when
/// missing) and macro-averages per-scenario TPR/FPR. Scenarios with no
/// positive labels contribute TPR = 1.
RocCurve roc_sweep(Model model, std::span<const LabeledScenario> scenarios,
                   std::vector<double> thresholds, const RiskConfig& cfg,
                   int jobs = 1);

/// Trapezoidal area under (FPR, TPR) with (0,0) and (1,1) appended.
double auc(const RocCurve& curve);

/// Sweep threshold with the highest pooled F1 score.
double best_f1_threshold(const RocCurve& curve);

/// Default threshold grid per model family: inverse-distance scale for
/// distance/time models, log-spaced densities for the stochastic ones.
std::vector<double> default_thresholds(Model model, double epsilon);

struct BenchResult {
  Model model = Model::current_distance;
  double median_ns = 0.0;
  double p95_ns = 0.0;
  std::int64_t pairs = 0;
};

/// Times single-pair scoring calls after a warm-up pass over the pair set.
BenchResult bench(Model model, std::span<const Scenario> scenarios,
                  const RiskConfig& cfg, std::int64_t min_calls = 10000);

void write_roc_csv(std::ostream& os, std::span<const RocCurve> curves);
void write_bench_csv(std::ostream& os, std::span<const BenchResult> results);
std::string auc_summary_json(std::span<const RocCurve> curves);

}  // namespace risk_sieve
