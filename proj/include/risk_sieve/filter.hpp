#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "risk_sieve/eval.hpp"
#include "risk_sieve/risk_models.hpp"

namespace risk_sieve {

struct FilterStage {
  Model model = Model::path_distance;
  /// Absent threshold means "calibrate before running".
  std::optional<double> threshold;
};

/// Cascade of cheap-to-expensive filters plus survival-based tiering of the
/// final survivors.
struct Pipeline {
  std::vector<FilterStage> stages;
  Model tier_model = Model::survival;
  std::vector<double> tier_thresholds;  // strictly decreasing
};

/// Recommended cascade: path distance, then trajectory distance, then the
/// 2D Gaussian method, tiered by survival analysis. Thresholds left open
/// for calibration; tier thresholds start at the baseline importance level.
Pipeline default_pipeline();

struct StageTrace {
  Model model;
  double threshold;
  std::vector<RiskScore> scores;  // one per agent entering this stage
  std::vector<std::string> kept;
  std::vector<std::string> dropped;
};

struct FilterTrace {
  std::vector<StageTrace> stages;
  /// tiers[0] holds scores >= tier_thresholds[0]; tiers[j] the band
  /// [thr_j, thr_{j-1}); the last tier collects survivors below every
  /// threshold. Together they partition the final survivor set.
  std::vector<std::vector<std::string>> tiers;
  std::vector<RiskScore> tier_scores;
};

/// Splits scores at the threshold; ties are kept.
std::pair<std::vector<std::string>, std::vector<std::string>> apply_threshold(
    std::span<const RiskScore> scores, double threshold);

/// Largest safe threshold: the highest value whose aggregate false-negative
/// rate over all labeled (scenario, agent) pairs stays within max_fn_rate,
/// placed midway to the next lower observed score for margin. Returns 0 when
/// the model cannot separate anything safely (the stage becomes a no-op).
double calibrate(Model model, const RiskConfig& cfg,
                 std::span<const LabeledScenario> scenarios,
                 double max_fn_rate = 0.0);

/// Returns a copy of the pipeline with every open stage threshold calibrated
/// against the labeled set.
Pipeline calibrate_pipeline(const Pipeline& pipeline, const RiskConfig& cfg,
                            std::span<const LabeledScenario> scenarios,
                            double max_fn_rate = 0.0);

FilterTrace run_pipeline(const Scenario& scenario, const Pipeline& pipeline,
                         const RiskConfig& cfg);

std::string pipeline_to_json(const Pipeline& pipeline);
Pipeline pipeline_from_json(const std::string& text);
Pipeline load_pipeline_file(const std::string& path);
void save_pipeline_file(const std::string& path, const Pipeline& pipeline);

}  // namespace risk_sieve
