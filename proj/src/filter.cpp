#include "risk_sieve/filter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace risk_sieve {

namespace {

using json = nlohmann::ordered_json;

void check_tier_thresholds(const std::vector<double>& thresholds) {
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (!(thresholds[i] < thresholds[i - 1])) {
      throw DataError("tier_thresholds must be strictly decreasing");
    }
  }
}

}  // namespace

Pipeline default_pipeline() {
  Pipeline p;
  p.stages = {{Model::path_distance, std::nullopt},
              {Model::trajectory_distance, std::nullopt},
              {Model::gaussian_2d, std::nullopt}};
  p.tier_model = Model::survival;
  p.tier_thresholds = {1e-5, 1e-15, kBaselineThreshold};
  return p;
}

std::pair<std::vector<std::string>, std::vector<std::string>> apply_threshold(
    std::span<const RiskScore> scores, double threshold) {
  std::vector<std::string> kept, dropped;
  for (const RiskScore& s : scores) {
    (s.value >= threshold ? kept : dropped).push_back(s.other_id);
  }
  return {std::move(kept), std::move(dropped)};
}

double calibrate(Model model, const RiskConfig& cfg,
                 std::span<const LabeledScenario> scenarios,
                 double max_fn_rate) {
  if (scenarios.empty()) {
    throw std::invalid_argument("calibrate: empty calibration set");
  }
  if (max_fn_rate < 0.0 || max_fn_rate > 1.0) {
    throw std::invalid_argument("calibrate: max_fn_rate must be in [0, 1]");
  }

  std::vector<double> important_scores;
  std::vector<double> all_scores;
  for (const LabeledScenario& ls : scenarios) {
    const auto scores = score_scenario(ls.scenario, model, cfg);
    for (std::size_t i = 0; i < scores.size(); ++i) {
      all_scores.push_back(scores[i].value);
      if (ls.labels[i].important) important_scores.push_back(scores[i].value);
    }
  }
  if (important_scores.empty()) return 0.0;  // no positives, nothing to protect

  std::sort(important_scores.begin(), important_scores.end());
  const auto positives = static_cast<std::size_t>(important_scores.size());
  const auto allowed_fn = static_cast<std::size_t>(
      std::floor(max_fn_rate * static_cast<double>(positives)));
  if (allowed_fn >= positives) {
    return std::numeric_limits<double>::infinity();  // any FN rate acceptable
  }
  // Ties are kept, so this score is the largest threshold with at most
  // allowed_fn misses.
  const double critical = important_scores[allowed_fn];

  // Place the threshold midway to the next lower observed score: same kept
  // set on the calibration data, margin on held-out data.
  double below = -1.0;
  for (double v : all_scores) {
    if (v < critical && v > below) below = v;
  }
  if (below < 0.0) return 0.0;  // nothing separable below the critical score
  return 0.5 * (below + critical);
}

Pipeline calibrate_pipeline(const Pipeline& pipeline, const RiskConfig& cfg,
                            std::span<const LabeledScenario> scenarios,
                            double max_fn_rate) {
  Pipeline out = pipeline;
  for (FilterStage& stage : out.stages) {
    if (!stage.threshold) {
      stage.threshold = calibrate(stage.model, cfg, scenarios, max_fn_rate);
    }
  }
  return out;
}

FilterTrace run_pipeline(const Scenario& scenario, const Pipeline& pipeline,
                         const RiskConfig& cfg) {
  if (pipeline.stages.empty()) {
    throw DataError("pipeline has no stages");
  }
  check_tier_thresholds(pipeline.tier_thresholds);

  FilterTrace trace;
  std::vector<const AgentState*> current;
  for (const AgentState& a : scenario.others) current.push_back(&a);

  for (const FilterStage& stage : pipeline.stages) {
    if (!stage.threshold) {
      throw DataError("pipeline stage '" + to_string(stage.model) +
                      "' has no threshold; calibrate it first");
    }
    StageTrace st;
    st.model = stage.model;
    st.threshold = *stage.threshold;
    for (const AgentState* a : current) {
      st.scores.push_back({score(stage.model, scenario.ego, *a, cfg),
                           stage.model, scenario.ego.id, a->id});
    }
    std::sort(st.scores.begin(), st.scores.end(),
              [](const RiskScore& x, const RiskScore& y) {
                return x.other_id < y.other_id;
              });
    auto [kept, dropped] = apply_threshold(st.scores, st.threshold);
    st.kept = kept;
    st.dropped = std::move(dropped);

    std::vector<const AgentState*> next;
    for (const AgentState* a : current) {
      if (std::find(kept.begin(), kept.end(), a->id) != kept.end()) {
        next.push_back(a);
      }
    }
    current = std::move(next);
    trace.stages.push_back(std::move(st));
  }

  // sort survivors into tiers by the tier model
  trace.tiers.assign(pipeline.tier_thresholds.size() + 1, {});
  for (const AgentState* a : current) {
    const double v = score(pipeline.tier_model, scenario.ego, *a, cfg);
    trace.tier_scores.push_back({v, pipeline.tier_model, scenario.ego.id, a->id});
    std::size_t tier = pipeline.tier_thresholds.size();  // below all thresholds
    for (std::size_t j = 0; j < pipeline.tier_thresholds.size(); ++j) {
      if (v >= pipeline.tier_thresholds[j]) {
        tier = j;
        break;
      }
    }
    trace.tiers[tier].push_back(a->id);
  }
  return trace;
}

std::string pipeline_to_json(const Pipeline& pipeline) {
  json j;
  json stages = json::array();
  for (const FilterStage& s : pipeline.stages) {
    json js;
    js["model"] = to_string(s.model);
    if (s.threshold) {
      js["threshold"] = *s.threshold;
    } else {
      js["threshold"] = nullptr;
    }
    stages.push_back(std::move(js));
  }
  j["stages"] = std::move(stages);
  j["tier_model"] = to_string(pipeline.tier_model);
  j["tier_thresholds"] = pipeline.tier_thresholds;
  return j.dump(2);
}

Pipeline pipeline_from_json(const std::string& text) {
  const json j = json::parse(text);
  Pipeline p;
  if (!j.is_object() || !j.contains("stages") || !j["stages"].is_array() ||
      j["stages"].empty()) {
    throw DataError("pipeline file needs a non-empty stages array");
  }
  for (const auto& js : j["stages"]) {
    FilterStage s;
    s.model = model_from_string(js.at("model").get<std::string>());
    if (js.contains("threshold") && !js["threshold"].is_null()) {
      const double thr = js["threshold"].get<double>();
      if (!(thr >= 0.0)) {
        throw DataError("stage threshold must be >= 0");
      }
      s.threshold = thr;
    }
    p.stages.push_back(s);
  }
  p.tier_model = model_from_string(j.value("tier_model", std::string("survival")));
  if (j.contains("tier_thresholds")) {
    p.tier_thresholds = j["tier_thresholds"].get<std::vector<double>>();
  }
  check_tier_thresholds(p.tier_thresholds);
  return p;
}

Pipeline load_pipeline_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return pipeline_from_json(ss.str());
}

void save_pipeline_file(const std::string& path, const Pipeline& pipeline) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open for writing: " + path);
  f << pipeline_to_json(pipeline);
}

}  // namespace risk_sieve
