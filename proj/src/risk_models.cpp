#include "risk_sieve/risk_models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace risk_sieve {

namespace {

double inverse_distance_risk(double epsilon, double distance) {
  return epsilon / (epsilon + distance);
}

double overlap_of(const Point2& mean1, const Point2& mean2, double sigma1,
                  double sigma2) {
  const double var = sigma1 * sigma1 + sigma2 * sigma2;
  const double d2 = (mean2 - mean1).squaredNorm();
  return std::exp(-0.5 * d2 / var) / (2.0 * std::numbers::pi * var);
}

}  // namespace

std::string to_string(Model m) {
  switch (m) {
    case Model::current_distance: return "current_distance";
    case Model::path_distance: return "path_distance";
    case Model::trajectory_distance: return "trajectory_distance";
    case Model::closest_encounter: return "closest_encounter";
    case Model::encounter_headway: return "encounter_headway";
    case Model::encounter_2d_headway: return "encounter_2d_headway";
    case Model::circle_approximation: return "circle_approximation";
    case Model::gaussian_2d: return "gaussian_2d";
    case Model::survival: return "survival";
  }
  return "unknown";
}

std::string model_names_joined() {
  std::string names;
  for (Model m : kAllModels) {
    if (!names.empty()) names += ", ";
    names += to_string(m);
  }
  return names;
}

Model model_from_string(const std::string& name) {
  for (Model m : kAllModels) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown model '" + name +
                              "'; valid models: " + model_names_joined());
}

double risk_current_distance(const AgentState& ego, const AgentState& other,
                             const RiskConfig& cfg) {
  return inverse_distance_risk(cfg.epsilon,
                               (other.position - ego.position).norm());
}

double risk_path_distance(const AgentState& ego, const AgentState& other,
                          const RiskConfig& cfg) {
  return inverse_distance_risk(cfg.epsilon,
                               min_path_distance(ego.path, other.path));
}

double risk_trajectory_distance(const AgentState& ego, const AgentState& other,
                                const RiskConfig& cfg) {
  const double T = cfg.prediction.horizon;
  const PolylinePath ego_cut = cut_path(ego.path, ego.speed * T);
  const PolylinePath other_cut = cut_path(other.path, other.speed * T);
  return inverse_distance_risk(cfg.epsilon,
                               min_path_distance(ego_cut, other_cut));
}

TrajectoryPair predict_pair(const AgentState& ego, const AgentState& other,
                            const PredictionConfig& cfg) {
  return {predict(ego, cfg), predict(other, cfg)};
}

Encounter closest_encounter(const AgentState& ego, const AgentState& other,
                            const RiskConfig& cfg) {
  const TrajectoryPair pair = predict_pair(ego, other, cfg.prediction);
  Encounter enc{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t k = 0; k < pair.ego.times.size(); ++k) {
    const double d = (pair.other.positions[k] - pair.ego.positions[k]).norm();
    if (d < enc.distance) {
      enc.distance = d;
      enc.time = pair.ego.times[k];
    }
  }
  return enc;
}

double risk_closest_encounter(const AgentState& ego, const AgentState& other,
                              const RiskConfig& cfg) {
  const Encounter enc = closest_encounter(ego, other, cfg);
  if (enc.time >= cfg.prediction.s_max) return 0.0;
  return inverse_distance_risk(cfg.epsilon, enc.distance);
}

double risk_headway(const AgentState& ego, const AgentState& other) {
  if (ego.speed <= 0.0) return 0.0;
  const auto along = locate_on_path(ego.path, other.position);
  if (!along || *along <= 0.0) return 0.0;  // not ahead on the ego path
  const double th = *along / ego.speed;
  return 1.0 / (1.0 + th);
}

double risk_headway_2d(const AgentState& ego, const AgentState& other,
                       const RiskConfig&) {
  if (locate_on_path(ego.path, other.position)) {
    return risk_headway(ego, other);
  }
  const auto crossing = find_crossing(ego.path, other.path);
  if (!crossing) return 0.0;
  if (ego.speed <= 0.0) return 0.0;
  // project the other agent onto the ego path, keeping its remaining
  // distance to the crossing point
  const double dl = crossing->arclen_ego - crossing->arclen_other;
  if (dl <= 0.0) return 0.0;  // projected position behind the ego
  const double th = dl / ego.speed;
  return 1.0 / (1.0 + th);
}

double risk_encounter_plus_headway(const AgentState& ego,
                                   const AgentState& other,
                                   const RiskConfig& cfg, bool two_d) {
  const double enc = risk_closest_encounter(ego, other, cfg);
  const double hw =
      two_d ? risk_headway_2d(ego, other, cfg) : risk_headway(ego, other);
  return std::max(enc, hw);
}

double risk_circle(const AgentState& ego, const AgentState& other,
                   const RiskConfig& cfg) {
  const auto [a, b] = predict_pair(ego, other, cfg.prediction);
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < a.times.size(); ++k) {
    const double s = a.times[k];
    const double r1 = position_std(cfg.uncertainty, s);
    const Point2& c1 = a.positions[k];
    const CircleSet set = circles_at(b, s, cfg.uncertainty);
    for (const Circle& c2 : set.circles) {
      const double gap =
          std::max(0.0, (c2.center - c1).norm() - (r1 + c2.radius));
      min_gap = std::min(min_gap, gap);
    }
  }
  return inverse_distance_risk(cfg.epsilon, min_gap);
}

double gaussian_overlap(const GaussianState& a, const GaussianState& b) {
  const Eigen::Matrix2d sum = a.covariance + b.covariance;
  const double det = sum.determinant();
  if (!(det > 0.0)) {
    throw std::invalid_argument("covariance sum is singular");
  }
  const Point2 delta = b.mean - a.mean;
  const double quad = delta.dot(sum.inverse() * delta);
  return std::exp(-0.5 * quad) / (2.0 * std::numbers::pi * std::sqrt(det));
}

double risk_gaussian(const AgentState& ego, const AgentState& other,
                     const RiskConfig& cfg) {
  const auto [a, b] = predict_pair(ego, other, cfg.prediction);
  double best = 0.0;
  for (double s : a.times) {
    best = std::max(best, gaussian_overlap(gaussian_at(a, s, cfg.uncertainty),
                                           gaussian_at(b, s, cfg.uncertainty)));
  }
  return best;
}

double survival_risk_from_overlaps(std::span<const double> overlaps,
                                   double step, double dt, double escape_rate) {
  if (step <= 0.0 || dt <= 0.0) {
    throw std::invalid_argument("survival discretization needs step, dt > 0");
  }
  const std::size_t n = overlaps.size();
  double risk = 0.0;
  double hazard = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) {
      hazard += (overlaps[k - 1] / dt + escape_rate) * step;
    }
    const double rate = overlaps[k] / dt;
    const double weight = (k == 0 || k == n - 1) ? 0.5 : 1.0;
    risk += weight * rate * std::exp(-hazard) * step;
  }
  return std::min(risk, 1.0);
}

double risk_survival(const AgentState& ego, const AgentState& other,
                     const RiskConfig& cfg) {
  const auto [a, b] = predict_pair(ego, other, cfg.prediction);
  const std::size_t n = a.times.size();
  const double step = cfg.prediction.step;
  const double dt = cfg.survival.dt;

  // Overlap of the two predicted Gaussians at grid index j, evaluated on
  // demand; the survival function at every step integrates the event rate
  // from scratch, so the whole evaluation is quadratic in the grid size.
  const auto overlap_at = [&](std::size_t j) {
    const double sigma1 = position_std(cfg.uncertainty, a.times[j]);
    const double sigma2 = position_std(cfg.uncertainty, b.times[j]);
    return overlap_of(a.positions[j], b.positions[j], sigma1, sigma2);
  };

  double risk = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double hazard = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      hazard += (overlap_at(j) / dt + cfg.survival.escape_rate) * step;
    }
    const double rate = overlap_at(k) / dt;
    const double weight = (k == 0 || k == n - 1) ? 0.5 : 1.0;
    risk += weight * rate * std::exp(-hazard) * step;
  }
  return std::min(risk, 1.0);
}

double score(Model model, const AgentState& ego, const AgentState& other,
             const RiskConfig& cfg) {
  switch (model) {
    case Model::current_distance: return risk_current_distance(ego, other, cfg);
    case Model::path_distance: return risk_path_distance(ego, other, cfg);
    case Model::trajectory_distance:
      return risk_trajectory_distance(ego, other, cfg);
    case Model::closest_encounter:
      return risk_closest_encounter(ego, other, cfg);
    case Model::encounter_headway:
      return risk_encounter_plus_headway(ego, other, cfg, false);
    case Model::encounter_2d_headway:
      return risk_encounter_plus_headway(ego, other, cfg, true);
    case Model::circle_approximation: return risk_circle(ego, other, cfg);
    case Model::gaussian_2d: return risk_gaussian(ego, other, cfg);
    case Model::survival: return risk_survival(ego, other, cfg);
  }
  throw std::invalid_argument("unknown model");
}

std::vector<RiskScore> score_scenario(const Scenario& scenario, Model model,
                                      const RiskConfig& cfg) {
  std::vector<RiskScore> scores;
  scores.reserve(scenario.others.size());
  for (const AgentState& other : scenario.others) {
    scores.push_back({score(model, scenario.ego, other, cfg), model,
                      scenario.ego.id, other.id});
  }
  std::sort(scores.begin(), scores.end(),
            [](const RiskScore& x, const RiskScore& y) {
              return x.other_id < y.other_id;
            });
  return scores;
}

}  // namespace risk_sieve
