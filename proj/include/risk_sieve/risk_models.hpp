#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "risk_sieve/prediction.hpp"
#include "risk_sieve/scenario.hpp"

namespace risk_sieve {

enum class Model {
  current_distance,
  path_distance,
  trajectory_distance,
  closest_encounter,
  encounter_headway,
  encounter_2d_headway,
  circle_approximation,
  gaussian_2d,
  survival,
};

inline constexpr std::array<Model, 9> kAllModels = {
    Model::current_distance,    Model::path_distance,
    Model::trajectory_distance, Model::closest_encounter,
    Model::encounter_headway,   Model::encounter_2d_headway,
    Model::circle_approximation, Model::gaussian_2d,
    Model::survival,
};

std::string to_string(Model m);
/// Throws std::invalid_argument listing the valid names.
Model model_from_string(const std::string& name);
std::string model_names_joined();

struct SurvivalConfig {
  double escape_rate = 0.2;  // 1/s, constant non-collision event rate
  double dt = 0.1;           // s, overlap-to-rate conversion step
};

struct RiskConfig {
  double epsilon = 1.0;  // m, shared inverse-distance normalizer
  PredictionConfig prediction;
  UncertaintyConfig uncertainty;
  SurvivalConfig survival;
};

struct RiskScore {
  double value = 0.0;
  Model model = Model::current_distance;
  std::string ego_id;
  std::string other_id;
};

/// Both agents predicted over one shared sample grid.
struct TrajectoryPair {
  Trajectory ego;
  Trajectory other;
};

TrajectoryPair predict_pair(const AgentState& ego, const AgentState& other,
                            const PredictionConfig& cfg);

// Distance models
double risk_current_distance(const AgentState& ego, const AgentState& other,
                             const RiskConfig& cfg);
double risk_path_distance(const AgentState& ego, const AgentState& other,
                          const RiskConfig& cfg);
double risk_trajectory_distance(const AgentState& ego, const AgentState& other,
                                const RiskConfig& cfg);

// Time models
struct Encounter {
  double distance;  // d_E, m
  double time;      // s_E, s (smallest s on ties)
};
Encounter closest_encounter(const AgentState& ego, const AgentState& other,
                            const RiskConfig& cfg);
double risk_closest_encounter(const AgentState& ego, const AgentState& other,
                              const RiskConfig& cfg);
double risk_headway(const AgentState& ego, const AgentState& other);
double risk_headway_2d(const AgentState& ego, const AgentState& other,
                       const RiskConfig& cfg);
double risk_encounter_plus_headway(const AgentState& ego,
                                   const AgentState& other,
                                   const RiskConfig& cfg, bool two_d);

// Stochastic models
double risk_circle(const AgentState& ego, const AgentState& other,
                   const RiskConfig& cfg);
double risk_gaussian(const AgentState& ego, const AgentState& other,
                     const RiskConfig& cfg);
double risk_survival(const AgentState& ego, const AgentState& other,
                     const RiskConfig& cfg);

/// Density value of the product of two positional Gaussians (the collision
/// overlap P_o). Throws std::invalid_argument if the covariance sum is
/// singular.
double gaussian_overlap(const GaussianState& a, const GaussianState& b);

/// Poisson-process accumulation of precomputed overlaps on a fixed grid.
/// Exposed so properties of the integrator can be tested on synthetic
/// overlap profiles; risk_survival matches it on real trajectory pairs.
double survival_risk_from_overlaps(std::span<const double> overlaps,
                                   double step, double dt, double escape_rate);

double score(Model model, const AgentState& ego, const AgentState& other,
             const RiskConfig& cfg);

/// One score per other agent, ordered by agent id.
std::vector<RiskScore> score_scenario(const Scenario& scenario, Model model,
                                      const RiskConfig& cfg);

}  // namespace risk_sieve
