#pragma once

#include <vector>

#include "risk_sieve/geometry.hpp"
#include "risk_sieve/scenario.hpp"

namespace risk_sieve {

struct PredictionConfig {
  double step = 0.1;     // s, prediction grid spacing
  double horizon = 12.0; // s, time horizon T
  double s_max = 10.0;   // s, closest-encounter gate
};

struct UncertaintyConfig {
  double sigma0 = 0.5;  // m, initial position std
  double growth = 0.3;  // m/s, std growth per second of prediction
  int k_circles = 3;
};

/// Constant-velocity samples along the owner's path, one per grid step.
struct Trajectory {
  std::vector<double> times;      // 0, step, 2*step, ...
  std::vector<Point2> positions;  // point_at(path, speed * s), clamped
  double speed = 0.0;
  PolylinePath path;
};

struct GaussianState {
  Point2 mean;
  Eigen::Matrix2d covariance;
};

struct Circle {
  Point2 center;
  double radius;
};

struct CircleSet {
  std::vector<Circle> circles;
};

/// Position std at prediction time s: sigma0 + growth * s.
inline double position_std(const UncertaintyConfig& cfg, double s) {
  return cfg.sigma0 + cfg.growth * s;
}

Trajectory predict(const AgentState& agent, const PredictionConfig& cfg);

/// Isotropic Gaussian around the predicted position at time s.
GaussianState gaussian_at(const Trajectory& traj, double s,
                          const UncertaintyConfig& cfg);

/// k circles spread longitudinally along the path around arc length
/// speed * s, spacing and radius both equal to the position std at s.
CircleSet circles_at(const Trajectory& traj, double s,
                     const UncertaintyConfig& cfg);

}  // namespace risk_sieve
