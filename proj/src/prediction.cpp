#include "risk_sieve/prediction.hpp"

#include <cmath>
#include <stdexcept>

namespace risk_sieve {

Trajectory predict(const AgentState& agent, const PredictionConfig& cfg) {
  if (cfg.step <= 0.0 || cfg.step > cfg.horizon) {
    throw std::invalid_argument("prediction step must be in (0, horizon]");
  }
  Trajectory traj;
  traj.speed = agent.speed;
  traj.path = agent.path;
  const int n = static_cast<int>(std::floor(cfg.horizon / cfg.step + 0.5));
  traj.times.reserve(static_cast<std::size_t>(n) + 1);
  traj.positions.reserve(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    const double s = k * cfg.step;
    traj.times.push_back(s);
    traj.positions.push_back(point_at(agent.path, agent.speed * s));
  }
  return traj;
}

GaussianState gaussian_at(const Trajectory& traj, double s,
                          const UncertaintyConfig& cfg) {
  if (cfg.sigma0 <= 0.0 || cfg.growth < 0.0) {
    throw std::invalid_argument("uncertainty config: sigma0 > 0, growth >= 0");
  }
  const double sigma = position_std(cfg, s);
  GaussianState g;
  g.mean = point_at(traj.path, traj.speed * s);
  g.covariance = sigma * sigma * Eigen::Matrix2d::Identity();
  return g;
}

CircleSet circles_at(const Trajectory& traj, double s,
                     const UncertaintyConfig& cfg) {
  if (cfg.k_circles < 1) {
    throw std::invalid_argument("uncertainty config: k_circles >= 1");
  }
  const double sigma = position_std(cfg, s);
  const double base = traj.speed * s;
  CircleSet set;
  set.circles.reserve(static_cast<std::size_t>(cfg.k_circles));
  for (int i = 0; i < cfg.k_circles; ++i) {
    const double j = i - (cfg.k_circles - 1) / 2.0;
    set.circles.push_back({point_at(traj.path, base + j * sigma), sigma});
  }
  return set;
}

}  // namespace risk_sieve
