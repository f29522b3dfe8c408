#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "risk_sieve/geometry.hpp"

namespace risk_sieve {

/// Thrown for invariant-violating scenario data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown for text that is not valid JSON at all; carries the 1-based line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t line)
      : std::runtime_error(msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct AgentState {
  std::string id;
  Point2 position{0.0, 0.0};
  double speed = 0.0;          // m/s, >= 0
  PolylinePath path;           // vertex 0 equals position
};

/// One snapshot of a driving situation: the unit of evaluation.
struct Scenario {
  AgentState ego;
  std::vector<AgentState> others;
  double time = 0.0;
  std::uint64_t seed = 0;
};

/// 4-arm intersection descriptor. Lane paths are full routes
/// (approach + maneuver + exit). The exit legs run longer than the
/// approaches so that queues drain through the box and passed agents stay
/// in the scene.
struct IntersectionLayout {
  int arms = 4;
  int lanes_per_arm = 2;       // incoming lanes per arm
  double lane_width = 3.5;     // m
  double approach_length = 200.0;  // m
  double exit_length = 450.0;      // m
};

struct GeneratorConfig {
  int n_agents_min = 30;
  int n_agents_max = 100;
  double spacing_min = 5.0;    // m, along-path gap between agents on a lane
  double spacing_max = 100.0;  // m
  double speed_min = 0.0;      // m/s
  double speed_max = 25.0;     // m/s
  int n_scenarios = 500;
  IntersectionLayout layout;
};

/// All route polylines of the layout (straight, left, right per lane where
/// allowed), in a fixed deterministic order.
std::vector<PolylinePath> intersection_routes(const IntersectionLayout& layout);

/// Deterministic scenario batch for (config, seed).
std::vector<Scenario> generate(const GeneratorConfig& config,
                               std::uint64_t seed);

std::string save(std::span<const Scenario> scenarios);
std::vector<Scenario> load(const std::string& text);

void save_file(const std::string& path, std::span<const Scenario> scenarios);
std::vector<Scenario> load_file(const std::string& path);

/// Invariant violations as data; empty means the scenario is well-formed.
std::vector<std::string> validate(const Scenario& scenario);

}  // namespace risk_sieve
