#include "risk_sieve/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "risk_sieve/rng.hpp"

namespace risk_sieve {

namespace {

using json = nlohmann::ordered_json;

constexpr double kArcStepDeg = 15.0;
// keep at least this much path ahead of a placed agent
constexpr double kPlacementMargin = 1.0;

enum class Maneuver { straight, left, right };

struct Route {
  PolylinePath path;
  int arm;
  int lane;
  Maneuver maneuver;
};

std::vector<Point2> arc_points(const Point2& center, double radius,
                               double start_deg, double end_deg) {
  std::vector<Point2> pts;
  const int steps = std::max(
      1, static_cast<int>(std::round(std::abs(end_deg - start_deg) / kArcStepDeg)));
  for (int i = 0; i <= steps; ++i) {
    const double a = (start_deg + (end_deg - start_deg) * i / steps) *
                     std::numbers::pi / 180.0;
    pts.emplace_back(center.x() + radius * std::cos(a),
                     center.y() + radius * std::sin(a));
  }
  return pts;
}

std::vector<Route> make_routes(const IntersectionLayout& layout) {
  if (layout.arms != 4) {
    throw std::invalid_argument("layout.arms: must be 4, got " +
                                std::to_string(layout.arms));
  }
  if (layout.lanes_per_arm < 1 || layout.lane_width <= 0.0 ||
      layout.approach_length <= 0.0 || layout.exit_length <= 0.0) {
    throw std::invalid_argument(
        "layout: lanes_per_arm, lane_width, approach_length and exit_length "
        "must be positive");
  }
  const int L = layout.lanes_per_arm;
  const double w = layout.lane_width;
  const double B = L * w;  // intersection box half-extent
  const double A = layout.approach_length;
  const double E = layout.exit_length;

  std::vector<Route> routes;
  // Local frame: approach from +x driving toward -x; rotate per arm.
  for (int arm = 0; arm < 4; ++arm) {
    const double ca = std::cos(arm * std::numbers::pi / 2.0);
    const double sa = std::sin(arm * std::numbers::pi / 2.0);
    const auto rot = [&](const Point2& p) {
      return Point2(ca * p.x() - sa * p.y(), sa * p.x() + ca * p.y());
    };
    for (int lane = 0; lane < L; ++lane) {
      const double y = w * (lane + 0.5);
      // straight through to the opposite arm
      {
        std::vector<Point2> pts{rot({B + A, y}), rot({-(B + E), y})};
        routes.push_back(
            {PolylinePath(std::move(pts)), arm, lane, Maneuver::straight});
      }
      if (lane == 0) {  // inner lane: left turn, exits heading -y
        const double r = B + w * 0.5;
        std::vector<Point2> pts{rot({B + A, y})};
        for (const auto& p : arc_points({B, -B}, r, 90.0, 180.0)) {
          pts.push_back(rot(p));
        }
        pts.push_back(rot({-w * 0.5, -(B + E)}));
        routes.push_back(
            {PolylinePath(std::move(pts)), arm, lane, Maneuver::left});
      }
      if (lane == L - 1) {  // outer lane: right turn, exits heading +y
        const double r = B - y;
        std::vector<Point2> pts{rot({B + A, y})};
        if (r > kGeomTol) {
          for (const auto& p : arc_points({B, B}, r, -90.0, -180.0)) {
            pts.push_back(rot(p));
          }
        } else {
          pts.push_back(rot({B, y}));  // single-lane arm: square corner
        }
        pts.push_back(rot({y, B + E}));
        routes.push_back(
            {PolylinePath(std::move(pts)), arm, lane, Maneuver::right});
      }
    }
  }
  return routes;
}

struct Placement {
  std::size_t route_index;
  double offset;
};

Scenario generate_one(const GeneratorConfig& cfg,
                      const std::vector<Route>& routes,
                      std::uint64_t scenario_seed) {
  Rng rng(scenario_seed);

  // lane index per route; routes on the same (arm, lane) share an approach
  std::vector<std::size_t> lane_of(routes.size());
  std::vector<std::pair<int, int>> lane_keys;
  for (std::size_t r = 0; r < routes.size(); ++r) {
    const std::pair<int, int> key{routes[r].arm, routes[r].lane};
    auto it = std::find(lane_keys.begin(), lane_keys.end(), key);
    if (it == lane_keys.end()) {
      lane_keys.push_back(key);
      lane_of[r] = lane_keys.size() - 1;
    } else {
      lane_of[r] = static_cast<std::size_t>(it - lane_keys.begin());
    }
  }

  // routes ending on the same outgoing lane form a merge group
  std::vector<std::size_t> exit_group_of(routes.size());
  {
    std::vector<Point2> ends;
    for (std::size_t r = 0; r < routes.size(); ++r) {
      const Point2 end = routes[r].path.vertices().back();
      std::size_t g = ends.size();
      for (std::size_t e = 0; e < ends.size(); ++e) {
        if ((ends[e] - end).norm() < 1e-6) {
          g = e;
          break;
        }
      }
      if (g == ends.size()) ends.push_back(end);
      exit_group_of[r] = g;
    }
  }

  const int n_agents = static_cast<int>(
      rng.uniform_int(static_cast<std::uint64_t>(cfg.n_agents_min),
                      static_cast<std::uint64_t>(cfg.n_agents_max)));

  // Placement runs in chains: each new agent goes ahead of the last one on
  // its lane, with the along-lane gap drawn from the spacing range. Merged
  // exit lanes are kept conflict-free by blocking spacing_min windows around
  // agents already placed there.
  constexpr double kEmpty = -1.0;
  std::vector<double> lane_frontier(lane_keys.size(), kEmpty);
  // distance from the route end for agents sitting on a merged exit lane
  std::vector<std::vector<double>> exit_tails(routes.size());

  using Interval = std::pair<double, double>;
  std::vector<Placement> placements;
  std::vector<std::vector<double>> lane_offsets(lane_keys.size());
  for (int k = 0; k < n_agents + 1; ++k) {  // others + ego
    std::vector<std::size_t> feasible;
    std::vector<std::vector<Interval>> windows;
    for (std::size_t r = 0; r < routes.size(); ++r) {
      const double len = routes[r].path.total_length();
      const double cap = len - kPlacementMargin;
      const double lane_front = lane_frontier[lane_of[r]];
      const double lo = lane_front == kEmpty ? 0.0 : lane_front + cfg.spacing_min;
      const double hi = std::min(
          cap, (lane_front == kEmpty ? 0.0 : lane_front) + cfg.spacing_max);
      if (lo > hi) continue;

      // subtract exit-lane conflicts of merge partners
      std::vector<Interval> allowed{{lo, hi}};
      for (const double tail : exit_tails[exit_group_of[r]]) {
        const Interval blocked{len - tail - cfg.spacing_min,
                               len - tail + cfg.spacing_min};
        std::vector<Interval> next;
        for (const Interval& iv : allowed) {
          if (blocked.second <= iv.first || blocked.first >= iv.second) {
            next.push_back(iv);
            continue;
          }
          if (iv.first < blocked.first) next.push_back({iv.first, blocked.first});
          if (blocked.second < iv.second) next.push_back({blocked.second, iv.second});
        }
        allowed = std::move(next);
      }
      if (!allowed.empty()) {
        feasible.push_back(r);
        windows.push_back(std::move(allowed));
      }
    }
    if (feasible.empty()) {
      throw DataError(
          "generation infeasible: cannot place agent " + std::to_string(k + 1) +
          " of " + std::to_string(n_agents + 1) + " with spacing_min=" +
          std::to_string(cfg.spacing_min) + " m; lane capacity exhausted");
    }
    const std::size_t pick = rng.index(feasible.size());
    const std::size_t r = feasible[pick];
    const double len = routes[r].path.total_length();

    // measure-weighted uniform draw over the allowed sub-intervals
    double measure = 0.0;
    for (const Interval& iv : windows[pick]) measure += iv.second - iv.first;
    double u = rng.uniform(0.0, measure);
    double offset = windows[pick].back().second;
    for (const Interval& iv : windows[pick]) {
      if (u <= iv.second - iv.first) {
        offset = iv.first + u;
        break;
      }
      u -= iv.second - iv.first;
    }

    lane_frontier[lane_of[r]] = std::max(lane_frontier[lane_of[r]], offset);
    lane_offsets[lane_of[r]].push_back(offset);
    const double tail = len - offset;
    if (tail <= cfg.layout.exit_length) {  // on the shared exit leg
      exit_tails[exit_group_of[r]].push_back(tail);
    }
    placements.push_back({r, offset});
  }

  // post-placement validation: every drawn along-lane gap is in range, and
  // merged exit lanes never pack agents closer than spacing_min
  for (const auto& offsets : lane_offsets) {
    for (std::size_t i = 1; i < offsets.size(); ++i) {
      const double gap = offsets[i] - offsets[i - 1];
      if (gap < cfg.spacing_min - 1e-9 || gap > cfg.spacing_max + 1e-9) {
        throw DataError("generator contract violated: lane gap " +
                        std::to_string(gap) + " outside spacing range");
      }
    }
  }
  for (const auto& tails : exit_tails) {
    for (std::size_t i = 0; i < tails.size(); ++i) {
      for (std::size_t j = i + 1; j < tails.size(); ++j) {
        if (std::abs(tails[i] - tails[j]) < cfg.spacing_min - 1e-9) {
          throw DataError(
              "generator contract violated: exit-lane separation below "
              "spacing_min");
        }
      }
    }
  }

  // ego: a left-turning placement on the final stretch of its approach.
  // The unprotected left is the interaction-richest perspective; the lane
  // (one of the inner lanes of the four arms) stays randomly chosen.
  constexpr double kEgoWindow = 100.0;
  std::vector<std::size_t> ego_cands;
  std::vector<std::size_t> approach_cands;
  for (std::size_t i = 0; i < placements.size(); ++i) {
    if (placements[i].offset < cfg.layout.approach_length) {
      approach_cands.push_back(i);
      if (placements[i].offset >= cfg.layout.approach_length - kEgoWindow &&
          routes[placements[i].route_index].maneuver == Maneuver::left) {
        ego_cands.push_back(i);
      }
    }
  }
  if (ego_cands.empty()) ego_cands = approach_cands;
  const std::size_t ego_index = ego_cands[rng.index(ego_cands.size())];

  const auto make_agent = [&](const Placement& pl, std::string id) {
    AgentState a;
    a.id = std::move(id);
    a.path = suffix_from(routes[pl.route_index].path, pl.offset);
    a.position = a.path.vertices().front();
    a.speed = rng.uniform(cfg.speed_min, cfg.speed_max);
    return a;
  };

  Scenario sc;
  sc.time = 0.0;
  sc.seed = scenario_seed;
  int next_id = 0;
  for (std::size_t i = 0; i < placements.size(); ++i) {
    if (i == ego_index) {
      sc.ego = make_agent(placements[i], "ego");
    } else {
      sc.others.push_back(
          make_agent(placements[i], "a" + std::to_string(next_id++)));
    }
  }
  return sc;
}

json agent_to_json(const AgentState& a) {
  json j;
  j["id"] = a.id;
  j["x"] = a.position.x();
  j["y"] = a.position.y();
  j["speed"] = a.speed;
  json path = json::array();
  for (const auto& v : a.path.vertices()) {
    path.push_back(json::array({v.x(), v.y()}));
  }
  j["path"] = std::move(path);
  return j;
}

double finite_number(const json& j, const std::string& what) {
  if (!j.is_number()) {
    throw DataError("non-finite coordinate or number in " + what);
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) {
    throw DataError("non-finite coordinate or number in " + what);
  }
  return v;
}

AgentState agent_from_json(const json& j) {
  if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
    throw DataError("malformed agent record: missing id");
  }
  AgentState a;
  a.id = j["id"].get<std::string>();
  a.position = Point2(finite_number(j.at("x"), "agent '" + a.id + "'"),
                      finite_number(j.at("y"), "agent '" + a.id + "'"));
  a.speed = finite_number(j.at("speed"), "agent '" + a.id + "'");
  if (!j.contains("path") || !j["path"].is_array() || j["path"].empty()) {
    throw DataError("malformed agent record: missing path for '" + a.id + "'");
  }
  std::vector<Point2> pts;
  for (const auto& p : j["path"]) {
    if (!p.is_array() || p.size() != 2) {
      throw DataError("malformed path vertex for agent '" + a.id + "'");
    }
    pts.emplace_back(finite_number(p[0], "path of agent '" + a.id + "'"),
                     finite_number(p[1], "path of agent '" + a.id + "'"));
  }
  try {
    a.path = PolylinePath(std::move(pts));
  } catch (const std::invalid_argument& e) {
    throw DataError("invalid path for agent '" + a.id + "': " + e.what());
  }
  return a;
}

void check_finite_agent(const AgentState& a) {
  if (!a.position.allFinite() || !std::isfinite(a.speed)) {
    throw DataError("non-finite coordinate or speed in agent '" + a.id + "'");
  }
}

}  // namespace

std::vector<PolylinePath> intersection_routes(const IntersectionLayout& layout) {
  std::vector<PolylinePath> out;
  for (auto& r : make_routes(layout)) {
    out.push_back(std::move(r.path));
  }
  return out;
}

std::vector<Scenario> generate(const GeneratorConfig& cfg, std::uint64_t seed) {
  if (cfg.n_agents_min < 1 || cfg.n_agents_max < cfg.n_agents_min) {
    throw std::invalid_argument("n_agents_min/n_agents_max: invalid range");
  }
  if (cfg.spacing_min <= 0.0 || cfg.spacing_max < cfg.spacing_min) {
    throw std::invalid_argument("spacing_min/spacing_max: invalid range");
  }
  if (cfg.speed_min < 0.0 || cfg.speed_max < cfg.speed_min) {
    throw std::invalid_argument("speed_min/speed_max: invalid range");
  }
  if (cfg.n_scenarios < 1) {
    throw std::invalid_argument("n_scenarios: must be positive");
  }
  const auto routes = make_routes(cfg.layout);
  std::vector<Scenario> out;
  out.reserve(static_cast<std::size_t>(cfg.n_scenarios));
  for (int i = 0; i < cfg.n_scenarios; ++i) {
    out.push_back(generate_one(cfg, routes,
                               mix_seed(seed, static_cast<std::uint64_t>(i))));
  }
  return out;
}

std::string save(std::span<const Scenario> scenarios) {
  json doc;
  doc["version"] = 1;
  json arr = json::array();
  for (const auto& sc : scenarios) {
    check_finite_agent(sc.ego);
    for (const auto& a : sc.others) check_finite_agent(a);
    json j;
    j["seed"] = sc.seed;
    j["time"] = sc.time;
    j["ego"] = agent_to_json(sc.ego);
    json others = json::array();
    for (const auto& a : sc.others) others.push_back(agent_to_json(a));
    j["others"] = std::move(others);
    arr.push_back(std::move(j));
  }
  doc["scenarios"] = std::move(arr);
  return doc.dump();
}

std::vector<Scenario> load(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t upto = std::min(e.byte, text.size());
    const std::size_t line =
        1 + static_cast<std::size_t>(
                std::count(text.begin(), text.begin() + upto, '\n'));
    throw ParseError("parse error at line " + std::to_string(line) + ": " +
                         e.what(),
                     line);
  }
  if (!doc.is_object() || !doc.contains("version") ||
      !doc["version"].is_number_integer()) {
    throw DataError("missing schema version");
  }
  if (doc["version"].get<int>() != 1) {
    throw DataError("unknown schema version: " + doc["version"].dump());
  }
  if (!doc.contains("scenarios") || !doc["scenarios"].is_array()) {
    throw DataError("missing scenarios array");
  }
  std::vector<Scenario> out;
  for (const auto& j : doc["scenarios"]) {
    Scenario sc;
    sc.seed = j.value("seed", std::uint64_t{0});
    sc.time = finite_number(j.at("time"), "scenario time");
    sc.ego = agent_from_json(j.at("ego"));
    std::vector<std::string> ids{sc.ego.id};
    for (const auto& ja : j.at("others")) {
      sc.others.push_back(agent_from_json(ja));
      ids.push_back(sc.others.back().id);
    }
    std::sort(ids.begin(), ids.end());
    const auto dup = std::adjacent_find(ids.begin(), ids.end());
    if (dup != ids.end()) {
      throw DataError("duplicate id: '" + *dup + "'");
    }
    out.push_back(std::move(sc));
  }
  return out;
}

void save_file(const std::string& path, std::span<const Scenario> scenarios) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open for writing: " + path);
  f << save(scenarios);
  if (!f) throw DataError("write failed: " + path);
}

std::vector<Scenario> load_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return load(ss.str());
}

std::vector<std::string> validate(const Scenario& sc) {
  std::vector<std::string> violations;
  std::vector<std::string> ids{sc.ego.id};
  for (const auto& a : sc.others) ids.push_back(a.id);
  std::sort(ids.begin(), ids.end());
  for (auto it = std::adjacent_find(ids.begin(), ids.end()); it != ids.end();
       it = std::adjacent_find(it + 1, ids.end())) {
    violations.push_back("duplicate id: " + *it);
  }
  if (sc.others.empty()) {
    violations.push_back("no other agents");
  }
  if (!std::isfinite(sc.time)) {
    violations.push_back("non-finite time");
  }
  const auto check_agent = [&](const AgentState& a) {
    if (!a.position.allFinite()) {
      violations.push_back("non-finite coordinate: " + a.id);
    }
    if (!std::isfinite(a.speed)) {
      violations.push_back("non-finite speed: " + a.id);
    } else if (a.speed < 0.0) {
      violations.push_back("negative speed: " + a.id);
    }
    if (a.path.size() < 2) {
      violations.push_back("degenerate path: " + a.id);
    }
    if (a.path.size() >= 1 &&
        (a.path.vertices().front() - a.position).norm() > kGeomTol) {
      violations.push_back("path origin mismatch: " + a.id);
    }
  };
  check_agent(sc.ego);
  for (const auto& a : sc.others) check_agent(a);
  return violations;
}

}  // namespace risk_sieve
