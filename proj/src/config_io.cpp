#include "risk_sieve/config_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace risk_sieve {

namespace {

using json = nlohmann::ordered_json;

void read_into(const json& j, const char* key, double& out) {
  if (j.contains(key)) out = j.at(key).get<double>();
}
void read_into(const json& j, const char* key, int& out) {
  if (j.contains(key)) out = j.at(key).get<int>();
}

}  // namespace

AppConfig app_config_from_json(const std::string& text) {
  const json j = json::parse(text);
  AppConfig cfg;
  if (j.contains("generator")) {
    const json& g = j["generator"];
    read_into(g, "n_agents_min", cfg.generator.n_agents_min);
    read_into(g, "n_agents_max", cfg.generator.n_agents_max);
    read_into(g, "spacing_min", cfg.generator.spacing_min);
    read_into(g, "spacing_max", cfg.generator.spacing_max);
    read_into(g, "speed_min", cfg.generator.speed_min);
    read_into(g, "speed_max", cfg.generator.speed_max);
    read_into(g, "n_scenarios", cfg.generator.n_scenarios);
    if (g.contains("layout")) {
      const json& l = g["layout"];
      read_into(l, "arms", cfg.generator.layout.arms);
      read_into(l, "lanes_per_arm", cfg.generator.layout.lanes_per_arm);
      read_into(l, "lane_width", cfg.generator.layout.lane_width);
      read_into(l, "approach_length", cfg.generator.layout.approach_length);
      read_into(l, "exit_length", cfg.generator.layout.exit_length);
    }
  }
  if (j.contains("risk")) {
    const json& r = j["risk"];
    read_into(r, "epsilon", cfg.risk.epsilon);
    if (r.contains("prediction")) {
      const json& p = r["prediction"];
      read_into(p, "step", cfg.risk.prediction.step);
      read_into(p, "horizon", cfg.risk.prediction.horizon);
      read_into(p, "s_max", cfg.risk.prediction.s_max);
    }
    if (r.contains("uncertainty")) {
      const json& u = r["uncertainty"];
      read_into(u, "sigma0", cfg.risk.uncertainty.sigma0);
      read_into(u, "growth", cfg.risk.uncertainty.growth);
      read_into(u, "k_circles", cfg.risk.uncertainty.k_circles);
    }
    if (r.contains("survival")) {
      const json& s = r["survival"];
      read_into(s, "escape_rate", cfg.risk.survival.escape_rate);
      read_into(s, "dt", cfg.risk.survival.dt);
    }
  }
  return cfg;
}

std::string app_config_to_json(const AppConfig& cfg) {
  json j;
  j["generator"] = {
      {"n_agents_min", cfg.generator.n_agents_min},
      {"n_agents_max", cfg.generator.n_agents_max},
      {"spacing_min", cfg.generator.spacing_min},
      {"spacing_max", cfg.generator.spacing_max},
      {"speed_min", cfg.generator.speed_min},
      {"speed_max", cfg.generator.speed_max},
      {"n_scenarios", cfg.generator.n_scenarios},
      {"layout",
       {{"arms", cfg.generator.layout.arms},
        {"lanes_per_arm", cfg.generator.layout.lanes_per_arm},
        {"lane_width", cfg.generator.layout.lane_width},
        {"approach_length", cfg.generator.layout.approach_length},
        {"exit_length", cfg.generator.layout.exit_length}}},
  };
  j["risk"] = {
      {"epsilon", cfg.risk.epsilon},
      {"prediction",
       {{"step", cfg.risk.prediction.step},
        {"horizon", cfg.risk.prediction.horizon},
        {"s_max", cfg.risk.prediction.s_max}}},
      {"uncertainty",
       {{"sigma0", cfg.risk.uncertainty.sigma0},
        {"growth", cfg.risk.uncertainty.growth},
        {"k_circles", cfg.risk.uncertainty.k_circles}}},
      {"survival",
       {{"escape_rate", cfg.risk.survival.escape_rate},
        {"dt", cfg.risk.survival.dt}}},
  };
  return j.dump(2);
}

AppConfig load_app_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open config: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return app_config_from_json(ss.str());
}

}  // namespace risk_sieve
