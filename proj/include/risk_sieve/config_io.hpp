#pragma once

#include <string>

#include "risk_sieve/risk_models.hpp"
#include "risk_sieve/scenario.hpp"

namespace risk_sieve {

/// Everything a run needs: dataset recipe plus model parameters. Missing
/// fields keep their defaults.
struct AppConfig {
  GeneratorConfig generator;
  RiskConfig risk;
};

AppConfig app_config_from_json(const std::string& text);
std::string app_config_to_json(const AppConfig& cfg);
AppConfig load_app_config(const std::string& path);

}  // namespace risk_sieve
