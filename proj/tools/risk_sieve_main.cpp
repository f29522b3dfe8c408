// risk_sieve: per-agent driving risk scoring, importance filtering and
// ROC benchmarking on synthetic intersection scenarios.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "risk_sieve/config_io.hpp"
#include "risk_sieve/eval.hpp"
#include "risk_sieve/filter.hpp"
#include "risk_sieve/risk_models.hpp"
#include "risk_sieve/scenario.hpp"
#include "risk_sieve/version.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace risk_sieve;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 42;
  int jobs = 1;
};

AppConfig effective_config(const CommonArgs& args) {
  if (args.config_path.empty()) return AppConfig{};
  return load_app_config(args.config_path);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open for writing: " + path);
  f << text;
  if (!f) throw DataError("write failed: " + path);
}

void write_manifest(const std::string& command, const CommonArgs& args,
                    const AppConfig& cfg,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs,
                    double wall_time_s) {
  json m;
  m["command"] = command;
  m["config"] = json::parse(app_config_to_json(cfg));
  m["seed"] = args.seed;
  m["inputs"] = inputs;
  m["outputs"] = outputs;
  m["tool_version"] = kVersion;
  m["wall_time_s"] = wall_time_s;
  write_text_file(args.out_path + ".manifest.json", m.dump(2));
}

std::vector<Model> parse_models(const std::vector<std::string>& names) {
  std::vector<Model> models;
  if (names.empty() || (names.size() == 1 && names[0] == "all")) {
    models.assign(kAllModels.begin(), kAllModels.end());
    return models;
  }
  for (const std::string& n : names) {
    models.push_back(model_from_string(n));
  }
  return models;
}

std::string auc_path_for(const std::string& roc_path) {
  const std::string suffix = ".csv";
  if (roc_path.size() > suffix.size() &&
      roc_path.compare(roc_path.size() - suffix.size(), suffix.size(),
                       suffix) == 0) {
    return roc_path.substr(0, roc_path.size() - suffix.size()) + ".auc.json";
  }
  return roc_path + ".auc.json";
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(clock::now() - start_).count();
  }

 private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_ = clock::now();
};

int cmd_generate(const CommonArgs& args) {
  Timer timer;
  const AppConfig cfg = effective_config(args);
  const auto scenarios = generate(cfg.generator, args.seed);
  save_file(args.out_path, scenarios);
  write_manifest("generate", args, cfg, {}, {args.out_path}, timer.seconds());
  std::cout << "wrote " << scenarios.size() << " scenarios to "
            << args.out_path << "\n";
  return 0;
}

int cmd_score(const CommonArgs& args, const std::string& in_path,
              const std::string& model_name) {
  Timer timer;
  const AppConfig cfg = effective_config(args);
  const Model model = model_from_string(model_name);
  const auto scenarios = load_file(in_path);

  std::string csv = "scenario_id,agent_id,model,risk\n";
  char buf[64];
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    for (const RiskScore& s : score_scenario(scenarios[i], model, cfg.risk)) {
      std::snprintf(buf, sizeof(buf), "%zu,%s,%s,%.17g\n", i,
                    s.other_id.c_str(), to_string(model).c_str(), s.value);
      csv += buf;
    }
  }
  write_text_file(args.out_path, csv);
  write_manifest("score", args, cfg, {in_path}, {args.out_path},
                 timer.seconds());
  std::cout << "scored " << scenarios.size() << " scenarios with "
            << to_string(model) << "\n";
  return 0;
}

int cmd_roc(const CommonArgs& args, const std::string& in_path,
            const std::vector<std::string>& model_names) {
  Timer timer;
  const AppConfig cfg = effective_config(args);
  const auto models = parse_models(model_names);
  const auto scenarios = load_file(in_path);
  const auto labeled =
      label_all(scenarios, cfg.risk, kBaselineThreshold, args.jobs);

  std::vector<RocCurve> curves;
  for (Model m : models) {
    curves.push_back(roc_sweep(m, labeled,
                               default_thresholds(m, cfg.risk.epsilon),
                               cfg.risk, args.jobs));
  }

  std::ostringstream csv;
  write_roc_csv(csv, curves);
  write_text_file(args.out_path, csv.str());
  const std::string auc_path = auc_path_for(args.out_path);
  write_text_file(auc_path, auc_summary_json(curves));
  write_manifest("roc", args, cfg, {in_path}, {args.out_path, auc_path},
                 timer.seconds());
  for (const RocCurve& c : curves) {
    std::printf("%-22s AUC %.4f\n", to_string(c.model).c_str(), auc(c));
  }
  return 0;
}

int cmd_pipeline(const CommonArgs& args, const std::string& in_path,
                 const std::string& pipeline_path, double fn_rate) {
  Timer timer;
  const AppConfig cfg = effective_config(args);
  const auto scenarios = load_file(in_path);
  Pipeline pipeline = load_pipeline_file(pipeline_path);

  const bool needs_calibration =
      std::any_of(pipeline.stages.begin(), pipeline.stages.end(),
                  [](const FilterStage& s) { return !s.threshold; });
  if (needs_calibration) {
    const auto labeled =
        label_all(scenarios, cfg.risk, kBaselineThreshold, args.jobs);
    pipeline = calibrate_pipeline(pipeline, cfg.risk, labeled, fn_rate);
  }

  json out;
  out["pipeline"] = json::parse(pipeline_to_json(pipeline));
  json per_scenario = json::array();
  std::vector<double> mean_counts(pipeline.stages.size() + 1, 0.0);
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const FilterTrace trace = run_pipeline(scenarios[i], pipeline, cfg.risk);
    json js;
    js["index"] = i;
    std::vector<std::size_t> counts{scenarios[i].others.size()};
    json stages = json::array();
    for (const StageTrace& st : trace.stages) {
      counts.push_back(st.kept.size());
      stages.push_back({{"model", to_string(st.model)},
                        {"threshold", st.threshold},
                        {"scored", st.scores.size()},
                        {"kept", st.kept.size()},
                        {"dropped", st.dropped.size()}});
    }
    js["stage_counts"] = counts;
    js["stages"] = std::move(stages);
    js["tiers"] = trace.tiers;
    per_scenario.push_back(std::move(js));
    for (std::size_t k = 0; k < counts.size(); ++k) {
      mean_counts[k] += static_cast<double>(counts[k]);
    }
  }
  for (double& m : mean_counts) m /= static_cast<double>(scenarios.size());
  out["scenarios"] = std::move(per_scenario);
  out["summary"] = {{"mean_stage_counts", mean_counts}};
  write_text_file(args.out_path, out.dump(2));
  write_manifest("pipeline", args, cfg, {in_path, pipeline_path},
                 {args.out_path}, timer.seconds());
  std::cout << "mean stage survivor counts:";
  for (double m : mean_counts) std::printf(" %.1f", m);
  std::cout << "\n";
  return 0;
}

int cmd_bench(const CommonArgs& args, const std::string& in_path,
              const std::vector<std::string>& model_names,
              std::int64_t min_calls) {
  Timer timer;
  const AppConfig cfg = effective_config(args);
  const auto models = parse_models(model_names);
  const auto scenarios = load_file(in_path);

  std::vector<BenchResult> results;
  for (Model m : models) {
    results.push_back(bench(m, scenarios, cfg.risk, min_calls));
    std::printf("%-22s median %10.0f ns  p95 %10.0f ns\n",
                to_string(m).c_str(), results.back().median_ns,
                results.back().p95_ns);
  }
  std::ostringstream csv;
  write_bench_csv(csv, results);
  write_text_file(args.out_path, csv.str());
  write_manifest("bench", args, cfg, {in_path}, {args.out_path},
                 timer.seconds());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"driving-risk importance filtering toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonArgs args;
  std::string in_path, model_name, pipeline_path;
  std::vector<std::string> model_names;
  double fn_rate = 0.0;
  std::int64_t min_calls = 10000;

  const auto add_common = [&](CLI::App* sub, bool with_seed = false) {
    sub->add_option("--config", args.config_path, "config JSON path");
    sub->add_option("--out", args.out_path, "output path")->required();
    sub->add_option("--jobs", args.jobs, "worker threads")
        ->envname("RISK_SIEVE_JOBS");
    if (with_seed) sub->add_option("--seed", args.seed, "generation seed");
  };

  auto* gen = app.add_subcommand("generate", "generate synthetic scenarios");
  add_common(gen, true);

  auto* score_cmd = app.add_subcommand("score", "score agents with one model");
  add_common(score_cmd);
  score_cmd->add_option("--in", in_path, "scenario file")->required();
  score_cmd->add_option("--model", model_name, "risk model name")->required();

  auto* roc = app.add_subcommand("roc", "ROC sweep against survival baseline");
  add_common(roc);
  roc->add_option("--in", in_path, "scenario file")->required();
  roc->add_option("--models", model_names, "models (comma separated or 'all')")
      ->delimiter(',');

  auto* pipe = app.add_subcommand("pipeline", "run a multi-stage filter");
  add_common(pipe);
  pipe->add_option("--in", in_path, "scenario file")->required();
  pipe->add_option("--pipeline", pipeline_path, "pipeline JSON")->required();
  pipe->add_option("--fn-rate", fn_rate,
                   "max false-negative rate for stage calibration");

  auto* bench_cmd = app.add_subcommand("bench", "per-pair scoring benchmarks");
  add_common(bench_cmd);
  bench_cmd->add_option("--in", in_path, "scenario file")->required();
  bench_cmd->add_option("--models", model_names,
                        "models (comma separated or 'all')")
      ->delimiter(',');
  bench_cmd->add_option("--min-calls", min_calls, "timed calls per model");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_generate(args);
    if (score_cmd->parsed()) return cmd_score(args, in_path, model_name);
    if (roc->parsed()) return cmd_roc(args, in_path, model_names);
    if (pipe->parsed()) return cmd_pipeline(args, in_path, pipeline_path, fn_rate);
    if (bench_cmd->parsed()) return cmd_bench(args, in_path, model_names, min_calls);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "error: malformed JSON (" << e.what() << ")\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
