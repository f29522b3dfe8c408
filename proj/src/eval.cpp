#include "risk_sieve/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <thread>

#include <json.hpp>

namespace risk_sieve {

namespace {

/// Index-ordered parallel map; results land in input order regardless of
/// scheduling, keeping downstream reductions bit-exact.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::min<int>(jobs, static_cast<int>(n));
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

struct Rates {
  double tpr;
  double fpr;
  ConfusionCounts counts;
};

/// Rates for one scenario at one threshold given its scores and labels in
/// matching order.
Rates rates_at(std::span<const double> values,
               std::span<const ImportanceLabel> labels, double threshold) {
  ConfusionCounts c;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const bool kept = values[i] >= threshold;
    const bool important = labels[i].important;
    if (kept && important) ++c.tp;
    else if (kept && !important) ++c.fp;
    else if (!kept && important) ++c.fn;
    else ++c.tn;
  }
  return {c.tpr(), c.fpr(), c};
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double std_of(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(xs.size()));
}

void append_number(std::string& out, double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  out += buf;
}

}  // namespace

std::vector<ImportanceLabel> label_baseline(const Scenario& scenario,
                                            const RiskConfig& cfg,
                                            double threshold) {
  std::vector<ImportanceLabel> labels;
  labels.reserve(scenario.others.size());
  for (const RiskScore& s : score_scenario(scenario, Model::survival, cfg)) {
    labels.push_back({s.other_id, s.value >= threshold});
  }
  return labels;
}

std::vector<LabeledScenario> label_all(std::span<const Scenario> scenarios,
                                       const RiskConfig& cfg, double threshold,
                                       int jobs) {
  std::vector<LabeledScenario> out(scenarios.size());
  parallel_for(scenarios.size(), jobs, [&](std::size_t i) {
    LabeledScenario ls;
    ls.scenario = scenarios[i];
    for (const RiskScore& s :
         score_scenario(scenarios[i], Model::survival, cfg)) {
      ls.labels.push_back({s.other_id, s.value >= threshold});
      ls.baseline_scores.push_back(s.value);
    }
    out[i] = std::move(ls);
  });
  return out;
}

ConfusionCounts confusion(std::span<const std::string> kept_ids,
                          std::span<const ImportanceLabel> labels) {
  std::set<std::string> kept(kept_ids.begin(), kept_ids.end());
  for (const auto& id : kept) {
    if (std::none_of(labels.begin(), labels.end(),
                     [&](const ImportanceLabel& l) { return l.agent_id == id; })) {
      throw DataError("kept set contains unlabeled id: '" + id + "'");
    }
  }
  ConfusionCounts c;
  for (const ImportanceLabel& l : labels) {
    const bool k = kept.count(l.agent_id) > 0;
    if (k && l.important) ++c.tp;
    else if (k && !l.important) ++c.fp;
    else if (!k && l.important) ++c.fn;
    else ++c.tn;
  }
  return c;
}

RocCurve roc_sweep(Model model, std::span<const LabeledScenario> scenarios,
                   std::vector<double> thresholds, const RiskConfig& cfg,
                   int jobs) {
  if (scenarios.empty()) {
    throw DataError("roc_sweep needs at least one scenario");
  }
  std::sort(thresholds.begin(), thresholds.end());
  if (thresholds.empty() || thresholds.front() > 0.0) {
    thresholds.insert(thresholds.begin(), 0.0);
  }
  if (!std::isinf(thresholds.back())) {
    thresholds.push_back(std::numeric_limits<double>::infinity());
  }

  // score each scenario once, sweep afterwards
  std::vector<std::vector<double>> values(scenarios.size());
  parallel_for(scenarios.size(), jobs, [&](std::size_t i) {
    std::vector<double> v;
    for (const RiskScore& s :
         score_scenario(scenarios[i].scenario, model, cfg)) {
      v.push_back(s.value);
    }
    values[i] = std::move(v);
  });

  RocCurve curve;
  curve.model = model;
  for (double thr : thresholds) {
    std::vector<double> tprs, fprs;
    tprs.reserve(scenarios.size());
    fprs.reserve(scenarios.size());
    ConfusionCounts pooled;
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      const Rates r = rates_at(values[i], scenarios[i].labels, thr);
      tprs.push_back(r.tpr);
      fprs.push_back(r.fpr);
      pooled.tp += r.counts.tp;
      pooled.fp += r.counts.fp;
      pooled.tn += r.counts.tn;
      pooled.fn += r.counts.fn;
    }
    RocPoint pt;
    pt.threshold = thr;
    pt.mean_tpr = mean_of(tprs);
    pt.std_tpr = std_of(tprs, pt.mean_tpr);
    pt.mean_fpr = mean_of(fprs);
    pt.std_fpr = std_of(fprs, pt.mean_fpr);
    pt.pooled = pooled;
    curve.points.push_back(pt);
  }
  return curve;
}

double auc(const RocCurve& curve) {
  std::vector<std::pair<double, double>> pts;  // (fpr, tpr)
  pts.reserve(curve.points.size() + 2);
  pts.emplace_back(0.0, 0.0);
  for (const RocPoint& p : curve.points) {
    pts.emplace_back(p.mean_fpr, p.mean_tpr);
  }
  pts.emplace_back(1.0, 1.0);
  std::sort(pts.begin(), pts.end());
  double area = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    area += (pts[i].first - pts[i - 1].first) *
            (pts[i].second + pts[i - 1].second) * 0.5;
  }
  return area;
}

double best_f1_threshold(const RocCurve& curve) {
  double best_f1 = -1.0;
  double best_thr = 0.0;
  for (const RocPoint& p : curve.points) {
    const double denom =
        2.0 * double(p.pooled.tp) + double(p.pooled.fp) + double(p.pooled.fn);
    const double f1 = denom == 0.0 ? 0.0 : 2.0 * double(p.pooled.tp) / denom;
    if (f1 > best_f1) {
      best_f1 = f1;
      best_thr = p.threshold;
    }
  }
  return best_thr;
}

std::vector<double> default_thresholds(Model model, double epsilon) {
  std::vector<double> out;
  switch (model) {
    case Model::gaussian_2d:
    case Model::survival: {
      // 10^-300 .. 10^-5, log-spaced
      const int n = 60;
      for (int i = 0; i < n; ++i) {
        const double e = -300.0 + (300.0 - 5.0) * i / (n - 1);
        out.push_back(std::pow(10.0, e));
      }
      break;
    }
    default: {
      // risk values of 20 log-spaced distances in [0.1 m, 100 m]
      const int n = 20;
      for (int i = 0; i < n; ++i) {
        const double d =
            std::pow(10.0, -1.0 + 3.0 * i / (n - 1));  // 0.1 .. 100
        out.push_back(epsilon / (epsilon + d));
      }
      break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

BenchResult bench(Model model, std::span<const Scenario> scenarios,
                  const RiskConfig& cfg, std::int64_t min_calls) {
  std::vector<std::pair<const AgentState*, const AgentState*>> pairs;
  for (const Scenario& sc : scenarios) {
    for (const AgentState& other : sc.others) {
      pairs.emplace_back(&sc.ego, &other);
    }
  }
  if (pairs.empty()) {
    throw DataError("bench needs at least one (ego, other) pair");
  }

  volatile double sink = 0.0;  // keep calls from being optimized away
  const std::size_t warmup = std::min<std::size_t>(pairs.size(), 256);
  for (std::size_t i = 0; i < warmup; ++i) {
    sink = score(model, *pairs[i].first, *pairs[i].second, cfg);
  }

  std::vector<double> ns;
  ns.reserve(static_cast<std::size_t>(min_calls));
  std::size_t p = 0;
  using clock = std::chrono::steady_clock;
  while (static_cast<std::int64_t>(ns.size()) < min_calls) {
    const auto t0 = clock::now();
    sink = score(model, *pairs[p].first, *pairs[p].second, cfg);
    const auto t1 = clock::now();
    const double dur =
        std::chrono::duration<double, std::nano>(t1 - t0).count();
    ns.push_back(std::max(dur, 1.0));
    p = (p + 1) % pairs.size();
  }
  (void)sink;

  std::sort(ns.begin(), ns.end());
  BenchResult r;
  r.model = model;
  r.pairs = static_cast<std::int64_t>(ns.size());
  r.median_ns = ns[ns.size() / 2];
  r.p95_ns = ns[static_cast<std::size_t>(double(ns.size() - 1) * 0.95)];
  return r;
}

void write_roc_csv(std::ostream& os, std::span<const RocCurve> curves) {
  os << "model,threshold,mean_tpr,std_tpr,mean_fpr,std_fpr\n";
  std::string line;
  for (const RocCurve& c : curves) {
    for (const RocPoint& p : c.points) {
      line.clear();
      line += to_string(c.model);
      line += ',';
      append_number(line, p.threshold);
      line += ',';
      append_number(line, p.mean_tpr);
      line += ',';
      append_number(line, p.std_tpr);
      line += ',';
      append_number(line, p.mean_fpr);
      line += ',';
      append_number(line, p.std_fpr);
      line += '\n';
      os << line;
    }
  }
}

void write_bench_csv(std::ostream& os, std::span<const BenchResult> results) {
  os << "model,median_ns,p95_ns,pairs\n";
  std::string line;
  for (const BenchResult& r : results) {
    line.clear();
    line += to_string(r.model);
    line += ',';
    append_number(line, r.median_ns);
    line += ',';
    append_number(line, r.p95_ns);
    line += ',';
    line += std::to_string(r.pairs);
    line += '\n';
    os << line;
  }
}

std::string auc_summary_json(std::span<const RocCurve> curves) {
  nlohmann::ordered_json j;
  for (const RocCurve& c : curves) {
    j[to_string(c.model)] = auc(c);
  }
  return j.dump(2);
}

}  // namespace risk_sieve
