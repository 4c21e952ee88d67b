// slateq: train, evaluate and inspect slate recommenders in the simulator.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slateq/agents.h"
#include "slateq/config.h"
#include "slateq/experiment.h"
#include "slateq/rng.h"
#include "slateq/slate_opt.h"

namespace {

using namespace slateq;

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed, bool full_scale) {
  ExperimentConfig cfg = load_config(config_path);
  if (seed) cfg.seed = *seed;
  if (full_scale) cfg.apply_full_scale();
  const SuiteResult suite = run_suite(cfg, out_dir);
  std::printf("# config_hash=%s seed=%llu\n", cfg.hash().c_str(),
              static_cast<unsigned long long>(cfg.seed));
  std::printf("%-12s %12s %12s %10s %10s %12s\n", "agent", "avg_return",
              "avg_quality", "ret_%", "qual_%", "s/step");
  for (const MetricsRow& r : suite.rows) {
    std::printf("%-12s %12.4f %12.5f %10.2f %10.2f %12.3e\n", r.agent_name.c_str(),
                r.avg_return, r.avg_quality, r.pct_return_vs_baseline,
                r.pct_quality_vs_baseline, r.seconds_per_step);
  }
  return 0;
}

int cmd_eval(const std::string& config_path, const std::string& checkpoint,
             std::optional<std::uint64_t> seed, std::optional<int> users) {
  ExperimentConfig cfg = load_config(config_path);
  if (seed) cfg.seed = *seed;
  std::ifstream in(checkpoint);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + checkpoint + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const Agent agent = agent_from_json(ss.str(), cfg.env);
  const int n = users.value_or(cfg.schedule.final_eval_users);
  const Metrics m = evaluate(agent, n, cfg.env, final_eval_seed(cfg.seed));
  std::printf("agent=%s users=%d avg_return=%.4f avg_quality=%.5f clicks=%lld\n",
              agent.config().name().c_str(), n, m.avg_return, m.avg_quality,
              static_cast<long long>(m.clicks));
  return 0;
}

int cmd_opt_bench(int instances, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0);
  std::uniform_int_distribution<int> m_dist(4, 12), k_dist(1, 4);
  std::uniform_real_distribution<double> v_dist(0.0, 2.0), q_dist(-3.0, 5.0);
  int mismatches = 0;
  double t_exact = 0.0, t_brute = 0.0, t_topk = 0.0, t_greedy = 0.0;
  double gap_topk = 0.0, gap_greedy = 0.0;
  using clock = std::chrono::steady_clock;
  auto secs = [](clock::time_point a, clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
  };
  for (int n = 0; n < instances; ++n) {
    const int m = m_dist(rng);
    const int k = std::min(k_dist(rng), m);
    std::vector<ScoredItem> items(m);
    for (int i = 0; i < m; ++i) {
      items[i] = {static_cast<std::uint64_t>(i), v_dist(rng), q_dist(rng)};
    }
    const double null_v = 0.5 + v_dist(rng);
    auto t0 = clock::now();
    const SlateSolution ex = exact_slate(items, k, null_v, 0.0);
    auto t1 = clock::now();
    const SlateSolution bf = brute_force_slate(items, k, null_v, 0.0);
    auto t2 = clock::now();
    const SlateSolution tk = topk_slate(items, k, null_v, 0.0);
    auto t3 = clock::now();
    const SlateSolution gr = greedy_slate(items, k, null_v, 0.0);
    auto t4 = clock::now();
    t_exact += secs(t0, t1);
    t_brute += secs(t1, t2);
    t_topk += secs(t2, t3);
    t_greedy += secs(t3, t4);
    if (std::abs(ex.value - bf.value) > 1e-9) ++mismatches;
    gap_topk += ex.value - tk.value;
    gap_greedy += ex.value - gr.value;
  }
  const double per = 1e6 / instances;
  std::printf("instances=%d mismatches=%d\n", instances, mismatches);
  std::printf("mean_us exact=%.3f brute_force=%.3f top_k=%.3f greedy=%.3f\n",
              t_exact * per, t_brute * per, t_topk * per, t_greedy * per);
  std::printf("mean_gap_to_exact top_k=%.6f greedy=%.6f\n", gap_topk / instances,
              gap_greedy / instances);
  return mismatches == 0 ? 0 : 1;
}

std::string ids(const SlateSolution& s, const std::vector<std::string>& names) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.items.size(); ++i) {
    if (i) out += ",";
    out += names[s.items[i]];
  }
  return out + "}";
}

void report(const char* label, const SlateSolution& s,
            const std::vector<std::string>& names) {
  std::printf("  %-7s %-9s value=%.12f\n", label, ids(s, names).c_str(), s.value);
}

int cmd_fixtures() {
  {
    std::printf("fixture 1: null(v=1,q=0) a(2,0.8) b1(1,1) b2(1,1), k=2\n");
    const std::vector<std::string> names = {"a", "b1", "b2"};
    const std::vector<ScoredItem> items = {{0, 2, 0.8}, {1, 1, 1}, {2, 1, 1}};
    const SlateSolution ex = exact_slate(items, 2, 1, 0);
    const SlateSolution tk = topk_slate(items, 2, 1, 0);
    const SlateSolution gr = greedy_slate(items, 2, 1, 0);
    report("exact", ex, names);
    report("top_k", tk, names);
    report("greedy", gr, names);
    std::printf("  verdict: heuristics suboptimal = %s\n",
                (tk.value < ex.value && gr.value < ex.value) ? "yes" : "no");
  }
  const double eps = 0.01;
  {
    std::printf("fixture 2: null(v=eps,q=0) a(eps,1) b(1,eps), k=1, eps=%g\n", eps);
    // b takes the smaller id so the v*q tie resolves toward b.
    const std::vector<std::string> names = {"b", "a"};
    const std::vector<ScoredItem> items = {{0, 1, eps}, {1, eps, 1}};
    const SlateSolution ex = exact_slate(items, 1, eps, 0);
    const SlateSolution tk = topk_slate(items, 1, eps, 0);
    report("exact", ex, names);
    report("top_k", tk, names);
    std::printf("  verdict: ratio top_k/exact = %.6f\n", tk.value / ex.value);
  }
  {
    std::printf("fixture 3: null(v=1,q=10) a(1,10) b(2,eps), eps=%g\n", eps);
    const std::vector<ScoredItem> a = {{0, 1, 10}};
    const std::vector<ScoredItem> b = {{1, 2, eps}};
    const std::vector<ScoredItem> ab = {{0, 1, 10}, {1, 2, eps}};
    const double v0 = slate_value({}, 1, 10);
    const double va = slate_value(a, 1, 10);
    const double vb = slate_value(b, 1, 10);
    const double vab = slate_value(ab, 1, 10);
    std::printf("  V({})=%.12f V({a})=%.12f V({b})=%.12f V({a,b})=%.12f\n", v0, va,
                vb, vab);
    std::printf("  verdict: V({a})-V({}) = %.6f < V({a,b})-V({b}) = %.6f : %s\n",
                va - v0, vab - vb, (va - v0 < vab - vb) ? "not submodular" : "holds");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slate recommendation with decomposed Q-learning"};
  app.require_subcommand(1);

  std::string config_path, out_dir, checkpoint;
  std::optional<std::uint64_t> seed;
  std::optional<int> users;
  bool full_scale = false;
  int instances = 1000;
  std::uint64_t bench_seed = 1;

  auto* run = app.add_subcommand("run", "Train every configured agent and evaluate it");
  run->add_option("config", config_path, "Experiment config file")->required();
  run->add_option("--out", out_dir, "Directory for metrics, curves and checkpoints");
  run->add_option("--seed", seed, "Override the config seed");
  run->add_flag("--paper-scale", full_scale, "300K training events, 5000 eval users");

  auto* eval = app.add_subcommand("eval", "Evaluate a saved agent checkpoint");
  eval->add_option("config", config_path, "Experiment config file")->required();
  eval->add_option("checkpoint", checkpoint, "Checkpoint written by run")->required();
  eval->add_option("--seed", seed, "Override the config seed");
  eval->add_option("--users", users, "Number of evaluation users");

  auto* bench = app.add_subcommand("opt-bench", "Check and time the slate optimizers");
  bench->add_option("--instances", instances, "Random instances")
      ->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_seed, "Instance seed");

  auto* fixtures = app.add_subcommand("fixtures", "Print the counterexample verdicts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() != 0) std::cerr << app.help();
    return app.exit(e);
  }

  try {
    if (*run) return cmd_run(config_path, out_dir, seed, full_scale);
    if (*eval) return cmd_eval(config_path, checkpoint, seed, users);
    if (*bench) return cmd_opt_bench(instances, bench_seed);
    if (*fixtures) return cmd_fixtures();
  } catch (const std::exception& e) {
    std::cerr << "slateq: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
