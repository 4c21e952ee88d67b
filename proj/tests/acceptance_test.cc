// Acceptance gate. Runs every criterion at its stated tolerance and prints a
// PASS/FAIL line for each; exits non-zero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "slateq/agents.h"
#include "slateq/config.h"
#include "slateq/experiment.h"
#include "slateq/slate_opt.h"
#include "slateq/tabular_slateq.h"

namespace {

using namespace slateq;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median3(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// Criterion 1 --------------------------------------------------------------
Verdict optimizer_exactness() {
  Rng rng = make_rng(101);
  std::uniform_int_distribution<int> md(4, 12), kd(1, 4);
  std::uniform_real_distribution<double> v(0, 2), q(-3, 5);
  int mismatches = 0;
  double worst = 0.0;
  for (int inst = 0; inst < 1000; ++inst) {
    const int m = md(rng), k = kd(rng);
    std::vector<ScoredItem> items;
    for (int i = 0; i < m; ++i) items.push_back({std::uint64_t(i), v(rng), q(rng)});
    const SlateSolution ex = exact_slate(items, k, 1.0, 0.0);
    const SlateSolution bf = brute_force_slate(items, k, 1.0, 0.0);
    const double gap = std::abs(ex.value - bf.value);
    worst = std::max(worst, gap);
    const std::set<std::uint64_t> a(ex.items.begin(), ex.items.end());
    const std::set<std::uint64_t> b(bf.items.begin(), bf.items.end());
    // Sets may differ only on an exact value tie.
    if (gap > 1e-9 || (a != b && gap > 0.0)) ++mismatches;
  }
  return {mismatches == 0,
          fmt("1000 instances, mismatches=%d, max |exact-brute|=%.2e", mismatches, worst)};
}

// Criterion 2 --------------------------------------------------------------
Verdict fixture_verdicts() {
  bool ok = true;
  const std::vector<ScoredItem> f1 = {{0, 2, 0.8}, {1, 1, 1}, {2, 1, 1}};
  const double ex1 = exact_slate(f1, 2, 1, 0).value;
  const double tk1 = topk_slate(f1, 2, 1, 0).value;
  const double gr1 = greedy_slate(f1, 2, 1, 0).value;
  ok &= std::abs(ex1 - 2.0 / 3.0) <= 1e-12;
  ok &= std::abs(tk1 - 0.65) <= 1e-12 && std::abs(gr1 - 0.65) <= 1e-12;

  const double eps = 0.01;
  const std::vector<ScoredItem> f2 = {{0, 1, eps}, {1, eps, 1}};  // b, a
  const double tk2 = topk_slate(f2, 1, eps, 0).value;
  const double ex2 = exact_slate(f2, 1, eps, 0).value;
  ok &= std::abs(tk2 - eps / (1 + eps)) <= 1e-12 && std::abs(ex2 - 0.5) <= 1e-12;

  const ScoredItem a{0, 1, 10}, b{1, 2, eps};
  const double v0 = slate_value({}, 1, 10);
  const double va = slate_value(std::vector<ScoredItem>{a}, 1, 10);
  const double vb = slate_value(std::vector<ScoredItem>{b}, 1, 10);
  const double vab = slate_value(std::vector<ScoredItem>{a, b}, 1, 10);
  const bool violation = (va - v0) < (vab - vb);
  ok &= violation;
  return {ok, fmt("f1 exact=%.12f topk=%.12f greedy=%.12f; f2 topk=%.6f exact=%.3f; "
                  "V(a)-V()=%.4f < V(ab)-V(b)=%.4f",
                  ex1, tk1, gr1, tk2, ex2, va - v0, vab - vb)};
}

// Criterion 3 --------------------------------------------------------------
Verdict gradient_check() {
  Rng rng = make_rng(103);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0.0;
  for (int n = 0; n < 100; ++n) {
    QNetwork net = QNetwork::glorot_uniform({41, 64, 32, 1}, rng);
    Eigen::VectorXd p = net.flat_parameters();
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) += 0.05 * u(rng);
    net.set_flat_parameters(p);
    Eigen::MatrixXd x(41, 1);
    for (int i = 0; i < 41; ++i) x(i, 0) = u(rng);
    Eigen::VectorXd t(1);
    t << 4.0 * u(rng);
    Eigen::VectorXd g;
    net.loss_and_gradient(x, t, &g);
    Eigen::VectorXd fd(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      Eigen::VectorXd pp = p;
      pp(i) = p(i) + 1e-5;
      net.set_flat_parameters(pp);
      const double up = net.loss_and_gradient(x, t, nullptr);
      pp(i) = p(i) - 1e-5;
      net.set_flat_parameters(pp);
      const double down = net.loss_and_gradient(x, t, nullptr);
      fd(i) = (up - down) / 2e-5;
    }
    worst = std::max(worst, (g - fd).norm() / std::max(g.norm() + fd.norm(), 1e-12));
  }
  return {worst < 1e-4, fmt("100 nets [41,64,32,1], max relative error=%.2e", worst)};
}

// Criterion 4 --------------------------------------------------------------
Verdict prop1_identity() {
  EnvParams env;
  Rng rng = make_rng(104);
  const Agent agent(AgentConfig::from_name("SARSA-TS"), env, QModelParams{}, rng);
  Corpus corpus(env.catalog, env.dynamics.doc_length);
  std::uniform_int_distribution<int> kd(1, 6);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const UserState user = sample_user(env.num_topics(), env.dynamics, rng);
    const auto slate = corpus.sample_candidates(kd(rng), rng);
    const double e = agent.slate_expectation(user.interests, slate, agent.main_network());
    const auto items = agent.score_items(user.interests, slate, agent.main_network());
    worst = std::max(worst, std::abs(e - slate_value(items, agent.null_score(), 0.0)));
  }
  return {worst <= 1e-9, fmt("1000 (state, slate) pairs, max gap=%.2e", worst)};
}

// Criterion 5 --------------------------------------------------------------
Verdict tiny_mdp() {
  const TabularSlateMdp mdp = make_tiny_simulator_mdp();
  const ItemTable optimal = solve_optimal_item_values(mdp);
  Rng rng = make_rng(105);
  TabularQLearningParams p;
  p.max_updates = 100000;
  const TabularQLearningResult r = tabular_slateq_learning(mdp, p, rng);
  const double err = max_abs_difference(r.q, optimal);
  return {err < 1e-3, fmt("%d states, %lld updates, max-norm error=%.2e",
                          mdp.num_states(), static_cast<long long>(r.updates), err)};
}

// Criterion 6 --------------------------------------------------------------
Verdict random_baseline() {
  EnvParams env;
  const Agent random(AgentConfig::from_name("RANDOM"), env, QNetwork{});
  const Metrics m = evaluate(random, 5000, env, final_eval_seed(1));
  const bool ok = m.avg_return >= 156 && m.avg_return <= 163 && m.avg_quality >= -0.63 &&
                  m.avg_quality <= -0.57;
  return {ok, fmt("avg_return=%.3f in [156,163], avg_quality=%.4f in [-0.63,-0.57]",
                  m.avg_return, m.avg_quality)};
}

// Criteria 7-9 share desk-scale suites ----------------------------------------
std::map<std::string, MetricsRow> run_rows(ExperimentConfig cfg) {
  std::map<std::string, MetricsRow> out;
  for (const MetricsRow& r : run_suite(cfg, {}).rows) out[r.agent_name] = r;
  return out;
}

std::map<std::pair<bool, std::uint64_t>, std::map<std::string, MetricsRow>> g_suites;

const std::map<std::string, MetricsRow>& suite(bool cascade, std::uint64_t seed) {
  auto key = std::make_pair(cascade, seed);
  auto it = g_suites.find(key);
  if (it != g_suites.end()) return it->second;
  ExperimentConfig cfg;
  cfg.seed = seed;
  cfg.variants = {"RANDOM", "MYOP-TS", "SARSA-TS"};
  if (cascade) cfg.env.choice_model = ChoiceModel::kCascade;
  return g_suites[key] = run_rows(cfg);
}

Verdict ordering() {
  std::vector<double> r_sarsa, r_myop, r_rand, q_sarsa, q_myop;
  std::string per_seed;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto& rows = suite(false, seed);
    r_sarsa.push_back(rows.at("SARSA-TS").avg_return);
    r_myop.push_back(rows.at("MYOP-TS").avg_return);
    r_rand.push_back(rows.at("RANDOM").avg_return);
    q_sarsa.push_back(rows.at("SARSA-TS").avg_quality);
    q_myop.push_back(rows.at("MYOP-TS").avg_quality);
  }
  const double rs = median3(r_sarsa), rm = median3(r_myop), rr = median3(r_rand);
  const double qs = median3(q_sarsa), qm = median3(q_myop);
  const bool ok = rs > rm && rm > rr && qs > qm;
  return {ok, fmt("median return SARSA-TS=%.3f > MYOP-TS=%.3f > RANDOM=%.3f; "
                  "quality SARSA-TS=%.4f > MYOP-TS=%.4f",
                  rs, rm, rr, qs, qm)};
}

Verdict slateq_vs_fsq() {
  ExperimentConfig cfg;
  cfg.seed = 1;
  cfg.variants = {"RANDOM", "FSQ"};
  const auto fsq_rows = run_rows(cfg);
  const MetricsRow& fsq = fsq_rows.at("FSQ");
  const MetricsRow& sarsa = suite(false, 1).at("SARSA-TS");
  const double ratio = fsq.seconds_per_step / sarsa.seconds_per_step;
  const bool ok = sarsa.avg_return > fsq.avg_return && ratio > 1.5;
  return {ok, fmt("return SARSA-TS=%.3f > FSQ=%.3f; per-step time FSQ/SARSA-TS=%.1fx > 1.5x",
                  sarsa.avg_return, fsq.avg_return, ratio)};
}

Verdict cascade_robustness() {
  std::vector<double> r_sarsa, r_myop;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto& rows = suite(true, seed);
    r_sarsa.push_back(rows.at("SARSA-TS").avg_return);
    r_myop.push_back(rows.at("MYOP-TS").avg_return);
  }
  const double rs = median3(r_sarsa), rm = median3(r_myop);
  return {rs > rm, fmt("cascade env, median return SARSA-TS=%.3f > MYOP-TS=%.3f", rs, rm)};
}

// Criterion 10 -------------------------------------------------------------
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism() {
  ExperimentConfig cfg;
  cfg.seed = 77;
  cfg.variants = {"RANDOM", "MYOP-TS", "SARSA-TS", "QL-OT-GS", "FSQ"};
  cfg.schedule.train_steps = 3000;
  cfg.schedule.eval_every = 1000;
  cfg.schedule.eval_users = 5;
  cfg.schedule.final_eval_users = 50;
  const auto root = std::filesystem::temp_directory_path() / "slateq_acceptance_det";
  std::filesystem::remove_all(root);
  run_suite(cfg, root / "a");
  run_suite(cfg, root / "b");
  const std::string a = slurp(root / "a" / "metrics.csv");
  const std::string b = slurp(root / "b" / "metrics.csv");
  std::filesystem::remove_all(root);
  return {!a.empty() && a == b,
          fmt("5-agent suite run twice, metrics.csv %zu bytes, identical=%s", a.size(),
              a == b ? "yes" : "no")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;  // runtime limit, 0 = none stated
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "optimizer exactness", 5, optimizer_exactness},
      {2, "counterexample fixtures", 0, fixture_verdicts},
      {3, "gradient correctness", 10, gradient_check},
      {4, "decomposition identity", 0, prop1_identity},
      {5, "tiny-MDP convergence", 30, tiny_mdp},
      {6, "random baseline", 120, random_baseline},
      {7, "desk-scale ordering", 0, ordering},
      {8, "SlateQ vs FSQ", 0, slateq_vs_fsq},
      {9, "cascade robustness", 0, cascade_robustness},
      {10, "determinism", 0, determinism},
  };
  int failures = 0;
  double desk_seconds = 0.0;
  for (const Criterion& c : criteria) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (c.id >= 7 && c.id <= 9) desk_seconds += secs;
    bool pass = v.pass;
    std::string timing = fmt("%.1fs", secs);
    if (c.budget_s > 0) {
      timing += fmt(" (limit %.0fs)", c.budget_s);
      if (secs >= c.budget_s) pass = false;
    }
    std::printf("%s [%d] %s: %s; %s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                v.detail.c_str(), timing.c_str());
    std::fflush(stdout);
    failures += !pass;
  }
  const bool desk_ok = desk_seconds < 1800.0;
  std::printf("%s [7-9] desk-scale runtime: %.1fs (limit 1800s)\n",
              desk_ok ? "PASS" : "FAIL", desk_seconds);
  failures += !desk_ok;
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
