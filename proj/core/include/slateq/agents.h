#pragma once

#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slateq/corpus.h"
#include "slateq/environment.h"
#include "slateq/qmodel.h"
#include "slateq/rng.h"
#include "slateq/slate_opt.h"
#include "slateq/user_model.h"

namespace slateq {

enum class AgentKind { kRandom, kMyopic, kSarsa, kQLearning, kFullSlateQ };

// Agent variant. Names follow the usual designations: "RANDOM", "FSQ",
// "MYOP-{T,G,O}S", "SARSA-{T,G,O}S" and "QL-{T,G,O}T-{T,G,O}S", where
// T/G/O stand for top-k, greedy and exact (LP-optimal) slate construction at
// training (xT) or serving (xS) time.
struct AgentConfig {
  AgentKind kind = AgentKind::kSarsa;
  SlateOptimizer train_opt = SlateOptimizer::kExact;  // Q-learning only
  SlateOptimizer serve_opt = SlateOptimizer::kTopK;
  double gamma = 1.0;
  double epsilon = 0.1;

  std::string name() const;
  // Myopic variants get gamma = 0 regardless of `gamma`.
  static AgentConfig from_name(std::string_view name, double gamma = 1.0,
                               double epsilon = 0.1);
  void validate() const;
  bool uses_network() const { return kind != AgentKind::kRandom; }

  bool operator==(const AgentConfig&) const = default;
};

struct QModelParams {
  std::vector<int> hidden = {64, 32};
  double learning_rate = 1e-3;
  int batch_size = 32;
  std::size_t buffer_capacity = 100'000;
  int label_sync_period = 500;  // gradient batches between label syncs (M)
  int update_period = 1;        // environment events per gradient batch
  int min_replay = 500;         // logged transitions before the first batch

  void validate() const;
  bool operator==(const QModelParams&) const = default;
};

// One logged interaction. `next_*` describe the following event of the same
// session and are empty when `terminal`.
struct Transition {
  std::vector<double> interests;
  std::vector<Document> slate;
  std::optional<std::size_t> clicked;
  double reward = 0.0;
  bool terminal = false;
  std::vector<double> next_interests;
  std::vector<Document> next_candidates;
  std::vector<std::size_t> next_slate;  // positions into next_candidates
};

// Bounded FIFO experience store. Safe for several producers and one
// consumer; sampling is uniform with replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition transition);
  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }
  std::vector<Transition> sample(std::size_t n, Rng& rng) const;

 private:
  std::size_t capacity_;
  mutable std::mutex mu_;
  std::vector<Transition> data_;
  std::size_t next_ = 0;
};

class Agent {
 public:
  // Main network gets Glorot initialization from `init_rng`; the label
  // network starts at all-zero weights.
  Agent(AgentConfig config, EnvParams env, const QModelParams& qparams,
        Rng& init_rng);
  // Restores a trained agent (label network = main network).
  Agent(AgentConfig config, EnvParams env, QNetwork main);

  const AgentConfig& config() const { return config_; }
  const EnvParams& env() const { return env_; }
  const QNetwork& main_network() const { return main_; }
  QNetwork& main_network() { return main_; }
  const LabelNetwork& label_network() const { return label_; }
  void sync_label() { label_ = sync_label_network(main_); }

  // Positions into `candidates` in presentation order. With `explore` the
  // agent serves a uniformly random k-subset with probability epsilon;
  // RANDOM always does. `explored` reports which branch was taken.
  std::vector<std::size_t> serve(const UserState& user,
                                 std::span<const Document> candidates,
                                 Rng& rng, bool explore,
                                 bool* explored = nullptr) const;

  // Items scored with the agent's choice model (v) and `net` (q). Ids are
  // candidate positions.
  std::vector<ScoredItem> score_items(std::span<const double> interests,
                                      std::span<const Document> docs,
                                      const QNetwork& net) const;

  // sum over the slate and the null item of P(i | s, A) * Q(s, i), computed
  // from the conditional choice probabilities with Q(s, null) = 0.
  double slate_expectation(std::span<const double> interests,
                           std::span<const Document> slate,
                           const QNetwork& net) const;

  double sarsa_target(const Transition& tr) const;
  double qlearning_target(const Transition& tr, SlateOptimizer opt) const;
  double fsq_target(const Transition& tr) const;
  // Dispatches on the agent kind (myopic = SARSA with gamma 0).
  double td_target(const Transition& tr) const;

  // SlateQ learners train on clicked transitions only; FSQ on every event.
  bool learns_from(const Transition& tr) const;
  // Regression input for a transition's training example.
  Eigen::VectorXd training_features(const Transition& tr) const;

  // One SGD step on the batch; returns the pre-step mean loss.
  double train_batch(std::span<const Transition> batch, double lr);

  double null_score() const { return env_.null_score; }
  double item_score(std::span<const double> interests, const Document& doc) const;

 private:
  std::vector<std::size_t> serve_full_slate(std::span<const double> interests,
                                            std::span<const Document> candidates,
                                            const QNetwork& net,
                                            double* best_value) const;
  double max_full_slate_value(std::span<const double> interests,
                              std::span<const Document> candidates,
                              const QNetwork& net) const;

  AgentConfig config_;
  EnvParams env_;
  QNetwork main_;
  LabelNetwork label_;
};

// Uniform random k-subset of {0..m-1}, in random order.
std::vector<std::size_t> random_slate(std::size_t m, std::size_t k, Rng& rng);

struct Schedule {
  std::int64_t train_steps = 50'000;  // environment events
  std::int64_t eval_every = 4'000;    // environment events between evaluations
  int eval_users = 50;
  int final_eval_users = 1'000;
  double smoothing = 0.999;           // zeta

  void validate() const;
  bool operator==(const Schedule&) const = default;
};

struct CurvePoint {
  std::int64_t step = 0;
  double raw_return = 0.0;
  double smoothed_return = 0.0;
};

struct TrainingCounters {
  std::int64_t env_steps = 0;
  std::int64_t gradient_steps = 0;
  std::int64_t label_syncs = 0;
  std::int64_t transitions_logged = 0;
  std::int64_t served_slates = 0;
  std::int64_t exploratory_slates = 0;
  std::int64_t episodes = 0;
};

struct TrainingResult {
  Agent agent;
  std::vector<CurvePoint> curve;
  TrainingCounters counters;
  double train_seconds = 0.0;
};

TrainingResult run_training(const AgentConfig& config,
                            const QModelParams& qparams, const EnvParams& env,
                            const Schedule& schedule, std::uint64_t seed);

struct Metrics {
  double avg_return = 0.0;
  double avg_quality = 0.0;  // mean quality over all clicked documents
  std::int64_t users = 0;
  std::int64_t clicks = 0;
  std::int64_t events = 0;
};

// Greedy (epsilon = 0) evaluation over `n_users` fresh sessions. User i draws
// from make_rng(seed, i), so agents evaluated with the same seed face the
// same users.
Metrics evaluate(const Agent& agent, int n_users, const EnvParams& env,
                 std::uint64_t seed);

// (value - baseline) / |baseline| * 100.
double percent_improvement(double value, double baseline);

// splitmix64 mix of (seed, salt); used to derive independent seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

// Agent checkpoint: {"agent": "<variant>", "gamma": g, "epsilon": e,
// "network": <network_to_json>}.
std::string agent_to_json(const Agent& agent);
Agent agent_from_json(const std::string& text, const EnvParams& env);

}  // namespace slateq
