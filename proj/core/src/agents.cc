#include "slateq/agents.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "slateq/choice.h"

namespace slateq {
namespace {

char optimizer_letter(SlateOptimizer opt) {
  switch (opt) {
    case SlateOptimizer::kTopK: return 'T';
    case SlateOptimizer::kGreedy: return 'G';
    case SlateOptimizer::kExact: return 'O';
    case SlateOptimizer::kBruteForce: return 'O';
  }
  return '?';
}

SlateOptimizer optimizer_from_letter(char c, std::string_view name) {
  switch (c) {
    case 'T': return SlateOptimizer::kTopK;
    case 'G': return SlateOptimizer::kGreedy;
    case 'O': return SlateOptimizer::kExact;
    default:
      throw std::invalid_argument("unknown agent variant '" + std::string(name) +
                                  "'");
  }
}

// Parses "xS" / "xT" suffix tokens.
SlateOptimizer parse_token(std::string_view token, char role,
                           std::string_view name) {
  if (token.size() != 2 || token[1] != role) {
    throw std::invalid_argument("unknown agent variant '" + std::string(name) +
                                "'");
  }
  return optimizer_from_letter(token[0], name);
}

std::vector<std::string_view> split_dash(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find('-', start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Calls fn(indices) for every k-combination of {0..m-1} in lexicographic
// order.
template <typename Fn>
void for_each_combination(std::size_t m, std::size_t k, Fn fn) {
  std::vector<std::size_t> comb(k);
  std::iota(comb.begin(), comb.end(), 0);
  for (;;) {
    fn(comb);
    std::size_t i = k;
    while (i > 0 && comb[i - 1] == m - k + i - 1) --i;
    if (i == 0) return;
    ++comb[i - 1];
    for (std::size_t j = i; j < k; ++j) comb[j] = comb[j - 1] + 1;
  }
}

constexpr std::size_t kMaxFullSlates = 1'000'000;

}  // namespace

// ---------------------------------------------------------------------------
// AgentConfig

std::string AgentConfig::name() const {
  switch (kind) {
    case AgentKind::kRandom: return "RANDOM";
    case AgentKind::kFullSlateQ: return "FSQ";
    case AgentKind::kMyopic:
      return std::string("MYOP-") + optimizer_letter(serve_opt) + "S";
    case AgentKind::kSarsa:
      return std::string("SARSA-") + optimizer_letter(serve_opt) + "S";
    case AgentKind::kQLearning:
      return std::string("QL-") + optimizer_letter(train_opt) + "T-" +
             optimizer_letter(serve_opt) + "S";
  }
  return "UNKNOWN";
}

AgentConfig AgentConfig::from_name(std::string_view name, double gamma,
                                   double epsilon) {
  AgentConfig cfg;
  cfg.gamma = gamma;
  cfg.epsilon = epsilon;
  const auto parts = split_dash(name);
  if (name == "RANDOM") {
    cfg.kind = AgentKind::kRandom;
  } else if (name == "FSQ") {
    cfg.kind = AgentKind::kFullSlateQ;
  } else if (parts.size() == 2 && parts[0] == "MYOP") {
    cfg.kind = AgentKind::kMyopic;
    cfg.serve_opt = parse_token(parts[1], 'S', name);
    cfg.gamma = 0.0;
  } else if (parts.size() == 2 && parts[0] == "SARSA") {
    cfg.kind = AgentKind::kSarsa;
    cfg.serve_opt = parse_token(parts[1], 'S', name);
  } else if (parts.size() == 3 && parts[0] == "QL") {
    cfg.kind = AgentKind::kQLearning;
    cfg.train_opt = parse_token(parts[1], 'T', name);
    cfg.serve_opt = parse_token(parts[2], 'S', name);
  } else {
    throw std::invalid_argument("unknown agent variant '" + std::string(name) +
                                "'");
  }
  cfg.validate();
  return cfg;
}

void AgentConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("gamma must lie in [0, 1]");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("epsilon must lie in [0, 1]");
  }
  if (kind == AgentKind::kMyopic && gamma != 0.0) {
    throw std::invalid_argument("myopic agents require gamma = 0");
  }
}

void QModelParams::validate() const {
  for (int h : hidden) {
    if (h < 1) throw std::invalid_argument("hidden layer widths must be >= 1");
  }
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (buffer_capacity < 1) throw std::invalid_argument("buffer_capacity must be >= 1");
  if (label_sync_period < 1) throw std::invalid_argument("label_sync_period must be >= 1");
  if (update_period < 1) throw std::invalid_argument("update_period must be >= 1");
  if (min_replay < 0) throw std::invalid_argument("min_replay must be >= 0");
}

void Schedule::validate() const {
  if (train_steps < 0) throw std::invalid_argument("train_steps must be >= 0");
  if (eval_every < 1) throw std::invalid_argument("eval_every must be >= 1");
  if (eval_users < 1) throw std::invalid_argument("eval_users must be >= 1");
  if (final_eval_users < 1) throw std::invalid_argument("final_eval_users must be >= 1");
  if (!(smoothing >= 0.0 && smoothing < 1.0)) {
    throw std::invalid_argument("smoothing must lie in [0, 1)");
  }
}

// ---------------------------------------------------------------------------
// ReplayBuffer

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("replay capacity must be >= 1");
  data_.reserve(std::min<std::size_t>(capacity_, 1 << 16));
}

void ReplayBuffer::push(Transition transition) {
  std::lock_guard<std::mutex> lock(mu_);
  if (data_.size() < capacity_) {
    data_.push_back(std::move(transition));
  } else {
    data_[next_] = std::move(transition);
  }
  next_ = (next_ + 1) % capacity_;
}

std::size_t ReplayBuffer::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return data_.size();
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (data_.empty()) throw std::logic_error("sampling from an empty replay buffer");
  std::uniform_int_distribution<std::size_t> dist(0, data_.size() - 1);
  std::vector<Transition> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(data_[dist(rng)]);
  return out;
}

// ---------------------------------------------------------------------------
// Agent

namespace {

std::vector<int> network_dims(const AgentConfig& config, const EnvParams& env,
                              const QModelParams& qparams) {
  std::vector<int> dims;
  dims.push_back(config.kind == AgentKind::kFullSlateQ
                     ? slate_feature_dim(env.num_topics(), env.slate_size)
                     : item_feature_dim(env.num_topics()));
  dims.insert(dims.end(), qparams.hidden.begin(), qparams.hidden.end());
  dims.push_back(1);
  return dims;
}

}  // namespace

Agent::Agent(AgentConfig config, EnvParams env, const QModelParams& qparams,
             Rng& init_rng)
    : config_(std::move(config)), env_(std::move(env)) {
  config_.validate();
  env_.validate();
  qparams.validate();
  if (config_.uses_network()) {
    const std::vector<int> dims = network_dims(config_, env_, qparams);
    main_ = QNetwork::glorot_uniform(dims, init_rng);
    label_ = LabelNetwork(QNetwork(dims));
  }
}

Agent::Agent(AgentConfig config, EnvParams env, QNetwork main)
    : config_(std::move(config)), env_(std::move(env)), main_(std::move(main)) {
  config_.validate();
  env_.validate();
  if (config_.uses_network()) {
    const int expected = config_.kind == AgentKind::kFullSlateQ
                             ? slate_feature_dim(env_.num_topics(), env_.slate_size)
                             : item_feature_dim(env_.num_topics());
    if (main_.input_dim() != expected) {
      throw std::invalid_argument("network input width " +
                                  std::to_string(main_.input_dim()) +
                                  " does not match the environment (" +
                                  std::to_string(expected) + ")");
    }
  }
  label_ = sync_label_network(main_);
}

double Agent::item_score(std::span<const double> interests,
                         const Document& doc) const {
  return env_.score_offset + interests[doc.topic];
}

std::vector<ScoredItem> Agent::score_items(std::span<const double> interests,
                                           std::span<const Document> docs,
                                           const QNetwork& net) const {
  const int dim = item_feature_dim(static_cast<int>(interests.size()));
  Eigen::MatrixXd xs(dim, static_cast<Eigen::Index>(docs.size()));
  for (std::size_t i = 0; i < docs.size(); ++i) {
    featurize_into(interests, docs[i], xs.col(static_cast<Eigen::Index>(i)));
  }
  const Eigen::VectorXd q = net.predict_batch(xs);
  std::vector<ScoredItem> items(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    items[i] = ScoredItem{i, item_score(interests, docs[i]),
                          q(static_cast<Eigen::Index>(i))};
  }
  return items;
}

double Agent::slate_expectation(std::span<const double> interests,
                                std::span<const Document> slate,
                                const QNetwork& net) const {
  if (slate.empty()) return 0.0;
  const std::vector<ScoredItem> items = score_items(interests, slate, net);
  ChoiceScores scores;
  scores.null_score = env_.null_score;
  for (const ScoredItem& it : items) scores.item_scores.push_back(it.v);
  const std::vector<double> probs = conditional_probs(scores);
  double total = 0.0;  // null item contributes P(null) * 0
  for (std::size_t j = 0; j < items.size(); ++j) total += probs[j] * items[j].q;
  return total;
}

std::vector<std::size_t> random_slate(std::size_t m, std::size_t k, Rng& rng) {
  if (k > m) throw std::invalid_argument("slate size exceeds candidate count");
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> dist(i, m - 1);
    std::swap(idx[i], idx[dist(rng)]);
  }
  idx.resize(k);
  return idx;
}

std::vector<std::size_t> Agent::serve_full_slate(
    std::span<const double> interests, std::span<const Document> candidates,
    const QNetwork& net, double* best_value) const {
  const std::size_t m = candidates.size();
  const std::size_t k = static_cast<std::size_t>(env_.slate_size);
  const std::size_t total = binomial(m, k);
  if (total > kMaxFullSlates) {
    throw std::length_error("full-slate enumeration over " +
                            std::to_string(total) + " slates exceeds budget");
  }
  const int t = static_cast<int>(interests.size());
  Eigen::MatrixXd xs(slate_feature_dim(t, static_cast<int>(k)),
                     static_cast<Eigen::Index>(total));
  std::vector<std::vector<std::size_t>> slates;
  slates.reserve(total);
  std::vector<const Document*> docs(k);
  for_each_combination(m, k, [&](const std::vector<std::size_t>& comb) {
    for (std::size_t j = 0; j < k; ++j) docs[j] = &candidates[comb[j]];
    featurize_slate_into(interests, docs,
                         xs.col(static_cast<Eigen::Index>(slates.size())));
    slates.push_back(comb);
  });
  const Eigen::VectorXd q = net.predict_batch(xs);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < q.size(); ++i) {
    if (q(i) > q(best)) best = i;
  }
  if (best_value != nullptr) *best_value = q(best);
  return slates[static_cast<std::size_t>(best)];
}

double Agent::max_full_slate_value(std::span<const double> interests,
                                   std::span<const Document> candidates,
                                   const QNetwork& net) const {
  double best = 0.0;
  serve_full_slate(interests, candidates, net, &best);
  return best;
}

std::vector<std::size_t> Agent::serve(const UserState& user,
                                      std::span<const Document> candidates,
                                      Rng& rng, bool explore,
                                      bool* explored) const {
  const std::size_t k = static_cast<std::size_t>(env_.slate_size);
  if (candidates.size() < k) {
    throw std::invalid_argument("need at least k candidates to serve a slate");
  }
  bool random = config_.kind == AgentKind::kRandom;
  if (!random && explore && config_.epsilon > 0.0) {
    random = uniform01(rng) < config_.epsilon;
  }
  if (explored != nullptr) *explored = random;
  if (random) return random_slate(candidates.size(), k, rng);

  const std::span<const double> interests(user.interests);
  if (config_.kind == AgentKind::kFullSlateQ) {
    return serve_full_slate(interests, candidates, main_, nullptr);
  }
  const std::vector<ScoredItem> items = score_items(interests, candidates, main_);
  const SlateSolution sol =
      optimize_slate(config_.serve_opt, items, k, env_.null_score, 0.0);
  return {sol.items.begin(), sol.items.end()};
}

double Agent::sarsa_target(const Transition& tr) const {
  if (tr.terminal || config_.gamma == 0.0) return tr.reward;
  if (tr.next_slate.empty()) {
    throw std::invalid_argument("non-terminal transition without a next slate");
  }
  std::vector<Document> next;
  next.reserve(tr.next_slate.size());
  for (std::size_t pos : tr.next_slate) next.push_back(tr.next_candidates.at(pos));
  return tr.reward + config_.gamma * slate_expectation(tr.next_interests, next,
                                                       label_.network());
}

double Agent::qlearning_target(const Transition& tr, SlateOptimizer opt) const {
  if (tr.terminal || config_.gamma == 0.0) return tr.reward;
  if (tr.next_candidates.empty()) {
    throw std::invalid_argument("non-terminal transition without next candidates");
  }
  const std::vector<ScoredItem> items =
      score_items(tr.next_interests, tr.next_candidates, label_.network());
  const SlateSolution sol =
      optimize_slate(opt, items, static_cast<std::size_t>(env_.slate_size),
                     env_.null_score, 0.0);
  return tr.reward + config_.gamma * sol.value;
}

double Agent::fsq_target(const Transition& tr) const {
  if (tr.terminal || config_.gamma == 0.0) return tr.reward;
  if (tr.next_candidates.empty()) {
    throw std::invalid_argument("non-terminal transition without next candidates");
  }
  return tr.reward + config_.gamma * max_full_slate_value(tr.next_interests,
                                                          tr.next_candidates,
                                                          label_.network());
}

double Agent::td_target(const Transition& tr) const {
  switch (config_.kind) {
    case AgentKind::kMyopic:
    case AgentKind::kSarsa:
      return sarsa_target(tr);
    case AgentKind::kQLearning:
      return qlearning_target(tr, config_.train_opt);
    case AgentKind::kFullSlateQ:
      return fsq_target(tr);
    case AgentKind::kRandom:
      break;
  }
  throw std::logic_error("agent " + config_.name() + " has no TD target");
}

bool Agent::learns_from(const Transition& tr) const {
  switch (config_.kind) {
    case AgentKind::kRandom: return false;
    case AgentKind::kFullSlateQ: return true;
    default: return tr.clicked.has_value();
  }
}

Eigen::VectorXd Agent::training_features(const Transition& tr) const {
  if (config_.kind == AgentKind::kFullSlateQ) {
    // Canonical order (by id) so the same set always maps to the same input.
    std::vector<const Document*> docs;
    for (const Document& d : tr.slate) docs.push_back(&d);
    std::sort(docs.begin(), docs.end(),
              [](const Document* a, const Document* b) { return a->id < b->id; });
    Eigen::VectorXd x(slate_feature_dim(static_cast<int>(tr.interests.size()),
                                        static_cast<int>(docs.size())));
    featurize_slate_into(tr.interests, docs, x);
    return x;
  }
  if (!tr.clicked) {
    throw std::invalid_argument("item-wise training needs a clicked transition");
  }
  return featurize(tr.interests, tr.slate.at(*tr.clicked));
}

double Agent::train_batch(std::span<const Transition> batch, double lr) {
  if (!config_.uses_network()) return 0.0;
  if (batch.empty()) throw std::invalid_argument("empty training batch");
  Eigen::MatrixXd xs(main_.input_dim(), static_cast<Eigen::Index>(batch.size()));
  Eigen::VectorXd targets(static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    xs.col(col) = training_features(batch[i]);
    targets(col) = td_target(batch[i]);
  }
  return main_.sgd_batch(xs, targets, lr);
}

// ---------------------------------------------------------------------------
// Training and evaluation

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double percent_improvement(double value, double baseline) {
  if (baseline == 0.0) {
    return value == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  }
  return (value - baseline) / std::abs(baseline) * 100.0;
}

Metrics evaluate(const Agent& agent, int n_users, const EnvParams& env,
                 std::uint64_t seed) {
  if (n_users < 1) throw std::invalid_argument("evaluation needs >= 1 user");
  env.validate();
  Metrics m;
  double total_return = 0.0;
  double total_quality = 0.0;
  for (int u = 0; u < n_users; ++u) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(u));
    Corpus corpus(env.catalog, env.dynamics.doc_length);
    UserState user = sample_user(env.num_topics(), env.dynamics, rng);
    std::vector<Document> slate(static_cast<std::size_t>(env.slate_size));
    while (user.alive) {
      const std::vector<Document> candidates =
          corpus.sample_candidates(env.num_candidates, rng);
      const std::vector<std::size_t> picks =
          agent.serve(user, candidates, rng, /*explore=*/false);
      for (std::size_t j = 0; j < picks.size(); ++j) slate[j] = candidates[picks[j]];
      const StepOutcome out = respond(env, user, slate, rng);
      ++m.events;
      total_return += out.reward;
      if (out.clicked) {
        ++m.clicks;
        total_quality += out.quality;
      }
    }
  }
  m.users = n_users;
  m.avg_return = total_return / n_users;
  m.avg_quality = m.clicks > 0 ? total_quality / static_cast<double>(m.clicks) : 0.0;
  return m;
}

TrainingResult run_training(const AgentConfig& config,
                            const QModelParams& qparams, const EnvParams& env,
                            const Schedule& schedule, std::uint64_t seed) {
  schedule.validate();
  Rng init_rng = make_rng(seed, 1);
  Rng rng = make_rng(seed, 2);
  Rng replay_rng = make_rng(seed, 3);
  TrainingResult result{Agent(config, env, qparams, init_rng), {}, {}, 0.0};
  Agent& agent = result.agent;
  TrainingCounters& counters = result.counters;
  ReplayBuffer buffer(qparams.buffer_capacity);
  Corpus corpus(env.catalog, env.dynamics.doc_length);
  const bool trains = config.uses_network();

  double smoothed_num = 0.0;
  double smoothed_den = 0.0;
  std::int64_t eval_index = 0;
  auto run_eval = [&]() {
    const Metrics m = evaluate(agent, schedule.eval_users, env,
                               derive_seed(seed, 1000 + eval_index++));
    smoothed_num = schedule.smoothing * smoothed_num + m.avg_return;
    smoothed_den = schedule.smoothing * smoothed_den + 1.0;
    result.curve.push_back(
        {counters.env_steps, m.avg_return, smoothed_num / smoothed_den});
  };

  const auto start = std::chrono::steady_clock::now();
  std::vector<Document> slate(static_cast<std::size_t>(env.slate_size));
  while (counters.env_steps < schedule.train_steps) {
    UserState user = sample_user(env.num_topics(), env.dynamics, rng);
    ++counters.episodes;
    std::optional<Transition> pending;
    while (user.alive && counters.env_steps < schedule.train_steps) {
      std::vector<Document> candidates =
          corpus.sample_candidates(env.num_candidates, rng);
      bool explored = false;
      const std::vector<std::size_t> picks =
          agent.serve(user, candidates, rng, /*explore=*/true, &explored);
      ++counters.served_slates;
      if (explored) ++counters.exploratory_slates;
      for (std::size_t j = 0; j < picks.size(); ++j) slate[j] = candidates[picks[j]];

      if (pending) {
        pending->next_interests = user.interests;
        pending->next_candidates = candidates;
        pending->next_slate = picks;
        if (agent.learns_from(*pending)) {
          buffer.push(std::move(*pending));
          ++counters.transitions_logged;
        }
        pending.reset();
      }

      Transition tr;
      tr.interests = user.interests;
      tr.slate = slate;
      const StepOutcome out = respond(env, user, slate, rng);
      ++counters.env_steps;
      tr.clicked = out.clicked;
      tr.reward = out.reward;
      tr.terminal = !user.alive;
      if (tr.terminal) {
        if (agent.learns_from(tr)) {
          buffer.push(std::move(tr));
          ++counters.transitions_logged;
        }
      } else {
        pending = std::move(tr);
      }

      if (trains && counters.env_steps % qparams.update_period == 0 &&
          buffer.size() >= static_cast<std::size_t>(
                               std::max(qparams.min_replay, 1))) {
        const std::vector<Transition> batch = buffer.sample(
            static_cast<std::size_t>(qparams.batch_size), replay_rng);
        agent.train_batch(batch, qparams.learning_rate);
        ++counters.gradient_steps;
        if (counters.gradient_steps % qparams.label_sync_period == 0) {
          agent.sync_label();
          ++counters.label_syncs;
        }
      }
      if (counters.env_steps % schedule.eval_every == 0) run_eval();
    }
  }
  result.train_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

// ---------------------------------------------------------------------------
// Checkpoints

std::string agent_to_json(const Agent& agent) {
  nlohmann::json j;
  j["agent"] = agent.config().name();
  j["gamma"] = agent.config().gamma;
  j["epsilon"] = agent.config().epsilon;
  if (agent.config().uses_network()) {
    j["network"] = nlohmann::json::parse(network_to_json(agent.main_network()));
  } else {
    j["network"] = nullptr;
  }
  return j.dump();
}

Agent agent_from_json(const std::string& text, const EnvParams& env) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed agent checkpoint: ") +
                             e.what());
  }
  if (!j.contains("agent")) throw std::runtime_error("checkpoint lacks an agent name");
  AgentConfig cfg = AgentConfig::from_name(j.at("agent").get<std::string>(),
                                           j.value("gamma", 1.0),
                                           j.value("epsilon", 0.1));
  QNetwork net;
  if (cfg.uses_network()) {
    if (!j.contains("network") || j.at("network").is_null()) {
      throw std::runtime_error("checkpoint lacks network weights");
    }
    net = network_from_json(j.at("network").dump());
  }
  return Agent(std::move(cfg), env, std::move(net));
}

}  // namespace slateq
