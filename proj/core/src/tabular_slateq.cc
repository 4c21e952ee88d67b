#include "slateq/tabular_slateq.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "slateq/choice.h"

namespace slateq {
namespace {

void for_each_subset(int n, std::size_t k,
                     const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> comb(k);
  std::iota(comb.begin(), comb.end(), 0);
  const int kk = static_cast<int>(k);
  for (;;) {
    fn(comb);
    int i = kk;
    while (i > 0 && comb[i - 1] == n - kk + i - 1) --i;
    if (i == 0) return;
    ++comb[i - 1];
    for (int j = i; j < kk; ++j) comb[j] = comb[j - 1] + 1;
  }
}

}  // namespace

void TabularSlateMdp::validate() const {
  if (num_items < 1) throw std::invalid_argument("MDP needs at least one item");
  if (slate_size < 1 || slate_size > static_cast<std::size_t>(num_items)) {
    throw std::invalid_argument("slate size must lie in [1, num_items]");
  }
  if (scores.empty() || outcomes.size() != scores.size()) {
    throw std::invalid_argument("MDP tables are empty or inconsistent");
  }
  if (initial_state < 0 || initial_state >= num_states()) {
    throw std::invalid_argument("initial state out of range");
  }
  for (int s = 0; s < num_states(); ++s) {
    if (scores[s].size() != static_cast<std::size_t>(num_items + 1) ||
        outcomes[s].size() != static_cast<std::size_t>(num_items + 1)) {
      throw std::invalid_argument("per-state tables must cover items and null");
    }
    if (!(scores[s].back() > 0.0)) {
      throw std::invalid_argument("null score must be positive");
    }
    for (const auto& o : outcomes[s]) {
      if (o.next_state >= num_states()) {
        throw std::invalid_argument("transition to an unknown state");
      }
      // Acyclicity is checked by requiring strictly increasing indices.
      if (o.next_state >= 0 && o.next_state <= s) {
        throw std::invalid_argument("states must be topologically ordered");
      }
    }
  }
}

double tabular_slate_q(const TabularSlateMdp& mdp, const ItemTable& q, int state,
                       const std::vector<int>& slate) {
  const auto& v = mdp.scores[state];
  const int null_item = mdp.num_items;
  double num = v[null_item] * q[state][null_item];
  double den = v[null_item];
  for (int i : slate) {
    num += v[i] * q[state][i];
    den += v[i];
  }
  return num / den;
}

double tabular_slate_v(const TabularSlateMdp& mdp, const ItemTable& q, int state,
                       std::vector<int>* best_slate) {
  double best = -std::numeric_limits<double>::infinity();
  for_each_subset(mdp.num_items, mdp.slate_size, [&](const std::vector<int>& a) {
    const double value = tabular_slate_q(mdp, q, state, a);
    if (value > best) {
      best = value;
      if (best_slate != nullptr) *best_slate = a;
    }
  });
  return best;
}

ItemTable solve_optimal_item_values(const TabularSlateMdp& mdp) {
  mdp.validate();
  const int n = mdp.num_states();
  ItemTable q(n, std::vector<double>(mdp.num_items + 1, 0.0));
  std::vector<double> v(n, 0.0);
  for (int s = n - 1; s >= 0; --s) {
    for (int i = 0; i <= mdp.num_items; ++i) {
      const auto& o = mdp.outcomes[s][i];
      q[s][i] = o.reward + (o.next_state >= 0 ? v[o.next_state] : 0.0);
    }
    v[s] = tabular_slate_v(mdp, q, s);
  }
  return q;
}

TabularQLearningResult tabular_slateq_learning(const TabularSlateMdp& mdp,
                                               const TabularQLearningParams& params,
                                               Rng& rng) {
  mdp.validate();
  if (!(params.step_size > 0.0 && params.step_size <= 1.0)) {
    throw std::invalid_argument("step size must lie in (0, 1]");
  }
  TabularQLearningResult result;
  result.q.assign(mdp.num_states(), std::vector<double>(mdp.num_items + 1, 0.0));
  std::uniform_int_distribution<int> pick_state(0, mdp.num_states() - 1);
  std::vector<int> slate;
  std::vector<int> items(mdp.num_items);
  std::iota(items.begin(), items.end(), 0);

  while (result.updates < params.max_updates) {
    int s = params.exploring_starts ? pick_state(rng) : mdp.initial_state;
    while (s >= 0 && result.updates < params.max_updates) {
      if (uniform01(rng) < params.epsilon) {
        std::shuffle(items.begin(), items.end(), rng);
        slate.assign(items.begin(), items.begin() + mdp.slate_size);
      } else {
        tabular_slate_v(mdp, result.q, s, &slate);
      }
      ChoiceScores scores;
      for (int i : slate) scores.item_scores.push_back(mdp.scores[s][i]);
      scores.null_score = mdp.scores[s].back();
      const auto choice = sample_choice(conditional_probs(scores), rng);
      const int consumed = choice ? slate[*choice] : mdp.num_items;
      const auto& o = mdp.outcomes[s][consumed];
      const double target =
          o.reward + (o.next_state >= 0 ? tabular_slate_v(mdp, result.q, o.next_state)
                                        : 0.0);
      double& entry = result.q[s][consumed];
      entry += params.step_size * (target - entry);
      ++result.updates;
      s = o.next_state;
    }
  }
  return result;
}

double max_abs_difference(const ItemTable& a, const ItemTable& b) {
  if (a.size() != b.size()) throw std::invalid_argument("table shapes differ");
  double worst = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s) {
    if (a[s].size() != b[s].size()) throw std::invalid_argument("table shapes differ");
    for (std::size_t i = 0; i < a[s].size(); ++i) {
      worst = std::max(worst, std::abs(a[s][i] - b[s][i]));
    }
  }
  return worst;
}

TabularSlateMdp make_tiny_simulator_mdp() {
  DynamicsParams dyn;
  dyn.initial_budget = 10.0;
  dyn.no_click_cost = 3.0;
  const std::vector<Document> docs = {
      {0, 0, 1.0, dyn.doc_length},
      {1, 1, -1.0, dyn.doc_length},
      {2, 0, -0.5, dyn.doc_length},
  };
  const double null_score = 1.0;

  // Discovery pass: breadth-first by decreasing budget, so indices follow a
  // topological order (every event strictly lowers the budget).
  using Key = std::tuple<long long, long long, long long>;
  auto key_of = [](const UserState& u) {
    auto r = [](double x) { return std::llround(x * 1e9); };
    return Key{r(u.budget), r(u.interests[0]), r(u.interests[1])};
  };
  auto cmp = [](const UserState& a, const UserState& b) {
    if (a.budget != b.budget) return a.budget > b.budget;
    return a.interests < b.interests;
  };

  UserState start{{0.4, -0.2}, dyn.initial_budget, true};
  auto step = [&](const UserState& u, int item, double* reward) {
    UserState next = u;
    if (item == static_cast<int>(docs.size())) {
      apply_no_click(next, dyn);
      *reward = 0.0;
      return next;
    }
    const Document& d = docs[item];
    const double bonus = dyn.bonus_coeff * dyn.doc_length * satisfaction(u, d, dyn);
    next.budget -= dyn.doc_length - bonus;
    const double cur = u.interests[d.topic];
    const double sign = cur >= 0.0 ? 1.0 : -1.0;
    next.interests[d.topic] =
        std::clamp(cur + sign * nudge_magnitude(cur, dyn), -1.0, 1.0);
    next.alive = next.budget > 0.0;
    *reward = dyn.click_reward;
    return next;
  };

  std::vector<UserState> states = {start};
  std::map<Key, int> seen{{key_of(start), 0}};
  for (std::size_t idx = 0; idx < states.size(); ++idx) {
    for (int i = 0; i <= static_cast<int>(docs.size()); ++i) {
      double r = 0.0;
      const UserState nx = step(states[idx], i, &r);
      if (nx.alive && !seen.count(key_of(nx))) {
        seen.emplace(key_of(nx), -1);
        states.push_back(nx);
      }
    }
  }
  std::sort(states.begin(), states.end(), cmp);
  seen.clear();
  for (std::size_t i = 0; i < states.size(); ++i) {
    seen[key_of(states[i])] = static_cast<int>(i);
  }

  TabularSlateMdp mdp;
  mdp.num_items = static_cast<int>(docs.size());
  mdp.slate_size = 2;
  mdp.initial_state = seen.at(key_of(start));
  for (const UserState& u : states) {
    std::vector<double> v;
    std::vector<TabularSlateMdp::Outcome> out;
    for (int i = 0; i <= mdp.num_items; ++i) {
      v.push_back(i == mdp.num_items ? null_score
                                     : environment_score(u, docs[i]));
      double r = 0.0;
      const UserState nx = step(u, i, &r);
      out.push_back({r, nx.alive ? seen.at(key_of(nx)) : -1});
    }
    mdp.scores.push_back(std::move(v));
    mdp.outcomes.push_back(std::move(out));
  }
  mdp.validate();
  return mdp;
}

}  // namespace slateq
