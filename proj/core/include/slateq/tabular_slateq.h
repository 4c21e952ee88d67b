#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "slateq/rng.h"
#include "slateq/user_model.h"

namespace slateq {

// Finite, acyclic slate MDP with deterministic per-item transitions. Every
// state offers the same item universe; a slate is any k-subset of it. Item
// index `num_items` is the null item.
struct TabularSlateMdp {
  struct Outcome {
    double reward = 0.0;
    int next_state = -1;  // -1: session over
  };

  int num_items = 0;
  std::size_t slate_size = 1;
  int initial_state = 0;
  // [state][item], item in 0..num_items (last = null).
  std::vector<std::vector<double>> scores;
  std::vector<std::vector<Outcome>> outcomes;

  int num_states() const { return static_cast<int>(scores.size()); }
  void validate() const;
};

using ItemTable = std::vector<std::vector<double>>;  // [state][item incl. null]

// sum_{i in slate + null} P(i | s, slate) * q[s][i].
double tabular_slate_q(const TabularSlateMdp& mdp, const ItemTable& q, int state,
                       const std::vector<int>& slate);
// max over all k-subsets of tabular_slate_q, with the maximizing slate.
double tabular_slate_v(const TabularSlateMdp& mdp, const ItemTable& q, int state,
                       std::vector<int>* best_slate = nullptr);

// Optimal item values Q*(s, i) = r(s, i) + V*(next(s, i)) by backward
// induction over the acyclic state graph.
ItemTable solve_optimal_item_values(const TabularSlateMdp& mdp);

struct TabularQLearningParams {
  double step_size = 0.2;
  double epsilon = 0.2;
  std::int64_t max_updates = 100'000;
  // Episodes start from a uniformly random state so that every state is
  // visited; otherwise from the initial state.
  bool exploring_starts = true;
};

struct TabularQLearningResult {
  ItemTable q;
  std::int64_t updates = 0;
};

// SlateQ Q-learning on the tabular item values: after a consumed item i the
// entry q[s][i] moves toward r + max_A' sum_j P(j | s', A') q[s'][j].
TabularQLearningResult tabular_slateq_learning(const TabularSlateMdp& mdp,
                                               const TabularQLearningParams& params,
                                               Rng& rng);

// Largest |a - b| over entries reachable in the MDP (all states, all items).
double max_abs_difference(const ItemTable& a, const ItemTable& b);

// Small MDP derived from the simulator: two topics, three fixed documents,
// deterministic nudges (polarity follows the sign of the current interest)
// and a budget that allows at most four events. States are the distinct
// (interests, budget) pairs reachable from the initial user.
TabularSlateMdp make_tiny_simulator_mdp();

}  // namespace slateq
