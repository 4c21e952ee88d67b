#pragma once

#include <vector>

#include "slateq/corpus.h"
#include "slateq/rng.h"

namespace slateq {

// How the interest change on consumption is sized.
//  kEntrenchment: |delta| = y * (1 - |I_t|), so neutral interests move most.
//  kLiteral:      delta = (-y * |I_t| + y) * (-I_t), applied with the same
//                 random polarity.
enum class NudgeRule { kEntrenchment, kLiteral };

struct DynamicsParams {
  double initial_budget = 200.0;
  double doc_length = 4.0;
  double no_click_cost = 0.5;
  double bonus_coeff = 0.9 / 3.4;
  double alpha = 1.0;           // satisfaction = (1-alpha)*interest + alpha*quality
  double nudge_fraction = 0.3;  // y
  double click_reward = 4.0;
  NudgeRule nudge_rule = NudgeRule::kEntrenchment;

  // `max_abs_satisfaction` bounds |S| (the quality clamp when alpha = 1);
  // the engagement bonus must stay strictly below the document length.
  void validate(double max_abs_satisfaction) const;

  bool operator==(const DynamicsParams&) const = default;
};

struct UserState {
  std::vector<double> interests;  // each in [-1, 1]
  double budget = 0.0;
  bool alive = false;
};

UserState sample_user(int num_topics, const DynamicsParams& params, Rng& rng);

double interest(const UserState& user, const Document& doc);
double satisfaction(const UserState& user, const Document& doc,
                    const DynamicsParams& params);

// Size of the interest move for current interest `current`.
double nudge_magnitude(double current, const DynamicsParams& params);

// Consumes `doc`: charges the budget net of the engagement bonus, nudges the
// interest in the document's topic and returns the click reward.
// Throws std::logic_error on a terminated user.
double apply_click(UserState& user, const Document& doc,
                   const DynamicsParams& params, Rng& rng);

// Charges the no-click cost. Throws std::logic_error on a terminated user.
void apply_no_click(UserState& user, const DynamicsParams& params);

}  // namespace slateq
