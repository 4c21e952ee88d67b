#include "slateq/user_model.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace slateq {

void DynamicsParams::validate(double max_abs_satisfaction) const {
  if (!(initial_budget > 0.0)) throw std::invalid_argument("initial_budget must be > 0");
  if (!(doc_length > 0.0)) throw std::invalid_argument("doc_length must be > 0");
  if (!(no_click_cost > 0.0)) throw std::invalid_argument("no_click_cost must be > 0");
  if (!(bonus_coeff >= 0.0)) throw std::invalid_argument("bonus_coeff must be >= 0");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  if (!(nudge_fraction >= 0.0 && nudge_fraction <= 1.0)) {
    throw std::invalid_argument("nudge_fraction must lie in [0, 1]");
  }
  if (!(bonus_coeff * doc_length * max_abs_satisfaction < doc_length)) {
    throw std::invalid_argument(
        "engagement bonus can reach the document length; sessions might not "
        "terminate (bonus_coeff * |S|max = " +
        std::to_string(bonus_coeff * max_abs_satisfaction) + ")");
  }
}

UserState sample_user(int num_topics, const DynamicsParams& params, Rng& rng) {
  if (num_topics < 1) throw std::invalid_argument("num_topics must be >= 1");
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  UserState user;
  user.interests.resize(num_topics);
  for (double& x : user.interests) x = dist(rng);
  user.budget = params.initial_budget;
  user.alive = true;
  return user;
}

double interest(const UserState& user, const Document& doc) {
  return user.interests.at(doc.topic);
}

double satisfaction(const UserState& user, const Document& doc,
                    const DynamicsParams& params) {
  return (1.0 - params.alpha) * interest(user, doc) + params.alpha * doc.quality;
}

double nudge_magnitude(double current, const DynamicsParams& params) {
  const double y = params.nudge_fraction;
  switch (params.nudge_rule) {
    case NudgeRule::kEntrenchment:
      return y * (1.0 - std::abs(current));
    case NudgeRule::kLiteral:
      return (-y * std::abs(current) + y) * -current;
  }
  return 0.0;
}

double apply_click(UserState& user, const Document& doc,
                   const DynamicsParams& params, Rng& rng) {
  if (!user.alive) throw std::logic_error("apply_click on a terminated user");
  const double bonus =
      params.bonus_coeff * doc.length * satisfaction(user, doc, params);
  user.budget -= doc.length - bonus;

  // Polarity uses the interest before the update.
  double& it = user.interests.at(doc.topic);
  const double delta = nudge_magnitude(it, params);
  const double p_positive = (it + 1.0) / 2.0;
  if (uniform01(rng) < p_positive) {
    it += delta;
  } else {
    it -= delta;
  }
  it = std::clamp(it, -1.0, 1.0);

  user.alive = user.budget > 0.0;
  return params.click_reward;
}

void apply_no_click(UserState& user, const DynamicsParams& params) {
  if (!user.alive) throw std::logic_error("apply_no_click on a terminated user");
  user.budget -= params.no_click_cost;
  user.alive = user.budget > 0.0;
}

}  // namespace slateq
