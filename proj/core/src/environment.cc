#include "slateq/environment.h"

#include <stdexcept>

namespace slateq {

void EnvParams::validate() const {
  catalog.validate();
  const double max_abs_quality = catalog.quality_clamp;
  dynamics.validate((1.0 - dynamics.alpha) * 1.0 +
                    dynamics.alpha * max_abs_quality);
  cascade.validate();
  if (!(null_score > 0.0)) throw std::invalid_argument("null_score must be > 0");
  if (!(score_offset >= 1.0)) {
    throw std::invalid_argument("score_offset must be >= 1 so scores stay >= 0");
  }
  if (slate_size < 1) throw std::invalid_argument("slate size k must be >= 1");
  if (num_candidates < slate_size) {
    throw std::invalid_argument("slate size k exceeds the candidate count m");
  }
}

ChoiceScores environment_scores(const EnvParams& env, const UserState& user,
                                std::span<const Document> slate) {
  ChoiceScores scores;
  scores.null_score = env.null_score;
  scores.item_scores.reserve(slate.size());
  for (const Document& doc : slate) {
    scores.item_scores.push_back(environment_score(user, doc, env.score_offset));
  }
  return scores;
}

std::vector<double> environment_choice_probs(const EnvParams& env,
                                             const UserState& user,
                                             std::span<const Document> slate) {
  const ChoiceScores scores = environment_scores(env, user, slate);
  switch (env.choice_model) {
    case ChoiceModel::kConditional:
      return conditional_probs(scores);
    case ChoiceModel::kCascade:
      return cascade_probs(scores, env.cascade, env.cascade_mode);
  }
  throw std::invalid_argument("unknown choice model");
}

StepOutcome respond(const EnvParams& env, UserState& user,
                    std::span<const Document> slate, Rng& rng) {
  const std::vector<double> probs = environment_choice_probs(env, user, slate);
  StepOutcome out;
  out.clicked = sample_choice(probs, rng);
  if (out.clicked) {
    const Document& doc = slate[*out.clicked];
    out.quality = doc.quality;
    out.reward = apply_click(user, doc, env.dynamics, rng);
  } else {
    apply_no_click(user, env.dynamics);
  }
  return out;
}

}  // namespace slateq
