#pragma once

#include <optional>
#include <span>
#include <vector>

#include "slateq/choice.h"
#include "slateq/corpus.h"
#include "slateq/rng.h"
#include "slateq/user_model.h"

namespace slateq {

// Everything that defines the simulated recommender environment.
struct EnvParams {
  TopicCatalog catalog = TopicCatalog::make_default();
  DynamicsParams dynamics;
  ChoiceModel choice_model = ChoiceModel::kConditional;
  CascadeParams cascade;
  CascadeMode cascade_mode = CascadeMode::kSequential;
  double null_score = 2.0;    // v(s, null), identical for every user
  double score_offset = 1.0;  // v(s, d) = score_offset + I(u, d)
  int num_candidates = 10;    // m
  int slate_size = 3;         // k

  int num_topics() const { return catalog.num_topics(); }
  void validate() const;

  bool operator==(const EnvParams&) const = default;
};

struct StepOutcome {
  std::optional<std::size_t> clicked;  // position in the slate
  double reward = 0.0;
  double quality = 0.0;  // quality of the clicked document, 0 on no click
};

ChoiceScores environment_scores(const EnvParams& env, const UserState& user,
                                std::span<const Document> slate);

// Click distribution the simulated user actually follows (conditional or
// cascade, per `env.choice_model`); k+1 entries, null last.
std::vector<double> environment_choice_probs(const EnvParams& env,
                                             const UserState& user,
                                             std::span<const Document> slate);

// Shows `slate` to `user`, samples the response and applies the dynamics.
StepOutcome respond(const EnvParams& env, UserState& user,
                    std::span<const Document> slate, Rng& rng);

}  // namespace slateq
