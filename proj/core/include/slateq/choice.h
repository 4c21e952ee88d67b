#pragma once

#include <optional>
#include <span>
#include <vector>

#include "slateq/corpus.h"
#include "slateq/rng.h"
#include "slateq/user_model.h"

namespace slateq {

// Unnormalized choice scores for the slate items (in slate order) plus the
// fictitious null item that stands for "no click".
struct ChoiceScores {
  std::vector<double> item_scores;
  double null_score = 1.0;
};

struct CascadeParams {
  double base_inspect = 1.0;  // beta_0
  double decay = 0.65;        // beta

  void validate() const;
  bool operator==(const CascadeParams&) const = default;
};

// kSequential: the user scans top to bottom, inspects position j with
//   probability beta_0 * beta^j and then selects it with its conditional
//   probability; the first selection ends the scan.
// kMarginal: selection probability is beta_0 * beta^j * p_j with no
//   carry-over between positions. Errors if the total exceeds one.
enum class CascadeMode { kSequential, kMarginal };

enum class ChoiceModel { kConditional, kCascade };

// Returns k+1 probabilities: items in slate order, then the null item.
std::vector<double> conditional_probs(const ChoiceScores& scores);
std::vector<double> cascade_probs(const ChoiceScores& scores,
                                  const CascadeParams& params,
                                  CascadeMode mode = CascadeMode::kSequential);

// Categorical draw over k+1 outcomes. std::nullopt is the null item.
std::optional<std::size_t> sample_choice(std::span<const double> probs,
                                         Rng& rng);

// Appeal of `doc` to `user` used by the simulated environment:
// offset + I(u, d), which maps interests in [-1, 1] onto [0, 2].
double environment_score(const UserState& user, const Document& doc,
                         double offset = 1.0);

}  // namespace slateq
