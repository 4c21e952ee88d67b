#include "slateq/choice.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace slateq {
namespace {

void check_scores(const ChoiceScores& scores) {
  double total = scores.null_score;
  if (!(scores.null_score >= 0.0) || !std::isfinite(scores.null_score)) {
    throw std::invalid_argument("null score must be finite and >= 0");
  }
  for (double v : scores.item_scores) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("choice scores must be finite and >= 0");
    }
    total += v;
  }
  if (!(total > 0.0)) {
    throw std::invalid_argument("choice scores are all zero");
  }
}

}  // namespace

void CascadeParams::validate() const {
  if (!(base_inspect > 0.0 && base_inspect <= 1.0)) {
    throw std::invalid_argument("cascade base_inspect must lie in (0, 1]");
  }
  if (!(decay > 0.0 && decay <= 1.0)) {
    throw std::invalid_argument("cascade decay must lie in (0, 1]");
  }
}

std::vector<double> conditional_probs(const ChoiceScores& scores) {
  check_scores(scores);
  const double total = std::accumulate(scores.item_scores.begin(),
                                       scores.item_scores.end(),
                                       scores.null_score);
  std::vector<double> probs;
  probs.reserve(scores.item_scores.size() + 1);
  for (double v : scores.item_scores) probs.push_back(v / total);
  probs.push_back(scores.null_score / total);
  return probs;
}

std::vector<double> cascade_probs(const ChoiceScores& scores,
                                  const CascadeParams& params,
                                  CascadeMode mode) {
  params.validate();
  const std::vector<double> base = conditional_probs(scores);
  const std::size_t k = scores.item_scores.size();
  std::vector<double> probs(k + 1, 0.0);
  double still_scanning = 1.0;
  double inspect = params.base_inspect;
  double selected = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double select_here = inspect * base[j];
    probs[j] = mode == CascadeMode::kSequential ? still_scanning * select_here
                                                : select_here;
    still_scanning *= 1.0 - select_here;
    selected += probs[j];
    inspect *= params.decay;
  }
  if (selected > 1.0 + 1e-12) {
    throw std::domain_error("marginal cascade probabilities exceed one");
  }
  probs[k] = std::max(0.0, 1.0 - selected);
  return probs;
}

std::optional<std::size_t> sample_choice(std::span<const double> probs,
                                         Rng& rng) {
  if (probs.empty()) throw std::invalid_argument("empty choice distribution");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("choice probabilities must be finite and >= 0");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("choice probabilities do not sum to one");
  }
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  const std::size_t null_index = probs.size() - 1;
  for (std::size_t i = 0; i < null_index; ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return std::nullopt;
}

double environment_score(const UserState& user, const Document& doc,
                         double offset) {
  return offset + interest(user, doc);
}

}  // namespace slateq
