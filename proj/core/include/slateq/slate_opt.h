#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace slateq {

// A candidate item for slate construction: its choice score v(s, i) and its
// conditional-on-click long-term value Q(s, i).
struct ScoredItem {
  std::uint64_t id = 0;
  double v = 0.0;
  double q = 0.0;
};

struct SlateSolution {
  std::vector<std::uint64_t> items;
  double value = 0.0;
};

enum class SlateOptimizer { kTopK, kGreedy, kExact, kBruteForce };

std::string_view to_string(SlateOptimizer opt);
// Accepts "top_k" | "greedy" | "exact" | "brute_force".
SlateOptimizer parse_slate_optimizer(std::string_view name);

// Expected LTV of a slate under the conditional choice model, null included:
//   (null_v * null_q + sum v_i q_i) / (null_v + sum v_i).
double slate_value(std::span<const ScoredItem> chosen, double null_v,
                   double null_q);

// k items with the largest v*q, ordered by decreasing v*q (ties: smaller id).
SlateSolution topk_slate(std::span<const ScoredItem> items, std::size_t k,
                         double null_v, double null_q);

// Adds, k times, the item with the largest marginal slate value. Items are
// returned in insertion order.
SlateSolution greedy_slate(std::span<const ScoredItem> items, std::size_t k,
                           double null_v, double null_q);

// Globally optimal k-set, via Dinkelbach's parametric method on the
// fractional objective. For fixed lambda the subproblem
//   max_{|A|=k} sum_{i in A} v_i (q_i - lambda)
// is solved by a top-k selection, and lambda is replaced by the value of the
// selected set until it stops improving. Ordered by decreasing v*q.
SlateSolution exact_slate(std::span<const ScoredItem> items, std::size_t k,
                          double null_v, double null_q);

// Exhaustive search over all C(m, k) subsets in lexicographic id order; the
// first maximizer wins. Throws std::length_error if C(m, k) > max_subsets.
SlateSolution brute_force_slate(std::span<const ScoredItem> items,
                                std::size_t k, double null_v, double null_q,
                                std::size_t* subsets_evaluated = nullptr,
                                std::size_t max_subsets = 1'000'000);

SlateSolution optimize_slate(SlateOptimizer opt,
                             std::span<const ScoredItem> items, std::size_t k,
                             double null_v, double null_q);

// C(n, k), saturating at SIZE_MAX.
std::size_t binomial(std::size_t n, std::size_t k);

}  // namespace slateq
