#include "slateq/slate_opt.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace slateq {
namespace {

void check_request(std::span<const ScoredItem> items, std::size_t k) {
  if (items.size() < k) {
    throw std::invalid_argument("slate size " + std::to_string(k) +
                                " exceeds the " + std::to_string(items.size()) +
                                " available items");
  }
  for (const ScoredItem& it : items) {
    if (!(it.v >= 0.0) || !std::isfinite(it.v) || !std::isfinite(it.q)) {
      throw std::invalid_argument("scored items need finite q and v >= 0");
    }
  }
}

// Indices of `items` ordered by decreasing key, ties by smaller id.
template <typename Key>
std::vector<std::size_t> order_by(std::span<const ScoredItem> items, Key key) {
  std::vector<std::size_t> idx(items.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double ka = key(items[a]);
    const double kb = key(items[b]);
    if (ka != kb) return ka > kb;
    return items[a].id < items[b].id;
  });
  return idx;
}

double product(const ScoredItem& it) { return it.v * it.q; }

// Sorts the chosen positions by decreasing v*q and packages the result.
SlateSolution finish(std::span<const ScoredItem> items,
                     std::vector<std::size_t> chosen, double null_v,
                     double null_q) {
  std::sort(chosen.begin(), chosen.end(), [&](std::size_t a, std::size_t b) {
    const double pa = product(items[a]);
    const double pb = product(items[b]);
    if (pa != pb) return pa > pb;
    return items[a].id < items[b].id;
  });
  SlateSolution out;
  std::vector<ScoredItem> picked;
  for (std::size_t i : chosen) {
    out.items.push_back(items[i].id);
    picked.push_back(items[i]);
  }
  out.value = slate_value(picked, null_v, null_q);
  return out;
}

}  // namespace

std::string_view to_string(SlateOptimizer opt) {
  switch (opt) {
    case SlateOptimizer::kTopK: return "top_k";
    case SlateOptimizer::kGreedy: return "greedy";
    case SlateOptimizer::kExact: return "exact";
    case SlateOptimizer::kBruteForce: return "brute_force";
  }
  return "unknown";
}

SlateOptimizer parse_slate_optimizer(std::string_view name) {
  if (name == "top_k") return SlateOptimizer::kTopK;
  if (name == "greedy") return SlateOptimizer::kGreedy;
  if (name == "exact") return SlateOptimizer::kExact;
  if (name == "brute_force") return SlateOptimizer::kBruteForce;
  throw std::invalid_argument("unknown slate optimizer '" + std::string(name) +
                              "'");
}

double slate_value(std::span<const ScoredItem> chosen, double null_v,
                   double null_q) {
  double num = null_v * null_q;
  double den = null_v;
  for (const ScoredItem& it : chosen) {
    num += it.v * it.q;
    den += it.v;
  }
  if (!(den > 0.0)) {
    throw std::domain_error("slate value undefined: total choice score is zero");
  }
  return num / den;
}

SlateSolution topk_slate(std::span<const ScoredItem> items, std::size_t k,
                         double null_v, double null_q) {
  check_request(items, k);
  std::vector<std::size_t> idx = order_by(items, product);
  idx.resize(k);
  return finish(items, std::move(idx), null_v, null_q);
}

SlateSolution greedy_slate(std::span<const ScoredItem> items, std::size_t k,
                           double null_v, double null_q) {
  check_request(items, k);
  std::vector<bool> used(items.size(), false);
  double num = null_v * null_q;
  double den = null_v;
  SlateSolution out;
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t best = items.size();
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (used[i]) continue;
      const double d = den + items[i].v;
      // An item with v = 0 and a zero denominator contributes nothing; treat
      // the (undefined) partial value as -inf so any real option wins.
      const double value = d > 0.0 ? (num + product(items[i])) / d
                                   : -std::numeric_limits<double>::infinity();
      if (best == items.size() || value > best_value ||
          (value == best_value && items[i].id < items[best].id)) {
        best = i;
        best_value = value;
      }
    }
    used[best] = true;
    num += product(items[best]);
    den += items[best].v;
    out.items.push_back(items[best].id);
  }
  std::vector<ScoredItem> picked;
  for (std::uint64_t id : out.items) {
    for (const ScoredItem& it : items) {
      if (it.id == id) {
        picked.push_back(it);
        break;
      }
    }
  }
  out.value = slate_value(picked, null_v, null_q);
  return out;
}

SlateSolution exact_slate(std::span<const ScoredItem> items, std::size_t k,
                          double null_v, double null_q) {
  check_request(items, k);
  if (k == 0) return finish(items, {}, null_v, null_q);

  auto select = [&](double lambda) {
    std::vector<std::size_t> idx = order_by(
        items, [lambda](const ScoredItem& it) { return it.v * (it.q - lambda); });
    idx.resize(k);
    return idx;
  };
  auto value_of = [&](const std::vector<std::size_t>& idx) {
    double num = null_v * null_q;
    double den = null_v;
    for (std::size_t i : idx) {
      num += product(items[i]);
      den += items[i].v;
    }
    return num / den;
  };

  // Start from the top-k set; every iteration strictly raises lambda, so the
  // loop visits each k-set at most once.
  std::vector<std::size_t> best = select(0.0);
  double lambda = value_of(best);
  for (;;) {
    std::vector<std::size_t> next = select(lambda);
    const double next_value = value_of(next);
    const double tol = 1e-14 * std::max(1.0, std::abs(lambda));
    if (!(next_value > lambda + tol)) break;
    best = std::move(next);
    lambda = next_value;
  }
  return finish(items, std::move(best), null_v, null_q);
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t result = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::size_t num = n - k + i;
    if (result > std::numeric_limits<std::size_t>::max() / num) {
      return std::numeric_limits<std::size_t>::max();
    }
    result = result * num / i;
  }
  return result;
}

SlateSolution brute_force_slate(std::span<const ScoredItem> items,
                                std::size_t k, double null_v, double null_q,
                                std::size_t* subsets_evaluated,
                                std::size_t max_subsets) {
  check_request(items, k);
  const std::size_t total = binomial(items.size(), k);
  if (total > max_subsets) {
    throw std::length_error("brute force over " + std::to_string(total) +
                            " subsets exceeds the budget of " +
                            std::to_string(max_subsets));
  }
  // Enumerate over items sorted by id so "first maximizer" means
  // lexicographically smallest id tuple.
  std::vector<std::size_t> by_id(items.size());
  std::iota(by_id.begin(), by_id.end(), 0);
  std::sort(by_id.begin(), by_id.end(), [&](std::size_t a, std::size_t b) {
    return items[a].id < items[b].id;
  });

  std::vector<std::size_t> comb(k);
  std::iota(comb.begin(), comb.end(), 0);
  std::vector<std::size_t> best;
  double best_value = -std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  const std::size_t n = items.size();
  for (;;) {
    double num = null_v * null_q;
    double den = null_v;
    for (std::size_t c : comb) {
      const ScoredItem& it = items[by_id[c]];
      num += it.v * it.q;
      den += it.v;
    }
    if (!(den > 0.0)) {
      throw std::domain_error("slate value undefined: total choice score is zero");
    }
    const double value = num / den;
    ++count;
    if (count == 1 || value > best_value) {
      best_value = value;
      best.clear();
      for (std::size_t c : comb) best.push_back(by_id[c]);
    }
    if (k == 0) break;
    // Next combination in lexicographic order.
    std::size_t i = k;
    while (i > 0 && comb[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++comb[i - 1];
    for (std::size_t j = i; j < k; ++j) comb[j] = comb[j - 1] + 1;
  }
  if (subsets_evaluated != nullptr) *subsets_evaluated = count;
  return finish(items, std::move(best), null_v, null_q);
}

SlateSolution optimize_slate(SlateOptimizer opt,
                             std::span<const ScoredItem> items, std::size_t k,
                             double null_v, double null_q) {
  switch (opt) {
    case SlateOptimizer::kTopK: return topk_slate(items, k, null_v, null_q);
    case SlateOptimizer::kGreedy: return greedy_slate(items, k, null_v, null_q);
    case SlateOptimizer::kExact: return exact_slate(items, k, null_v, null_q);
    case SlateOptimizer::kBruteForce:
      return brute_force_slate(items, k, null_v, null_q);
  }
  throw std::invalid_argument("unknown slate optimizer");
}

}  // namespace slateq
