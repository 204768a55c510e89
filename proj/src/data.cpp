#include "gradbench/data.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace gradbench {

namespace {

void shuffle_range(std::vector<std::size_t>::iterator first,
                   std::vector<std::size_t>::iterator last,
                   std::mt19937_64& rng) {
  std::shuffle(first, last, rng);
}

std::vector<std::size_t> sorted_by_difficulty(std::size_t n,
                                              const DifficultyFn& difficulty) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return difficulty(a) < difficulty(b);
                   });
  return order;
}

}  // namespace

EpochPlan make_epoch_plan(std::size_t n_examples, OrderPolicy policy,
                          std::uint64_t seed, long epoch_index,
                          const DifficultyFn& difficulty, std::size_t block) {
  if (n_examples < 1) throw ConfigError("epoch plan needs at least one example");
  if (epoch_index < 0) throw ConfigError("epoch index must be nonnegative");
  EpochPlan plan;
  plan.policy = policy;
  switch (policy) {
    case OrderPolicy::kInOrder: {
      plan.order.resize(n_examples);
      std::iota(plan.order.begin(), plan.order.end(), std::size_t{0});
      return plan;
    }
    case OrderPolicy::kShuffle: {
      plan.order.resize(n_examples);
      std::iota(plan.order.begin(), plan.order.end(), std::size_t{0});
      std::mt19937_64 rng(
          seed_mix(seed, static_cast<std::uint64_t>(epoch_index)));
      shuffle_range(plan.order.begin(), plan.order.end(), rng);
      return plan;
    }
    case OrderPolicy::kSorted: {
      if (!difficulty) {
        throw ConfigError("sorted ordering requires a difficulty function");
      }
      plan.order = sorted_by_difficulty(n_examples, difficulty);
      return plan;
    }
    case OrderPolicy::kMixed: {
      if (!difficulty) {
        throw ConfigError("mixed ordering requires a difficulty function");
      }
      plan.order = sorted_by_difficulty(n_examples, difficulty);
      std::size_t b = block;
      if (b == 0) b = std::max<std::size_t>(1, n_examples / 10);
      std::mt19937_64 rng(
          seed_mix(seed, static_cast<std::uint64_t>(epoch_index)));
      for (std::size_t begin = 0; begin < n_examples; begin += b) {
        const std::size_t end = std::min(begin + b, n_examples);
        shuffle_range(plan.order.begin() + static_cast<std::ptrdiff_t>(begin),
                      plan.order.begin() + static_cast<std::ptrdiff_t>(end),
                      rng);
      }
      return plan;
    }
  }
  throw ConfigError("unhandled order policy");
}

BatchPlan make_batches(const EpochPlan& plan, std::size_t n) {
  if (n < 1) throw ConfigError("batch size must be positive");
  BatchPlan out;
  out.batch_size = n;
  const std::size_t total = plan.order.size();
  out.batches.reserve((total + n - 1) / n);
  for (std::size_t begin = 0; begin < total; begin += n) {
    const std::size_t end = std::min(begin + n, total);
    out.batches.emplace_back(plan.order.begin() + static_cast<std::ptrdiff_t>(begin),
                             plan.order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

OrderPolicy order_policy_from_name(std::string_view name) {
  if (name == "in_order") return OrderPolicy::kInOrder;
  if (name == "shuffle") return OrderPolicy::kShuffle;
  if (name == "sorted") return OrderPolicy::kSorted;
  if (name == "mixed") return OrderPolicy::kMixed;
  throw UsageError("unknown data policy: " + std::string(name) +
                   " (valid: in_order shuffle sorted mixed)");
}

std::string_view order_policy_name(OrderPolicy policy) {
  switch (policy) {
    case OrderPolicy::kInOrder: return "in_order";
    case OrderPolicy::kShuffle: return "shuffle";
    case OrderPolicy::kSorted: return "sorted";
    case OrderPolicy::kMixed: return "mixed";
  }
  throw ConfigError("unhandled order policy");
}

}  // namespace gradbench
