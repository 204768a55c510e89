#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "gradbench/types.hpp"

namespace gradbench {

enum class OrderPolicy { kInOrder, kShuffle, kSorted, kMixed };

// Maps an example index to a difficulty score; ascending order = easiest
// first. Required by kSorted and kMixed.
using DifficultyFn = std::function<double(std::size_t)>;

// One epoch's visiting order: always a true permutation of [0, n).
struct EpochPlan {
  std::vector<std::size_t> order;
  OrderPolicy policy = OrderPolicy::kInOrder;
};

// kShuffle draws a uniform permutation from (seed, epoch_index); kSorted is
// ascending difficulty (stable on ties); kMixed sorts, then shuffles inside
// consecutive blocks (block = 0 picks the default of 10% of n, minimum 1),
// interpolating between the two.
EpochPlan make_epoch_plan(std::size_t n_examples, OrderPolicy policy,
                          std::uint64_t seed, long epoch_index,
                          const DifficultyFn& difficulty = nullptr,
                          std::size_t block = 0);

// Consecutive slices of an epoch order; all of size batch_size except
// possibly the last. Concatenation reproduces the epoch order exactly.
struct BatchPlan {
  std::vector<std::vector<std::size_t>> batches;
  std::size_t batch_size = BatchPolicy::kDefaultBatchSize;
};

BatchPlan make_batches(const EpochPlan& plan,
                       std::size_t n = BatchPolicy::kDefaultBatchSize);

OrderPolicy order_policy_from_name(std::string_view name);
std::string_view order_policy_name(OrderPolicy policy);

}  // namespace gradbench
