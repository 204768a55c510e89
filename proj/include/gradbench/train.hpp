#pragma once

#include <optional>

#include "gradbench/data.hpp"
#include "gradbench/optimizers.hpp"
#include "gradbench/schedules.hpp"
#include "gradbench/types.hpp"

namespace gradbench {

// Optional strategies composed into the training loop. Absent members fall
// back to: constant learning rate at RunConfig.learning_rate, no gradient
// noise, no early stopping, per-epoch shuffling.
struct StrategySet {
  std::optional<LrSchedule> schedule;
  std::optional<NoiseSchedule> noise;   // rng_seed is mixed with RunConfig.seed
  std::optional<EarlyStopState> early_stop;
  OrderPolicy order_policy = OrderPolicy::kShuffle;
  DifficultyFn difficulty;              // required by sorted/mixed ordering
  std::size_t curriculum_block = 0;     // 0 = default 10% of n
};

// Sequential minimization driver. Per step: assemble the batch, compute the
// gradient, add scheduled noise, apply the optimizer at the scheduled rate,
// record, then check early stopping. Entry 0 of the trajectory is the
// initial point; the final visited point is always recorded. Recorded loss
// is the full-dataset objective when n_examples <= 10000 (and always for
// analytic surfaces), else the current batch loss.
Trajectory minimize(const Objective& objective, Optimizer optimizer,
                    const RunConfig& config, const StrategySet& strategies = {},
                    std::optional<ParamVector> theta0 = std::nullopt);

}  // namespace gradbench
