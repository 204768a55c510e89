#include "gradbench/train.hpp"

#include <cmath>
#include <string>

namespace gradbench {

namespace {

constexpr std::size_t kFullLossCutoff = 10000;

void validate_config(const Objective& objective, const RunConfig& config) {
  if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
    throw ConfigError("learning rate must be a positive finite real");
  }
  if (config.max_steps < 0) throw ConfigError("max_steps must be nonnegative");
  if (config.record_every < 1) throw ConfigError("record_every must be >= 1");
  const std::size_t n = objective.n_examples();
  switch (config.batch_policy.kind) {
    case BatchPolicyKind::kFull:
      return;
    case BatchPolicyKind::kSingle:
      if (n == 0) {
        throw ConfigError(
            "single-example policy requires an objective with examples");
      }
      return;
    case BatchPolicyKind::kMiniBatch:
      if (n == 0) {
        throw ConfigError(
            "mini-batch policy requires an objective with examples");
      }
      if (config.batch_policy.batch_size < 1 ||
          config.batch_policy.batch_size > n) {
        throw ConfigError("mini-batch size must lie in [1, n_examples]");
      }
      return;
  }
  throw ConfigError("unhandled batch policy");
}

}  // namespace

Trajectory minimize(const Objective& objective, Optimizer optimizer,
                    const RunConfig& config, const StrategySet& strategies,
                    std::optional<ParamVector> theta0) {
  validate_config(objective, config);
  if (optimizer.dim() != objective.dim()) {
    throw ConfigError("optimizer dimension does not match objective");
  }

  ParamVector theta = theta0 ? std::move(*theta0) : objective.initial_point();
  if (theta.size() != objective.dim()) {
    throw ConfigError("initial theta dimension does not match objective");
  }
  ensure_finite(theta, "theta");

  LrSchedule schedule = strategies.schedule
                            ? *strategies.schedule
                            : LrSchedule::constant(config.learning_rate);
  std::optional<NoiseSchedule> noise = strategies.noise;
  if (noise) noise->rng_seed = seed_mix(config.seed, noise->rng_seed);
  std::optional<EarlyStopState> stop_state = strategies.early_stop;

  const std::size_t n = objective.n_examples();
  const bool batched = config.batch_policy.kind != BatchPolicyKind::kFull;
  const bool full_loss = n == 0 || n <= kFullLossCutoff;

  long epoch_index = 0;
  std::size_t batch_cursor = 0;
  BatchPlan batches;
  std::vector<std::size_t> current_batch;  // owned copy, survives replanning
  auto plan_epoch = [&]() {
    const EpochPlan plan =
        make_epoch_plan(n, strategies.order_policy, config.seed, epoch_index,
                        strategies.difficulty, strategies.curriculum_block);
    const std::size_t size = config.batch_policy.kind == BatchPolicyKind::kSingle
                                 ? 1
                                 : config.batch_policy.batch_size;
    batches = make_batches(plan, size);
    batch_cursor = 0;
  };
  if (batched) {
    plan_epoch();
    current_batch = batches.batches.front();
  }

  auto record_loss = [&]() {
    if (!batched || full_loss) return objective.value(theta);
    return objective.value_on(theta, current_batch);
  };

  Trajectory traj;
  traj.optimizer_name = std::string(optimizer.name());
  const double initial_loss = record_loss();
  traj.entries.push_back({0, theta, initial_loss});

  // Epoch-boundary improvement signal for threshold annealing.
  double prev_epoch_metric = initial_loss;
  long last_recorded = 0;

  for (long t = 1; t <= config.max_steps; ++t) {
    if (batched) current_batch = batches.batches[batch_cursor];

    GradFn grad_fn = [&](const ParamVector& p) {
      GradientSample g = batched ? objective.grad_on(p, current_batch)
                                 : objective.grad(p);
      if (noise) g = apply_noise(g, *noise, t - 1);
      return g;
    };

    const double eta_t = schedule.lr_at(t - 1);
    optimizer.step(theta, grad_fn, eta_t);
    ensure_finite(theta, "theta");

    if (t % config.record_every == 0) {
      traj.entries.push_back({t, theta, record_loss()});
      last_recorded = t;
    }

    // An epoch is one pass over the data; with the full-batch policy every
    // step is one.
    bool epoch_done = !batched;
    if (batched && ++batch_cursor == batches.batches.size()) {
      epoch_done = true;
      ++epoch_index;
      plan_epoch();
    }
    if (epoch_done) {
      const double metric = record_loss();
      schedule.on_epoch_improvement(prev_epoch_metric - metric);
      prev_epoch_metric = metric;
    }

    if (stop_state) {
      auto [next, decision] =
          early_stop_observe(*stop_state, t, objective.validation_value(theta));
      *stop_state = next;
      if (decision == StopDecision::kStop) {
        if (last_recorded != t) traj.entries.push_back({t, theta, record_loss()});
        return traj;
      }
    }
  }

  if (config.max_steps > 0 && last_recorded != config.max_steps) {
    traj.entries.push_back({config.max_steps, theta, record_loss()});
  }
  return traj;
}

}  // namespace gradbench
