#include "gradbench/schedules.hpp"

#include <cmath>
#include <random>

namespace gradbench {

LrSchedule::LrSchedule(LrScheduleKind kind, double base_eta)
    : kind_(kind), base_eta_(base_eta), current_(base_eta) {
  if (!(base_eta > 0.0) || !std::isfinite(base_eta)) {
    throw ConfigError("schedule base rate must be a positive finite real");
  }
}

LrSchedule LrSchedule::constant(double base_eta) {
  return LrSchedule(LrScheduleKind::kConstant, base_eta);
}

LrSchedule LrSchedule::step_decay(double base_eta, double drop, long every_k) {
  LrSchedule s(LrScheduleKind::kStepDecay, base_eta);
  if (!(drop > 0.0) || !(drop < 1.0)) {
    throw ConfigError("step decay drop must lie in (0, 1)");
  }
  if (every_k < 1) throw ConfigError("step decay interval must be positive");
  s.drop_ = drop;
  s.every_k_ = every_k;
  return s;
}

LrSchedule LrSchedule::inverse_t(double base_eta, double k) {
  LrSchedule s(LrScheduleKind::kInverseT, base_eta);
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw ConfigError("inverse-t decay constant must be positive");
  }
  s.k_ = k;
  return s;
}

LrSchedule LrSchedule::threshold_anneal(double base_eta, double factor,
                                        double min_improvement) {
  LrSchedule s(LrScheduleKind::kThresholdAnneal, base_eta);
  if (!(factor > 0.0) || !(factor < 1.0)) {
    throw ConfigError("annealing factor must lie in (0, 1)");
  }
  if (!(min_improvement > 0.0)) {
    throw ConfigError("annealing improvement threshold must be positive");
  }
  s.factor_ = factor;
  s.min_improvement_ = min_improvement;
  return s;
}

double LrSchedule::lr_at(long t) const {
  if (t < 0) throw ConfigError("schedule step index must be nonnegative");
  switch (kind_) {
    case LrScheduleKind::kConstant:
      return base_eta_;
    case LrScheduleKind::kStepDecay:
      return base_eta_ * std::pow(drop_, static_cast<double>(t / every_k_));
    case LrScheduleKind::kInverseT:
      return base_eta_ / (1.0 + k_ * static_cast<double>(t));
    case LrScheduleKind::kThresholdAnneal:
      return current_;
  }
  throw ConfigError("unhandled schedule kind");
}

void LrSchedule::on_epoch_improvement(double improvement) {
  if (kind_ != LrScheduleKind::kThresholdAnneal) return;
  if (improvement < min_improvement_) current_ *= factor_;
}

double noise_variance(const NoiseSchedule& sched, long t) {
  if (t < 0) throw ConfigError("noise step index must be nonnegative");
  if (!(sched.noise_eta >= 0.0) || !(sched.noise_gamma >= 0.0)) {
    throw ConfigError("noise schedule constants must be nonnegative");
  }
  return sched.noise_eta /
         std::pow(1.0 + static_cast<double>(t), sched.noise_gamma);
}

GradientSample apply_noise(const GradientSample& g, const NoiseSchedule& sched,
                           long t) {
  const double variance = noise_variance(sched, t);
  if (variance == 0.0) return g;
  std::mt19937_64 rng(seed_mix(sched.rng_seed, static_cast<std::uint64_t>(t)));
  std::normal_distribution<double> draw(0.0, std::sqrt(variance));
  if (g.is_sparse()) {
    std::vector<SparseEntry> entries = g.entries();
    for (SparseEntry& e : entries) e.value += draw(rng);
    return GradientSample::sparse(g.dim(), std::move(entries));
  }
  std::vector<double> values = g.dense_values();
  for (double& v : values) v += draw(rng);
  return GradientSample::dense(std::move(values));
}

EarlyStopState EarlyStopState::with_patience(long patience, double min_delta) {
  if (patience < 1) throw ConfigError("early-stopping patience must be >= 1");
  if (!(min_delta >= 0.0)) {
    throw ConfigError("early-stopping min delta must be nonnegative");
  }
  EarlyStopState s;
  s.patience = patience;
  s.min_delta = min_delta;
  return s;
}

std::pair<EarlyStopState, StopDecision> early_stop_observe(
    const EarlyStopState& state, long t, double val_loss) {
  if (!std::isfinite(val_loss)) {
    throw NumericError("early stopping observed a non-finite validation loss");
  }
  EarlyStopState next = state;
  if (val_loss < state.best_loss - state.min_delta) {
    next.best_loss = val_loss;
    next.best_step = t;
    next.stale_count = 0;
    return {next, StopDecision::kContinue};
  }
  next.stale_count = state.stale_count + 1;
  return {next, next.stale_count >= next.patience ? StopDecision::kStop
                                                  : StopDecision::kContinue};
}

}  // namespace gradbench
