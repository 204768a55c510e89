#pragma once

#include <cstdint>
#include <limits>
#include <utility>

#include "gradbench/types.hpp"

namespace gradbench {

enum class LrScheduleKind { kConstant, kStepDecay, kInverseT, kThresholdAnneal };

// Learning-rate schedule. The first three kinds are pure functions of the
// step index; threshold annealing is stateful and reacts to per-epoch
// improvement reports. Emitted rates always lie in (0, base_eta].
class LrSchedule {
 public:
  static LrSchedule constant(double base_eta);
  // base_eta * drop^floor(t / every_k); drop in (0,1), every_k >= 1.
  static LrSchedule step_decay(double base_eta, double drop, long every_k);
  // base_eta / (1 + k*t); k > 0.
  static LrSchedule inverse_t(double base_eta, double k);
  // Multiply the current rate by factor whenever an epoch improves the
  // objective by less than min_improvement; factor in (0,1).
  static LrSchedule threshold_anneal(double base_eta, double factor,
                                     double min_improvement);

  double lr_at(long t) const;
  // Epoch-boundary hook; only threshold annealing reacts.
  void on_epoch_improvement(double improvement);

  LrScheduleKind kind() const noexcept { return kind_; }
  double base_eta() const noexcept { return base_eta_; }

 private:
  LrSchedule(LrScheduleKind kind, double base_eta);
  LrScheduleKind kind_;
  double base_eta_;
  double drop_ = 0.5;
  long every_k_ = 1;
  double k_ = 1.0;
  double factor_ = 0.5;
  double min_improvement_ = 0.0;
  double current_ = 0.0;  // threshold annealing only
};

// Annealed Gaussian gradient noise: variance eta_n / (1+t)^gamma_n. The
// eta/gamma here are the schedule's own constants, independent of any
// optimizer learning rate or momentum coefficient.
struct NoiseSchedule {
  double noise_eta = 0.0;
  double noise_gamma = 0.55;
  std::uint64_t rng_seed = 0;
};

double noise_variance(const NoiseSchedule& sched, long t);

// Adds an independent N(0, sigma_t^2) draw to every stored coordinate.
// Sparse gradients perturb only their stored entries. Deterministic in
// (rng_seed, t); noise_eta = 0 returns g unchanged.
GradientSample apply_noise(const GradientSample& g, const NoiseSchedule& sched,
                           long t);

enum class StopDecision { kContinue, kStop };

// Validation-loss patience counter. Improvement means a strict decrease of
// more than min_delta below the best seen; stopping fires exactly when
// stale_count reaches patience.
struct EarlyStopState {
  double best_loss = std::numeric_limits<double>::infinity();
  long best_step = -1;
  long patience = 10;
  long stale_count = 0;
  double min_delta = 0.0;

  static EarlyStopState with_patience(long patience, double min_delta = 0.0);
};

std::pair<EarlyStopState, StopDecision> early_stop_observe(
    const EarlyStopState& state, long t, double val_loss);

}  // namespace gradbench
