#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "gradbench/types.hpp"

namespace gradbench {

enum class OptimizerKind {
  kSgd,
  kMomentum,
  kNag,
  kNagModified,
  kAdagrad,
  kAdadelta,
  kRmsprop,
  kAdam,
  kAdamax,
  kNadam,
};

// Hyperparameter bundle shared across all update rules; each rule reads the
// fields it uses. Ranges: eta > 0, gamma in [0,1), beta1/beta2 in [0,1),
// epsilon > 0.
struct HyperParams {
  double eta = 0.01;
  double gamma = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Per-algorithm defaults: adagrad eta=0.01, rmsprop eta=0.001,
// adam/nadam eta=0.001, adamax eta=0.002, adadelta epsilon=1e-6 (its update
// has no learning rate at all); everything else keeps the generic values.
HyperParams default_hyper_params(OptimizerKind kind);

// --- Optimizer states. Value types; zero-initialized accumulators. ---

struct MomentumState {
  std::vector<double> v;  // update vector
  static MomentumState zero(std::size_t dim) { return {std::vector<double>(dim, 0.0)}; }
};

struct AdagradState {
  std::vector<double> g2_sum;  // diagonal of the squared-gradient sum; entrywise non-decreasing
  static AdagradState zero(std::size_t dim) { return {std::vector<double>(dim, 0.0)}; }
};

struct AdadeltaState {
  std::vector<double> eg2;   // decayed average of squared gradients
  std::vector<double> edx2;  // decayed average of squared parameter updates
  static AdadeltaState zero(std::size_t dim) {
    return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
  }
};

struct RmspropState {
  std::vector<double> eg2;
  static RmspropState zero(std::size_t dim) { return {std::vector<double>(dim, 0.0)}; }
};

struct AdamState {
  long t = 0;  // incremented before bias correction; first step divides by 1-beta^1
  std::vector<double> m;
  std::vector<double> v;
  static AdamState zero(std::size_t dim) {
    return {0, std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
  }
};

struct AdamaxState {
  long t = 0;
  std::vector<double> m;
  std::vector<double> u;  // infinity-norm accumulator; no bias correction
  static AdamaxState zero(std::size_t dim) {
    return {0, std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
  }
};

struct NadamState {
  long t = 0;
  std::vector<double> m;
  std::vector<double> v;
  static NadamState zero(std::size_t dim) {
    return {0, std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
  }
};

// --- Pure single-step update rules. None mutates its inputs. ---
//
// Sparse gradients: sgd_step touches only the stored indices; every stateful
// rule densifies first because its decay applies to all coordinates.

// theta' = theta - eta * g
ParamVector sgd_step(const ParamVector& theta, const GradientSample& g,
                     double eta);

// v' = gamma*v + eta*g; theta' = theta - v'
std::pair<MomentumState, ParamVector> momentum_step(const MomentumState& state,
                                                    const ParamVector& theta,
                                                    const GradientSample& g,
                                                    double eta, double gamma);

// Gradient at the look-ahead point theta - gamma*v; then as momentum.
// grad_fn is called exactly once.
std::pair<MomentumState, ParamVector> nag_step(const MomentumState& state,
                                               const ParamVector& theta,
                                               const GradFn& grad_fn,
                                               double eta, double gamma);

// Look-ahead applied directly: v' = gamma*v + eta*g;
// theta' = theta - (gamma*v' + eta*g), with g taken at the current theta.
std::pair<MomentumState, ParamVector> nag_modified_step(
    const MomentumState& state, const ParamVector& theta,
    const GradientSample& g, double eta, double gamma);

// G' = G + g*g; theta' = theta - eta*g/sqrt(G' + eps). eps inside the root.
std::pair<AdagradState, ParamVector> adagrad_step(const AdagradState& state,
                                                  const ParamVector& theta,
                                                  const GradientSample& g,
                                                  double eta, double epsilon);

// Unit-consistent rule with no learning rate:
//   eg2' = gamma*eg2 + (1-gamma)*g*g
//   dx   = -sqrt(edx2 + eps)/sqrt(eg2' + eps) * g   (numerator uses the
//          previous window, RMS[dx]_{t-1})
//   edx2' = gamma*edx2 + (1-gamma)*dx*dx; theta' = theta + dx
std::pair<AdadeltaState, ParamVector> adadelta_step(const AdadeltaState& state,
                                                    const ParamVector& theta,
                                                    const GradientSample& g,
                                                    double gamma,
                                                    double epsilon);

// eg2' = gamma*eg2 + (1-gamma)*g*g; theta' = theta - eta*g/sqrt(eg2' + eps)
std::pair<RmspropState, ParamVector> rmsprop_step(const RmspropState& state,
                                                  const ParamVector& theta,
                                                  const GradientSample& g,
                                                  double eta, double gamma,
                                                  double epsilon);

// Bias-corrected moment estimates; eps OUTSIDE the root:
//   theta' = theta - eta * mhat / (sqrt(vhat) + eps)
std::pair<AdamState, ParamVector> adam_step(const AdamState& state,
                                            const ParamVector& theta,
                                            const GradientSample& g,
                                            double eta, double beta1,
                                            double beta2, double epsilon);

// Infinity-norm variant: u' = max(beta2*u, |g|); theta' = theta - eta*mhat/u'.
// A coordinate with u'_i = 0 (all-zero gradient history) is left unchanged.
std::pair<AdamaxState, ParamVector> adamax_step(const AdamaxState& state,
                                                const ParamVector& theta,
                                                const GradientSample& g,
                                                double eta, double beta1,
                                                double beta2);

// Nesterov-flavored Adam:
//   theta' = theta - eta * (beta1*mhat + (1-beta1)*g/(1-beta1^t)) / (sqrt(vhat) + eps)
std::pair<NadamState, ParamVector> nadam_step(const NadamState& state,
                                              const ParamVector& theta,
                                              const GradientSample& g,
                                              double eta, double beta1,
                                              double beta2, double epsilon);

// --- Uniform driver over the ten rules. ---

class Optimizer {
 public:
  Optimizer(OptimizerKind kind, std::size_t dim, const HyperParams& hp);

  // Construct by CLI/config name with per-algorithm default hyperparameters.
  static Optimizer by_name(std::string_view name, std::size_t dim);
  static Optimizer by_name(std::string_view name, std::size_t dim,
                           const HyperParams& hp);

  OptimizerKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept;
  const HyperParams& hyper() const noexcept { return hp_; }
  std::size_t dim() const noexcept { return dim_; }

  // One parameter update in place. grad_fn is called exactly once: at the
  // look-ahead point for nag, at theta for everything else. eta overrides
  // the configured rate for this step (schedules feed it); adadelta ignores
  // it by construction.
  void step(ParamVector& theta, const GradFn& grad_fn, double eta);
  void step(ParamVector& theta, const GradFn& grad_fn);

  // Diagnostic access to the internal state (tests, reporting).
  template <class State>
  const State& state() const {
    return std::get<State>(state_);
  }

 private:
  OptimizerKind kind_;
  std::size_t dim_;
  HyperParams hp_;
  std::variant<std::monostate, MomentumState, AdagradState, AdadeltaState,
               RmspropState, AdamState, AdamaxState, NadamState>
      state_;
};

// Exact selection strings: sgd, momentum, nag, nag-mod, adagrad, adadelta,
// rmsprop, adam, adamax, nadam.
const std::vector<std::string>& optimizer_names();
OptimizerKind optimizer_kind_from_name(std::string_view name);
std::string_view optimizer_name(OptimizerKind kind);

}  // namespace gradbench
