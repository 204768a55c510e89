#include "gradbench/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gradbench {

namespace {

void check_dims(std::size_t theta_dim, std::size_t g_dim, std::size_t state_dim) {
  if (theta_dim != g_dim || theta_dim != state_dim) {
    std::ostringstream os;
    os << "dimension mismatch: theta " << theta_dim << ", gradient " << g_dim
       << ", state " << state_dim;
    throw ConfigError(os.str());
  }
}

void check_eta(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ConfigError("learning rate must be a positive finite real");
  }
}

void check_decay(double value, const char* name) {
  if (!(value >= 0.0) || !(value < 1.0)) {
    std::ostringstream os;
    os << name << " must lie in [0, 1)";
    throw ConfigError(os.str());
  }
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ConfigError("epsilon must be a positive finite real");
  }
}

}  // namespace

HyperParams default_hyper_params(OptimizerKind kind) {
  HyperParams hp;  // eta 0.01, gamma 0.9, beta1 0.9, beta2 0.999, epsilon 1e-8
  switch (kind) {
    case OptimizerKind::kAdadelta:
      hp.epsilon = 1e-6;  // sqrt(eps) sets the first-step scale
      break;
    case OptimizerKind::kRmsprop:
    case OptimizerKind::kAdam:
    case OptimizerKind::kNadam:
      hp.eta = 0.001;
      break;
    case OptimizerKind::kAdamax:
      hp.eta = 0.002;
      break;
    default:
      break;
  }
  return hp;
}

ParamVector sgd_step(const ParamVector& theta, const GradientSample& g,
                     double eta) {
  check_eta(eta);
  if (theta.size() != g.dim()) {
    std::ostringstream os;
    os << "dimension mismatch: theta " << theta.size() << ", gradient "
       << g.dim();
    throw ConfigError(os.str());
  }
  ParamVector out = theta;
  g.for_each_stored(
      [&](std::size_t i, double gi) { out[i] = theta[i] - eta * gi; });
  return out;
}

std::pair<MomentumState, ParamVector> momentum_step(const MomentumState& state,
                                                    const ParamVector& theta,
                                                    const GradientSample& g,
                                                    double eta, double gamma) {
  check_eta(eta);
  check_decay(gamma, "gamma");
  check_dims(theta.size(), g.dim(), state.v.size());
  const std::vector<double> gd = g.to_dense();
  MomentumState next{std::vector<double>(theta.size())};
  ParamVector out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double vi = gamma * state.v[i] + eta * gd[i];
    next.v[i] = vi;
    out[i] = theta[i] - vi;
  }
  return {std::move(next), std::move(out)};
}

std::pair<MomentumState, ParamVector> nag_step(const MomentumState& state,
                                               const ParamVector& theta,
                                               const GradFn& grad_fn,
                                               double eta, double gamma) {
  check_eta(eta);
  check_decay(gamma, "gamma");
  if (theta.size() != state.v.size()) {
    throw ConfigError("dimension mismatch between theta and momentum state");
  }
  ParamVector look_ahead(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    look_ahead[i] = theta[i] - gamma * state.v[i];
  }
  const GradientSample g = grad_fn(look_ahead);
  check_dims(theta.size(), g.dim(), state.v.size());
  const std::vector<double> gd = g.to_dense();
  MomentumState next{std::vector<double>(theta.size())};
  ParamVector out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double vi = gamma * state.v[i] + eta * gd[i];
    next.v[i] = vi;
    out[i] = theta[i] - vi;
  }
  return {std::move(next), std::move(out)};
}

std::pair<MomentumState, ParamVector> nag_modified_step(
    const MomentumState& state, const ParamVector& theta,
    const GradientSample& g, double eta, double gamma) {
  check_eta(eta);
  check_decay(gamma, "gamma");
  check_dims(theta.size(), g.dim(), state.v.size());
  const std::vector<double> gd = g.to_dense();
  MomentumState next{std::vector<double>(theta.size())};
  ParamVector out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double gi = gd[i];
    const double vi = gamma * state.v[i] + eta * gi;
    next.v[i] = vi;
    // Look-ahead momentum applied directly instead of re-evaluating the
    // gradient at a shifted point.
    out[i] = theta[i] - (gamma * vi + eta * gi);
  }
  return {std::move(next), std::move(out)};
}

std::pair<AdagradState, ParamVector> adagrad_step(const AdagradState& state,
                                                  const ParamVector& theta,
                                                  const GradientSample& g,
                                                  double eta, double epsilon) {
  check_eta(eta);
  check_epsilon(epsilon);
  check_dims(theta.size(), g.dim(), state.g2_sum.size());
  const std::vector<double> gd = g.to_dense();
  AdagradState next{std::vector<double>(theta.size())};
  ParamVector out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double gi = gd[i];
    const double acc = state.g2_sum[i] + gi * gi;
    next.g2_sum[i] = acc;
    out[i] = theta[i] - eta * gi / std::sqrt(acc + epsilon);
  }
  return {std::move(next), std::move(out)};
}

std::pair<AdadeltaState, ParamVector> adadelta_step(const AdadeltaState& state,
                                                    const ParamVector& theta,
                                                    const GradientSample& g,
                                                    double gamma,
                                                    double epsilon) {
  check_decay(gamma, "gamma");
  check_epsilon(epsilon);
  check_dims(theta.size(), g.dim(), state.eg2.size());
  if (state.edx2.size() != state.eg2.size()) {
    throw ConfigError("adadelta state accumulators have mismatched sizes");
  }
  const std::vector<double> gd = g.to_dense();
  AdadeltaState next{std::vector<double>(theta.size()),
                     std::vector<double>(theta.size())};
  ParamVector out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double gi = gd[i];
    const double eg2 = gamma * state.eg2[i] + (1.0 - gamma) * (gi * gi);
    // RMS[dx] of the previous step over RMS[g] of this one; no learning rate.
    const double dx = -(std::sqrt(state.edx2[i] + epsilon) /
                        std::sqrt(eg2 + epsilon)) *
                      gi;
    next.eg2[i] = eg2;
    next.edx2[i] = gamma * state.edx2[i] + (1.0 - gamma) * (dx * dx);
    out[i] = theta[i] + dx;
  }
  return {std::move(next), std::move(out)};
}

std::pair<RmspropState, ParamVector> rmsprop_step(const RmspropState& state,
                                                  const ParamVector& theta,
                                                  const GradientSample& g,
                                                  double eta, double gamma,
                                                  double epsilon) {
  check_eta(eta);
  check_decay(gamma, "gamma");
  check_epsilon(epsilon);
  check_dims(theta.size(), g.dim(), state.eg2.size());
  const std::vector<double> gd = g.to_dense();
  RmspropState next{std::vector<double>(theta.size())};
  ParamVector out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double gi = gd[i];
    const double eg2 = gamma * state.eg2[i] + (1.0 - gamma) * (gi * gi);
    next.eg2[i] = eg2;
    out[i] = theta[i] - eta * gi / std::sqrt(eg2 + epsilon);
  }
  return {std::move(next), std::move(out)};
}

std::pair<AdamState, ParamVector> adam_step(const AdamState& state,
                                            const ParamVector& theta,
                                            const GradientSample& g,
                                            double eta, double beta1,
                                            double beta2, double epsilon) {
  check_eta(eta);
  check_decay(beta1, "beta1");
  check_decay(beta2, "beta2");
  check_epsilon(epsilon);
  check_dims(theta.size(), g.dim(), state.m.size());
  const std::vector<double> gd = g.to_dense();
  const double t = static_cast<double>(state.t + 1);
  const double bc1 = 1.0 - std::pow(beta1, t);
  const double bc2 = 1.0 - std::pow(beta2, t);
  AdamState next{state.t + 1, std::vector<double>(theta.size()),
                 std::vector<double>(theta.size())};
  ParamVector out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double gi = gd[i];
    const double mi = beta1 * state.m[i] + (1.0 - beta1) * gi;
    const double vi = beta2 * state.v[i] + (1.0 - beta2) * (gi * gi);
    next.m[i] = mi;
    next.v[i] = vi;
    const double mhat = mi / bc1;
    const double vhat = vi / bc2;
    // epsilon outside the square root, unlike adagrad/rmsprop.
    out[i] = theta[i] - eta * mhat / (std::sqrt(vhat) + epsilon);
  }
  return {std::move(next), std::move(out)};
}

std::pair<AdamaxState, ParamVector> adamax_step(const AdamaxState& state,
                                                const ParamVector& theta,
                                                const GradientSample& g,
                                                double eta, double beta1,
                                                double beta2) {
  check_eta(eta);
  check_decay(beta1, "beta1");
  check_decay(beta2, "beta2");
  check_dims(theta.size(), g.dim(), state.m.size());
  const std::vector<double> gd = g.to_dense();
  const double t = static_cast<double>(state.t + 1);
  const double bc1 = 1.0 - std::pow(beta1, t);
  AdamaxState next{state.t + 1, std::vector<double>(theta.size()),
                   std::vector<double>(theta.size())};
  ParamVector out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double gi = gd[i];
    const double mi = beta1 * state.m[i] + (1.0 - beta1) * gi;
    const double ui = std::max(beta2 * state.u[i], std::fabs(gi));
    next.m[i] = mi;
    next.u[i] = ui;
    if (ui == 0.0) {
      // All past gradients on this coordinate were zero, hence m_i = 0 too;
      // 0/0 resolves to no movement.
      out[i] = theta[i];
      continue;
    }
    const double mhat = mi / bc1;
    out[i] = theta[i] - eta * mhat / ui;
  }
  return {std::move(next), std::move(out)};
}

std::pair<NadamState, ParamVector> nadam_step(const NadamState& state,
                                              const ParamVector& theta,
                                              const GradientSample& g,
                                              double eta, double beta1,
                                              double beta2, double epsilon) {
  check_eta(eta);
  check_decay(beta1, "beta1");
  check_decay(beta2, "beta2");
  check_epsilon(epsilon);
  check_dims(theta.size(), g.dim(), state.m.size());
  const std::vector<double> gd = g.to_dense();
  const double t = static_cast<double>(state.t + 1);
  const double bc1 = 1.0 - std::pow(beta1, t);
  const double bc2 = 1.0 - std::pow(beta2, t);
  NadamState next{state.t + 1, std::vector<double>(theta.size()),
                  std::vector<double>(theta.size())};
  ParamVector out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double gi = gd[i];
    const double mi = beta1 * state.m[i] + (1.0 - beta1) * gi;
    const double vi = beta2 * state.v[i] + (1.0 - beta2) * (gi * gi);
    next.m[i] = mi;
    next.v[i] = vi;
    const double mhat = mi / bc1;
    const double vhat = vi / bc2;
    // Momentum look-ahead folded into the bias-corrected direction.
    const double inner = beta1 * mhat + (1.0 - beta1) * gi / bc1;
    out[i] = theta[i] - eta * inner / (std::sqrt(vhat) + epsilon);
  }
  return {std::move(next), std::move(out)};
}

Optimizer::Optimizer(OptimizerKind kind, std::size_t dim,
                     const HyperParams& hp)
    : kind_(kind), dim_(dim), hp_(hp) {
  if (dim == 0) throw ConfigError("optimizer dimension must be positive");
  switch (kind_) {
    case OptimizerKind::kSgd:
      state_ = std::monostate{};
      break;
    case OptimizerKind::kMomentum:
    case OptimizerKind::kNag:
    case OptimizerKind::kNagModified:
      state_ = MomentumState::zero(dim);
      break;
    case OptimizerKind::kAdagrad:
      state_ = AdagradState::zero(dim);
      break;
    case OptimizerKind::kAdadelta:
      state_ = AdadeltaState::zero(dim);
      break;
    case OptimizerKind::kRmsprop:
      state_ = RmspropState::zero(dim);
      break;
    case OptimizerKind::kAdam:
      state_ = AdamState::zero(dim);
      break;
    case OptimizerKind::kAdamax:
      state_ = AdamaxState::zero(dim);
      break;
    case OptimizerKind::kNadam:
      state_ = NadamState::zero(dim);
      break;
  }
}

Optimizer Optimizer::by_name(std::string_view name, std::size_t dim) {
  const OptimizerKind kind = optimizer_kind_from_name(name);
  return Optimizer(kind, dim, default_hyper_params(kind));
}

Optimizer Optimizer::by_name(std::string_view name, std::size_t dim,
                             const HyperParams& hp) {
  return Optimizer(optimizer_kind_from_name(name), dim, hp);
}

std::string_view Optimizer::name() const noexcept {
  return optimizer_name(kind_);
}

void Optimizer::step(ParamVector& theta, const GradFn& grad_fn, double eta) {
  if (theta.size() != dim_) {
    throw ConfigError("theta dimension does not match optimizer dimension");
  }
  switch (kind_) {
    case OptimizerKind::kSgd: {
      theta = sgd_step(theta, grad_fn(theta), eta);
      return;
    }
    case OptimizerKind::kMomentum: {
      auto [s, th] = momentum_step(std::get<MomentumState>(state_), theta,
                                   grad_fn(theta), eta, hp_.gamma);
      state_ = std::move(s);
      theta = std::move(th);
      return;
    }
    case OptimizerKind::kNag: {
      auto [s, th] = nag_step(std::get<MomentumState>(state_), theta, grad_fn,
                              eta, hp_.gamma);
      state_ = std::move(s);
      theta = std::move(th);
      return;
    }
    case OptimizerKind::kNagModified: {
      auto [s, th] = nag_modified_step(std::get<MomentumState>(state_), theta,
                                       grad_fn(theta), eta, hp_.gamma);
      state_ = std::move(s);
      theta = std::move(th);
      return;
    }
    case OptimizerKind::kAdagrad: {
      auto [s, th] = adagrad_step(std::get<AdagradState>(state_), theta,
                                  grad_fn(theta), eta, hp_.epsilon);
      state_ = std::move(s);
      theta = std::move(th);
      return;
    }
    case OptimizerKind::kAdadelta: {
      // No learning rate: the scheduled eta is ignored by construction.
      auto [s, th] = adadelta_step(std::get<AdadeltaState>(state_), theta,
                                   grad_fn(theta), hp_.gamma, hp_.epsilon);
      state_ = std::move(s);
      theta = std::move(th);
      return;
    }
    case OptimizerKind::kRmsprop: {
      auto [s, th] = rmsprop_step(std::get<RmspropState>(state_), theta,
                                  grad_fn(theta), eta, hp_.gamma, hp_.epsilon);
      state_ = std::move(s);
      theta = std::move(th);
      return;
    }
    case OptimizerKind::kAdam: {
      auto [s, th] = adam_step(std::get<AdamState>(state_), theta,
                               grad_fn(theta), eta, hp_.beta1, hp_.beta2,
                               hp_.epsilon);
      state_ = std::move(s);
      theta = std::move(th);
      return;
    }
    case OptimizerKind::kAdamax: {
      auto [s, th] = adamax_step(std::get<AdamaxState>(state_), theta,
                                 grad_fn(theta), eta, hp_.beta1, hp_.beta2);
      state_ = std::move(s);
      theta = std::move(th);
      return;
    }
    case OptimizerKind::kNadam: {
      auto [s, th] = nadam_step(std::get<NadamState>(state_), theta,
                                grad_fn(theta), eta, hp_.beta1, hp_.beta2,
                                hp_.epsilon);
      state_ = std::move(s);
      theta = std::move(th);
      return;
    }
  }
  throw ConfigError("unhandled optimizer kind");
}

void Optimizer::step(ParamVector& theta, const GradFn& grad_fn) {
  step(theta, grad_fn, hp_.eta);
}

const std::vector<std::string>& optimizer_names() {
  static const std::vector<std::string> names = {
      "sgd",      "momentum", "nag",  "nag-mod", "adagrad",
      "adadelta", "rmsprop",  "adam", "adamax",  "nadam"};
  return names;
}

OptimizerKind optimizer_kind_from_name(std::string_view name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "momentum") return OptimizerKind::kMomentum;
  if (name == "nag") return OptimizerKind::kNag;
  if (name == "nag-mod") return OptimizerKind::kNagModified;
  if (name == "adagrad") return OptimizerKind::kAdagrad;
  if (name == "adadelta") return OptimizerKind::kAdadelta;
  if (name == "rmsprop") return OptimizerKind::kRmsprop;
  if (name == "adam") return OptimizerKind::kAdam;
  if (name == "adamax") return OptimizerKind::kAdamax;
  if (name == "nadam") return OptimizerKind::kNadam;
  std::string msg = "unknown optimizer name: " + std::string(name) +
                    " (valid:";
  for (const std::string& n : optimizer_names()) msg += " " + n;
  throw UsageError(msg + ")");
}

std::string_view optimizer_name(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::kSgd: return "sgd";
    case OptimizerKind::kMomentum: return "momentum";
    case OptimizerKind::kNag: return "nag";
    case OptimizerKind::kNagModified: return "nag-mod";
    case OptimizerKind::kAdagrad: return "adagrad";
    case OptimizerKind::kAdadelta: return "adadelta";
    case OptimizerKind::kRmsprop: return "rmsprop";
    case OptimizerKind::kAdam: return "adam";
    case OptimizerKind::kAdamax: return "adamax";
    case OptimizerKind::kNadam: return "nadam";
  }
  throw ConfigError("unhandled optimizer kind");
}

}  // namespace gradbench
