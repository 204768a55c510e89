#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "gradbench/errors.hpp"
#include "gradbench/optimizers.hpp"

using namespace gradbench;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t d,
                               double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(d);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("sgd worked examples") {
  ParamVector out = sgd_step({1.0, 2.0}, GradientSample::dense({0.5, -1.0}),
                             0.1);
  CHECK(out[0] == doctest::Approx(0.95).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(2.1).epsilon(1e-15));

  out = sgd_step({1.0, 2.0}, GradientSample::dense({0.0, 0.0}), 0.1);
  CHECK(out == ParamVector{1.0, 2.0});

  out = sgd_step({0.0, 0.0, 0.0, 0.0},
                 GradientSample::sparse(4, {{2, 1.0}}), 0.5);
  CHECK(out == ParamVector{0.0, 0.0, -0.5, 0.0});
}

TEST_CASE("momentum hand-unrolled recurrence") {
  MomentumState s = MomentumState::zero(1);
  ParamVector theta{1.0};
  std::tie(s, theta) =
      momentum_step(s, theta, GradientSample::dense({1.0}), 0.1, 0.9);
  CHECK(s.v[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(theta[0] == doctest::Approx(0.9).epsilon(1e-15));
  std::tie(s, theta) =
      momentum_step(s, theta, GradientSample::dense({1.0}), 0.1, 0.9);
  CHECK(s.v[0] == doctest::Approx(0.19).epsilon(1e-15));
  CHECK(theta[0] == doctest::Approx(0.71).epsilon(1e-15));
}

TEST_CASE("momentum terminal velocity under constant gradient") {
  // v_t -> eta * g / (1 - gamma) = 0.1 / 0.1 = 1.
  MomentumState s = MomentumState::zero(1);
  ParamVector theta{0.0};
  for (int t = 0; t < 400; ++t) {
    std::tie(s, theta) =
        momentum_step(s, theta, GradientSample::dense({1.0}), 0.1, 0.9);
  }
  CHECK(s.v[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("momentum with zero gamma reduces to sgd exactly") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(rng() % 5);
    const ParamVector theta = random_vec(rng, d);
    const std::vector<double> g = random_vec(rng, d);
    const double eta = 0.001 + 0.5 * (static_cast<double>(rng() % 1000) / 1000.0);
    MomentumState s = MomentumState::zero(d);
    auto [s2, a] = momentum_step(s, theta, GradientSample::dense(g), eta, 0.0);
    const ParamVector b = sgd_step(theta, GradientSample::dense(g), eta);
    CHECK(a == b);
  }
}

TEST_CASE("nag worked example on a quadratic") {
  // f = theta^2/2, gradient is the identity; look-ahead 1 - 0.45 = 0.55.
  MomentumState s;
  s.v = {0.5};
  auto grad_fn = [](const ParamVector& p) {
    return GradientSample::dense({p[0]});
  };
  auto [s2, theta] = nag_step(s, {1.0}, grad_fn, 0.1, 0.9);
  CHECK(s2.v[0] == doctest::Approx(0.505).epsilon(1e-15));
  CHECK(theta[0] == doctest::Approx(0.495).epsilon(1e-15));
}

TEST_CASE("nag first step with zero velocity equals sgd") {
  MomentumState s = MomentumState::zero(2);
  auto grad_fn = [](const ParamVector& p) {
    return GradientSample::dense({2.0 * p[0], -p[1]});
  };
  auto [s2, a] = nag_step(s, {1.0, 3.0}, grad_fn, 0.1, 0.9);
  const ParamVector b =
      sgd_step({1.0, 3.0}, grad_fn(ParamVector{1.0, 3.0}), 0.1);
  CHECK(a == b);
}

TEST_CASE("nag with zero gamma tracks sgd for all steps") {
  std::mt19937_64 rng(12);
  auto grad_fn = [](const ParamVector& p) {
    std::vector<double> g(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) g[i] = std::sin(p[i]) + p[i];
    return GradientSample::dense(std::move(g));
  };
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(rng() % 4);
    ParamVector a = random_vec(rng, d);
    ParamVector b = a;
    MomentumState s = MomentumState::zero(d);
    for (int t = 0; t < 10; ++t) {
      auto [s2, a2] = nag_step(s, a, grad_fn, 0.05, 0.0);
      s = std::move(s2);
      a = std::move(a2);
      b = sgd_step(b, grad_fn(b), 0.05);
      CHECK(a == b);
    }
  }
}

TEST_CASE("modified nag worked examples") {
  MomentumState s = MomentumState::zero(1);
  auto [s1, theta1] =
      nag_modified_step(s, {0.0}, GradientSample::dense({1.0}), 0.1, 0.9);
  CHECK(s1.v[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(theta1[0] == doctest::Approx(-0.19).epsilon(1e-14));

  MomentumState coast;
  coast.v = {1.0};
  auto [s2, theta2] =
      nag_modified_step(coast, {0.0}, GradientSample::dense({0.0}), 0.1, 0.9);
  CHECK(theta2[0] == doctest::Approx(-0.81).epsilon(1e-14));
}

TEST_CASE("modified nag with zero gamma reduces to sgd") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(rng() % 5);
    const ParamVector theta = random_vec(rng, d);
    const std::vector<double> g = random_vec(rng, d);
    MomentumState s = MomentumState::zero(d);
    auto [s2, a] =
        nag_modified_step(s, theta, GradientSample::dense(g), 0.1, 0.0);
    const ParamVector b = sgd_step(theta, GradientSample::dense(g), 0.1);
    CHECK(a == b);
  }
}

TEST_CASE("adagrad first step and accumulation sparsity") {
  AdagradState s = AdagradState::zero(2);
  auto [s2, theta] = adagrad_step(s, {0.0, 5.0},
                                  GradientSample::dense({3.0, 0.0}), 0.01,
                                  1e-8);
  CHECK(theta[0] == -0.01 * 3.0 / std::sqrt(9.0 + 1e-8));
  CHECK(theta[0] == doctest::Approx(-0.01).epsilon(1e-8));
  // A zero-gradient coordinate neither moves nor accumulates.
  CHECK(theta[1] == 5.0);
  CHECK(s2.g2_sum[1] == 0.0);
  CHECK(s2.g2_sum[0] == 9.0);
}

TEST_CASE("adagrad constant-gradient step magnitude decays like 1/sqrt(t)") {
  AdagradState s = AdagradState::zero(1);
  ParamVector theta{0.0};
  const double g = 2.0;
  for (int t = 1; t <= 50; ++t) {
    const double before = theta[0];
    std::tie(s, theta) =
        adagrad_step(s, theta, GradientSample::dense({g}), 0.01, 1e-8);
    const double step = std::abs(theta[0] - before);
    const double expected = 0.01 * g / std::sqrt(t * g * g + 1e-8);
    CHECK(step == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("adagrad effective rate is non-increasing per coordinate") {
  std::mt19937_64 rng(14);
  for (int stream = 0; stream < 100; ++stream) {
    AdagradState s = AdagradState::zero(3);
    ParamVector theta{0.0, 0.0, 0.0};
    std::vector<double> prev_rate(3, std::numeric_limits<double>::infinity());
    for (int t = 0; t < 1000; ++t) {
      std::tie(s, theta) = adagrad_step(
          s, theta, GradientSample::dense(random_vec(rng, 3)), 0.01, 1e-8);
      for (int i = 0; i < 3; ++i) {
        const double rate = 0.01 / std::sqrt(s.g2_sum[i] + 1e-8);
        CHECK(rate <= prev_rate[i]);
        prev_rate[i] = rate;
      }
    }
  }
}

TEST_CASE("adadelta first step from zero accumulators") {
  AdadeltaState s = AdadeltaState::zero(1);
  auto [s2, theta] =
      adadelta_step(s, {0.0}, GradientSample::dense({1.0}), 0.9, 1e-6);
  // Expected value mirrors the update's own expression shape so the
  // comparison is bit-exact: the accumulator is (1-gamma)*g^2, not a
  // decimal literal.
  const double expected =
      -(std::sqrt(0.0 + 1e-6) / std::sqrt((1.0 - 0.9) * (1.0 * 1.0) + 1e-6)) *
      1.0;
  CHECK(theta[0] == expected);
  CHECK(theta[0] == doctest::Approx(-3.1623e-3).epsilon(1e-4));
  CHECK(s2.eg2[0] == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("adadelta zero gradient decays accumulators and leaves theta") {
  AdadeltaState s;
  s.eg2 = {1.0};
  s.edx2 = {0.5};
  auto [s2, theta] =
      adadelta_step(s, {3.0}, GradientSample::dense({0.0}), 0.9, 1e-6);
  CHECK(theta[0] == 3.0);
  CHECK(s2.eg2[0] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(s2.edx2[0] == doctest::Approx(0.45).epsilon(1e-15));
}

TEST_CASE("adadelta update opposes the gradient elementwise") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 200; ++trial) {
    AdadeltaState s;
    s.eg2 = {std::abs(random_vec(rng, 1)[0])};
    s.edx2 = {std::abs(random_vec(rng, 1)[0])};
    const double g = random_vec(rng, 1)[0];
    if (g == 0.0) continue;
    auto [s2, theta] =
        adadelta_step(s, {0.0}, GradientSample::dense({g}), 0.9, 1e-6);
    CHECK(theta[0] * g < 0.0);
  }
}

TEST_CASE("adadelta output ignores every learning-rate setting") {
  // The step signature has no rate parameter; the wrapper must agree.
  HyperParams a = default_hyper_params(OptimizerKind::kAdadelta);
  HyperParams b = a;
  b.eta = 123.0;
  Optimizer oa = Optimizer::by_name("adadelta", 2, a);
  Optimizer ob = Optimizer::by_name("adadelta", 2, b);
  ParamVector ta{1.0, -2.0};
  ParamVector tb{1.0, -2.0};
  auto grad_fn = [](const ParamVector& p) {
    return GradientSample::dense({p[0], 2.0 * p[1]});
  };
  for (int t = 0; t < 25; ++t) {
    oa.step(ta, grad_fn);
    ob.step(tb, grad_fn);
    CHECK(ta == tb);
  }
}

TEST_CASE("rmsprop first step and zero-gradient fixpoint") {
  RmspropState s = RmspropState::zero(1);
  auto [s2, theta] =
      rmsprop_step(s, {0.0}, GradientSample::dense({2.0}), 0.001, 0.9, 1e-8);
  CHECK(theta[0] ==
        -0.001 * 2.0 / std::sqrt((1.0 - 0.9) * (2.0 * 2.0) + 1e-8));
  CHECK(theta[0] == doctest::Approx(-3.1623e-3).epsilon(1e-4));

  auto [s3, theta3] =
      rmsprop_step(s, {7.0}, GradientSample::dense({0.0}), 0.001, 0.9, 1e-8);
  CHECK(theta3[0] == 7.0);
}

TEST_CASE("rmsprop constant-gradient step magnitude approaches eta") {
  RmspropState s = RmspropState::zero(1);
  ParamVector theta{0.0};
  double step = 0.0;
  for (int t = 0; t < 400; ++t) {
    const double before = theta[0];
    std::tie(s, theta) =
        rmsprop_step(s, theta, GradientSample::dense({3.0}), 0.001, 0.9, 1e-8);
    step = std::abs(theta[0] - before);
  }
  CHECK(step == doctest::Approx(0.001).epsilon(1e-6));
}

TEST_CASE("adam worked first step and bias-corrected mean") {
  AdamState s = AdamState::zero(1);
  auto [s1, theta] = adam_step(s, {0.0}, GradientSample::dense({0.5}), 0.001,
                               0.9, 0.999, 1e-8);
  CHECK(theta[0] == -0.001 * 0.5 / (std::sqrt(0.25) + 1e-8));
  CHECK(theta[0] == doctest::Approx(-0.001).epsilon(1e-7));
  CHECK(s1.t == 1);

  // Constant gradient stream: the corrected first moment recovers g exactly.
  AdamState cs = AdamState::zero(2);
  ParamVector p{0.0, 0.0};
  const std::vector<double> g{0.7, -1.3};
  for (int t = 1; t <= 100; ++t) {
    std::tie(cs, p) =
        adam_step(cs, p, GradientSample::dense(g), 0.001, 0.9, 0.999, 1e-8);
    for (int i = 0; i < 2; ++i) {
      const double mhat = cs.m[i] / (1.0 - std::pow(0.9, t));
      CHECK(std::abs(mhat - g[i]) < 1e-12);
    }
  }
}

TEST_CASE("adam zero gradient from fresh state never moves") {
  AdamState s = AdamState::zero(1);
  ParamVector theta{2.5};
  for (int t = 0; t < 10; ++t) {
    std::tie(s, theta) = adam_step(s, theta, GradientSample::dense({0.0}),
                                   0.001, 0.9, 0.999, 1e-8);
    CHECK(theta[0] == 2.5);
  }
}

TEST_CASE("adamax first step is exactly a signed learning rate") {
  AdamaxState s = AdamaxState::zero(3);
  auto [s2, theta] = adamax_step(s, {0.0, 0.0, 0.0},
                                 GradientSample::dense({4.0, -0.01, 0.0}),
                                 0.002, 0.9, 0.999);
  CHECK(std::abs(theta[0] - (-0.002)) < 1e-12);
  CHECK(std::abs(theta[1] - 0.002) < 1e-12);
  CHECK(theta[2] == 0.0);  // zero-history coordinate is skipped
}

TEST_CASE("adamax accumulator dominates gradient magnitudes and decays") {
  AdamaxState s = AdamaxState::zero(1);
  std::mt19937_64 rng(16);
  ParamVector theta{0.0};
  for (int t = 0; t < 100; ++t) {
    const double g = random_vec(rng, 1)[0];
    std::tie(s, theta) = adamax_step(s, theta, GradientSample::dense({g}),
                                     0.002, 0.9, 0.999);
    CHECK(s.u[0] >= std::abs(g));
  }
  AdamaxState d;
  d.m = {0.0};
  d.u = {1.0};
  d.t = 5;
  auto [d2, td] =
      adamax_step(d, {0.0}, GradientSample::dense({0.0}), 0.002, 0.9, 0.999);
  CHECK(d2.u[0] == 0.999);
}

TEST_CASE("adamax accumulator equals brute-force decayed history max") {
  std::mt19937_64 rng(17);
  AdamaxState s = AdamaxState::zero(2);
  ParamVector theta{0.0, 0.0};
  std::vector<std::vector<double>> history;
  for (int t = 1; t <= 50; ++t) {
    const std::vector<double> g = random_vec(rng, 2);
    history.push_back(g);
    std::tie(s, theta) = adamax_step(s, theta, GradientSample::dense(g),
                                     0.002, 0.9, 0.999);
    for (int i = 0; i < 2; ++i) {
      double best = 0.0;
      for (int j = 0; j < t; ++j) {
        best = std::max(best,
                        std::pow(0.999, t - 1 - j) * std::abs(history[j][i]));
      }
      CHECK(s.u[i] == doctest::Approx(best).epsilon(1e-12));
    }
  }
}

TEST_CASE("nadam worked first step") {
  NadamState s = NadamState::zero(1);
  auto [s2, theta] = nadam_step(s, {0.0}, GradientSample::dense({1.0}), 0.001,
                                0.9, 0.999, 1e-8);
  // mhat = 1, vhat = 1, inner term 0.9 + 0.1/0.1 = 1.9.
  const double expected = 0.0 - 0.001 * 1.9 / (1.0 + 1e-8);
  CHECK(theta[0] == expected);
  CHECK(theta[0] == doctest::Approx(-0.0019).epsilon(1e-6));
}

TEST_CASE("nadam zero gradient from fresh state stays put") {
  NadamState s = NadamState::zero(1);
  auto [s2, theta] = nadam_step(s, {4.0}, GradientSample::dense({0.0}), 0.001,
                                0.9, 0.999, 1e-8);
  CHECK(theta[0] == 4.0);
}

TEST_CASE("nadam with zero beta1 matches adam with zero beta1 exactly") {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(rng() % 4);
    ParamVector ta = random_vec(rng, d);
    ParamVector tn = ta;
    AdamState sa = AdamState::zero(d);
    NadamState sn = NadamState::zero(d);
    for (int t = 0; t < 5; ++t) {
      const std::vector<double> g = random_vec(rng, d);
      auto [sa2, ta2] = adam_step(sa, ta, GradientSample::dense(g), 0.001,
                                  0.0, 0.999, 1e-8);
      auto [sn2, tn2] = nadam_step(sn, tn, GradientSample::dense(g), 0.001,
                                   0.0, 0.999, 1e-8);
      sa = std::move(sa2);
      sn = std::move(sn2);
      ta = std::move(ta2);
      tn = std::move(tn2);
      CHECK(ta == tn);
    }
  }
}

TEST_CASE("all steps preserve finiteness at extreme magnitudes") {
  const std::vector<double> magnitudes{1e-100, 1e100, -1e-100, -1e100};
  for (const std::string& name : optimizer_names()) {
    for (double m : magnitudes) {
      Optimizer opt = Optimizer::by_name(name, 2);
      ParamVector theta{m, 1.0};
      opt.step(theta, [&](const ParamVector&) {
        return GradientSample::dense({m, -m});
      });
      for (double x : theta) CHECK(std::isfinite(x));
    }
  }
}

TEST_CASE("steps are pure: identical inputs give identical outputs") {
  std::mt19937_64 rng(19);
  const ParamVector theta = random_vec(rng, 3);
  const std::vector<double> g = random_vec(rng, 3);
  for (const std::string& name : optimizer_names()) {
    HyperParams hp = default_hyper_params(optimizer_kind_from_name(name));
    Optimizer a = Optimizer::by_name(name, 3, hp);
    Optimizer b = Optimizer::by_name(name, 3, hp);
    ParamVector ta = theta;
    ParamVector tb = theta;
    auto grad_fn = [&](const ParamVector&) { return GradientSample::dense(g); };
    a.step(ta, grad_fn);
    b.step(tb, grad_fn);
    CHECK(ta == tb);
  }
}

TEST_CASE("hyperparameter defaults match the documented table") {
  HyperParams hp = default_hyper_params(OptimizerKind::kAdagrad);
  CHECK(hp.eta == 0.01);
  CHECK(hp.epsilon == 1e-8);
  hp = default_hyper_params(OptimizerKind::kRmsprop);
  CHECK(hp.eta == 0.001);
  CHECK(hp.gamma == 0.9);
  hp = default_hyper_params(OptimizerKind::kAdam);
  CHECK(hp.eta == 0.001);
  CHECK(hp.beta1 == 0.9);
  CHECK(hp.beta2 == 0.999);
  CHECK(hp.epsilon == 1e-8);
  hp = default_hyper_params(OptimizerKind::kAdamax);
  CHECK(hp.eta == 0.002);
  hp = default_hyper_params(OptimizerKind::kAdadelta);
  CHECK(hp.epsilon == 1e-6);
  hp = default_hyper_params(OptimizerKind::kMomentum);
  CHECK(hp.gamma == 0.9);
}

TEST_CASE("hyperparameter validation") {
  MomentumState s = MomentumState::zero(1);
  CHECK_THROWS_AS(
      momentum_step(s, {0.0}, GradientSample::dense({1.0}), 0.1, 1.0),
      ConfigError);
  CHECK_THROWS_AS(
      momentum_step(s, {0.0}, GradientSample::dense({1.0}), 0.1, -0.1),
      ConfigError);
  CHECK_THROWS_AS(
      momentum_step(s, {0.0}, GradientSample::dense({1.0}), 0.0, 0.9),
      ConfigError);
  AdagradState a = AdagradState::zero(1);
  CHECK_THROWS_AS(
      adagrad_step(a, {0.0}, GradientSample::dense({1.0}), 0.01, 0.0),
      ConfigError);
  CHECK_THROWS_AS(
      adagrad_step(a, {0.0, 1.0}, GradientSample::dense({1.0, 1.0}), 0.01,
                   1e-8),
      ConfigError);
}

TEST_CASE("optimizer names resolve in both directions") {
  for (const std::string& name : optimizer_names()) {
    CHECK(std::string(optimizer_name(optimizer_kind_from_name(name))) == name);
  }
  CHECK_THROWS_AS(optimizer_kind_from_name("adamw"), UsageError);
}
