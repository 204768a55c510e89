#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <iostream>
#include <sstream>
#include <vector>

#include <omp.h>

#include "gradbench/errors.hpp"
#include "gradbench/parallel.hpp"
#include "gradbench/problems.hpp"

using namespace gradbench;

TEST_CASE("shared params read back what they were built from") {
  SharedParams p(ParamVector{1.0, -2.0, 3.0});
  CHECK(p.dim() == 3);
  CHECK(p.read(0) == 1.0);
  CHECK(p.read(1) == -2.0);
  p.add(1, 0.5);
  CHECK(p.read(1) == -1.5);
  CHECK(p.snapshot() == ParamVector{1.0, -1.5, 3.0});
}

TEST_CASE("concurrent adds never lose an update") {
  // Integer-valued increments make floating-point addition associative, so
  // the only way to miss the total is a lost update.
  SharedParams p(ParamVector{0.0});
  const int threads = 4;
  const int per_thread = 20000;
#pragma omp parallel for num_threads(threads) schedule(static)
  for (int w = 0; w < threads; ++w) {
    for (int i = 0; i < per_thread; ++i) p.add(0, 1.0);
  }
  CHECK(p.read(0) == static_cast<double>(threads * per_thread));
}

TEST_CASE("single-worker hogwild is bit-identical to the serial baseline") {
  const SparseLogReg problem = SparseLogReg::make(500, 50, 0.05, 21);
  HogwildConfig cfg;
  cfg.workers = 1;
  cfg.eta = 0.1;
  cfg.epochs = 3;
  cfg.seed = 9;
  const HogwildResult par = hogwild_train(problem, cfg);
  const HogwildResult ser = sequential_baseline(problem, 0.1, 3, 9);
  REQUIRE(par.params.size() == ser.params.size());
  for (std::size_t i = 0; i < par.params.size(); ++i) {
    CHECK(par.params[i] == ser.params[i]);
  }
  CHECK(par.final_loss == ser.final_loss);
  REQUIRE(par.epoch_losses.size() == 3);
  CHECK(par.epoch_losses == ser.epoch_losses);
}

TEST_CASE("zero epochs returns the untouched start point") {
  const SparseLogReg problem = SparseLogReg::make(100, 20, 0.1, 2);
  HogwildConfig cfg;
  cfg.workers = 2;
  cfg.epochs = 0;
  cfg.eta = 0.1;
  const HogwildResult r = hogwild_train(problem, cfg);
  CHECK(r.params == ParamVector(problem.dim(), 0.0));
  CHECK(r.epoch_losses.empty());
  CHECK(r.final_loss ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("training reduces the loss from the log-two start") {
  const SparseLogReg problem = SparseLogReg::make(2000, 200, 0.02, 33);
  HogwildConfig cfg;
  cfg.workers = 4;
  cfg.eta = 0.1;
  cfg.epochs = 3;
  cfg.seed = 33;
  const HogwildResult r = hogwild_train(problem, cfg);
  CHECK(r.final_loss < 0.9 * std::log(2.0));
  REQUIRE(r.epoch_losses.size() == 3);
  CHECK(r.epoch_losses.back() == r.final_loss);
}

TEST_CASE("near-dense data with several workers warns about contention") {
  const SparseLogReg dense_problem = SparseLogReg::make(50, 4, 1.0, 4);
  REQUIRE(dense_problem.density() >= 0.5);
  HogwildConfig cfg;
  cfg.workers = 2;
  cfg.eta = 0.05;
  cfg.epochs = 1;

  std::ostringstream captured;
  std::streambuf* old = std::cerr.rdbuf(captured.rdbuf());
  hogwild_train(dense_problem, cfg);
  std::cerr.rdbuf(old);
  CHECK(captured.str().find("dense") != std::string::npos);

  // A single worker on the same data stays quiet.
  cfg.workers = 1;
  std::ostringstream quiet;
  old = std::cerr.rdbuf(quiet.rdbuf());
  hogwild_train(dense_problem, cfg);
  std::cerr.rdbuf(old);
  CHECK(quiet.str().empty());
}

TEST_CASE("worker draw counts cover the dataset exactly per epoch") {
  // n = 10 over 4 workers: 3 + 3 + 2 + 2 draws.
  const std::size_t n = 10;
  const int workers = 4;
  std::size_t total = 0;
  for (int w = 0; w < workers; ++w) {
    total += n / workers + (static_cast<std::size_t>(w) < n % workers ? 1 : 0);
  }
  CHECK(total == n);
}

TEST_CASE("hogwild config validation") {
  const SparseLogReg problem = SparseLogReg::make(50, 10, 0.2, 1);
  HogwildConfig cfg;
  cfg.workers = 0;
  CHECK_THROWS_AS(hogwild_train(problem, cfg), ConfigError);
  cfg.workers = 1;
  cfg.eta = 0.0;
  CHECK_THROWS_AS(hogwild_train(problem, cfg), ConfigError);
  cfg.eta = 0.1;
  cfg.epochs = -1;
  CHECK_THROWS_AS(hogwild_train(problem, cfg), ConfigError);
}

TEST_CASE("sequential baseline is deterministic") {
  const SparseLogReg problem = SparseLogReg::make(300, 40, 0.1, 6);
  const HogwildResult a = sequential_baseline(problem, 0.2, 2, 5);
  const HogwildResult b = sequential_baseline(problem, 0.2, 2, 5);
  CHECK(a.params == b.params);
  CHECK(a.final_loss == b.final_loss);
}
