#include "gradbench/parallel.hpp"

#include <cmath>
#include <iostream>
#include <random>

namespace gradbench {

namespace {

// 1 / (1 + exp(u)) without overflow.
double logistic_neg(double u) {
  if (u > 35.0) return std::exp(-u);
  return 1.0 / (1.0 + std::exp(u));
}

// One SGD update from one example. Reads and writes touch exactly the
// example's support coordinates. Params is either SharedParams (atomic) or a
// plain vector accessor; the arithmetic must stay expression-identical
// between the two so a single worker reproduces the sequential baseline bit
// for bit.
template <class Read, class Add>
void sparse_sgd_update(const SparseExample& ex, double eta, Read read,
                       Add add) {
  double z = 0.0;
  for (const SparseEntry& e : ex.features) z += e.value * read(e.index);
  const double y = static_cast<double>(ex.label);
  const double scale = -y * logistic_neg(y * z);
  for (const SparseEntry& e : ex.features) {
    add(e.index, -(eta * scale * e.value));
  }
}

void validate(const SparseLogReg& problem, int workers, double eta,
              int epochs) {
  if (workers < 1) throw ConfigError("worker count must be >= 1");
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ConfigError("learning rate must be a positive finite real");
  }
  if (epochs < 0) throw ConfigError("epoch count must be nonnegative");
  if (problem.n_examples() == 0) throw ConfigError("problem has no examples");
}

}  // namespace

SharedParams::SharedParams(const ParamVector& init)
    : dim_(init.size()),
      cells_(std::make_unique<std::atomic<double>[]>(init.size())) {
  for (std::size_t i = 0; i < dim_; ++i) {
    cells_[i].store(init[i], std::memory_order_relaxed);
  }
}

ParamVector SharedParams::snapshot() const {
  ParamVector out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) out[i] = read(i);
  return out;
}

HogwildResult hogwild_train(const SparseLogReg& problem,
                            const HogwildConfig& config) {
  validate(problem, config.workers, config.eta, config.epochs);
  if (config.workers > 1 && problem.density() >= 0.5) {
    std::cerr << "warning: dataset is mostly dense (density "
              << problem.density()
              << "); lock-free updates will collide and the convergence "
                 "guarantee is void\n";
  }

  SharedParams shared(ParamVector(problem.dim(), 0.0));
  const std::size_t n = problem.n_examples();
  const int workers = config.workers;
  HogwildResult result;
  result.epoch_losses.reserve(static_cast<std::size_t>(config.epochs));

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
// Worker hot path: no locks, no shared cursor; the loop end is the epoch
// join barrier.
#pragma omp parallel for num_threads(workers) schedule(static)
    for (int w = 0; w < workers; ++w) {
      std::mt19937_64 rng(seed_mix(config.seed, static_cast<std::uint64_t>(w),
                                   static_cast<std::uint64_t>(epoch)));
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      const std::size_t w_sz = static_cast<std::size_t>(w);
      const std::size_t draws =
          n / static_cast<std::size_t>(workers) +
          (w_sz < n % static_cast<std::size_t>(workers) ? 1 : 0);
      for (std::size_t k = 0; k < draws; ++k) {
        const SparseExample& ex = problem.examples()[pick(rng)];
        sparse_sgd_update(
            ex, config.eta, [&](std::size_t j) { return shared.read(j); },
            [&](std::size_t j, double delta) { shared.add(j, delta); });
      }
    }
    result.epoch_losses.push_back(problem.value(shared.snapshot()));
  }

  result.params = shared.snapshot();
  result.final_loss = problem.value(result.params);
  return result;
}

HogwildResult sequential_baseline(const SparseLogReg& problem, double eta,
                                  int epochs, std::uint64_t seed) {
  validate(problem, 1, eta, epochs);
  ParamVector theta(problem.dim(), 0.0);
  const std::size_t n = problem.n_examples();
  HogwildResult result;
  result.epoch_losses.reserve(static_cast<std::size_t>(epochs));

  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::mt19937_64 rng(
        seed_mix(seed, 0, static_cast<std::uint64_t>(epoch)));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t k = 0; k < n; ++k) {
      const SparseExample& ex = problem.examples()[pick(rng)];
      sparse_sgd_update(
          ex, eta, [&](std::size_t j) { return theta[j]; },
          [&](std::size_t j, double delta) { theta[j] += delta; });
    }
    result.epoch_losses.push_back(problem.value(theta));
  }

  result.params = std::move(theta);
  result.final_loss = problem.value(result.params);
  return result;
}

}  // namespace gradbench
