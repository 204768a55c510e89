#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "gradbench/problems.hpp"
#include "gradbench/types.hpp"

namespace gradbench {

// Shared parameter vector for lock-free training. Per-coordinate atomic
// read and add are the entire synchronization surface: no cell can hold a
// torn value, but readers may observe arbitrarily stale mixtures across
// coordinates (tolerated by design).
class SharedParams {
 public:
  explicit SharedParams(const ParamVector& init);

  std::size_t dim() const noexcept { return dim_; }
  double read(std::size_t i) const noexcept {
    return cells_[i].load(std::memory_order_relaxed);
  }
  void add(std::size_t i, double delta) noexcept {
    cells_[i].fetch_add(delta, std::memory_order_relaxed);
  }
  // Coordinate-wise atomic reads; not a consistent cross-coordinate snapshot.
  ParamVector snapshot() const;

 private:
  std::size_t dim_;
  std::unique_ptr<std::atomic<double>[]> cells_;
};

struct HogwildConfig {
  int workers = 1;
  double eta = 0.1;
  int epochs = 1;
  std::uint64_t seed = 0;
};

struct HogwildResult {
  ParamVector params;
  double final_loss = 0.0;
  std::vector<double> epoch_losses;  // full-dataset loss at each epoch join
};

// Lock-free parallel SGD: W workers each draw examples with replacement from
// their own seeded streams (seed, worker, epoch), compute the sparse
// per-example log-loss gradient against possibly stale shared reads, and
// apply -eta*g_j with per-coordinate atomic adds. The epoch join is the only
// barrier. Only plain SGD runs here: adaptive optimizers carry dense shared
// state that voids the sparsity argument. A mostly-dense dataset with
// workers > 1 emits a warning to stderr and proceeds.
HogwildResult hogwild_train(const SparseLogReg& problem,
                            const HogwildConfig& config);

// Same sampling scheme, one worker, plain (non-atomic) parameter vector.
// Bit-identical to hogwild_train with workers = 1 by construction; the
// comparator for the parallel acceptance tests.
HogwildResult sequential_baseline(const SparseLogReg& problem, double eta,
                                  int epochs, std::uint64_t seed);

}  // namespace gradbench
