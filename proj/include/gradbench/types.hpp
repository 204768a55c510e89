#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gradbench/errors.hpp"

namespace gradbench {

using ParamVector = std::vector<double>;

// One nonzero coordinate of a sparse vector.
struct SparseEntry {
  std::size_t index = 0;
  double value = 0.0;
};

// A gradient observation, dense or sparse. Construction validates finiteness
// of every stored value (the per-step numeric contract lives here, so no code
// path can feed NaN/inf into an optimizer) and, for sparse samples, that
// indices are strictly increasing and inside [0, dim).
class GradientSample {
 public:
  static GradientSample dense(std::vector<double> values);
  static GradientSample sparse(std::size_t dim, std::vector<SparseEntry> entries);

  bool is_sparse() const noexcept { return sparse_; }
  std::size_t dim() const noexcept { return dim_; }

  // Dense storage accessor; only valid when !is_sparse().
  const std::vector<double>& dense_values() const;
  // Sparse storage accessor; only valid when is_sparse().
  const std::vector<SparseEntry>& entries() const;

  // Number of explicitly stored coordinates (dim for dense, nnz for sparse).
  std::size_t stored_count() const noexcept;

  std::vector<double> to_dense() const;

  // Calls f(index, value) for every stored coordinate, in index order.
  template <class F>
  void for_each_stored(F&& f) const {
    if (sparse_) {
      for (const SparseEntry& e : entries_) f(e.index, e.value);
    } else {
      for (std::size_t i = 0; i < values_.size(); ++i) f(i, values_[i]);
    }
  }

 private:
  GradientSample() = default;
  bool sparse_ = false;
  std::size_t dim_ = 0;
  std::vector<double> values_;      // dense storage
  std::vector<SparseEntry> entries_;  // sparse storage
};

using GradFn = std::function<GradientSample(const ParamVector&)>;

// A differentiable objective. Analytic surfaces have n_examples() == 0 and
// only support full-gradient access; data-backed objectives expose
// per-example subsets for stochastic and mini-batch training.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dim() const = 0;
  virtual double value(const ParamVector& theta) const = 0;
  virtual GradientSample grad(const ParamVector& theta) const = 0;

  // Number of training examples; 0 means the objective is a closed-form
  // surface with no example structure.
  virtual std::size_t n_examples() const { return 0; }

  // Mean loss / gradient over a subset of examples. Defaults reject use.
  virtual double value_on(const ParamVector& theta,
                          std::span<const std::size_t> examples) const;
  virtual GradientSample grad_on(const ParamVector& theta,
                                 std::span<const std::size_t> examples) const;

  // Signal monitored by early stopping. Defaults to the objective itself;
  // data-backed objectives may override with a held-out set.
  virtual double validation_value(const ParamVector& theta) const {
    return value(theta);
  }

  // Default starting point for minimization runs that do not supply one.
  virtual ParamVector initial_point() const { return ParamVector(dim(), 0.0); }
};

// One recorded point of an optimization run.
struct TrajectoryEntry {
  long step = 0;          // 0 is the initial point, before any update
  ParamVector theta;
  double loss = 0.0;
};

struct Trajectory {
  std::string optimizer_name;
  std::vector<TrajectoryEntry> entries;

  const TrajectoryEntry& front() const { return entries.front(); }
  const TrajectoryEntry& back() const { return entries.back(); }
  std::size_t size() const noexcept { return entries.size(); }
};

enum class BatchPolicyKind { kFull, kSingle, kMiniBatch };

struct BatchPolicy {
  static constexpr std::size_t kDefaultBatchSize = 50;

  BatchPolicyKind kind = BatchPolicyKind::kFull;
  std::size_t batch_size = kDefaultBatchSize;  // used by kMiniBatch only

  static BatchPolicy full() { return {BatchPolicyKind::kFull, 0}; }
  static BatchPolicy single() { return {BatchPolicyKind::kSingle, 1}; }
  static BatchPolicy mini_batch(std::size_t n = kDefaultBatchSize) {
    return {BatchPolicyKind::kMiniBatch, n};
  }
};

// Knobs shared by every minimization run.
struct RunConfig {
  double learning_rate = 0.01;  // base rate handed to the schedule
  long max_steps = 1000;
  std::uint64_t seed = 0;
  BatchPolicy batch_policy = BatchPolicy::full();
  long record_every = 1;  // trajectory granularity; final step always kept
};

// Throws NumericError naming the first offending coordinate.
void ensure_finite(const ParamVector& v, const char* what);

// Deterministic 64-bit stream splitting (splitmix64 finalizer). Used to
// derive independent RNG seeds from (seed, index) pairs.
std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b);
std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c);

}  // namespace gradbench
