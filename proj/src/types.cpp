#include "gradbench/types.hpp"

#include <cmath>
#include <sstream>

namespace gradbench {

namespace {

void throw_non_finite(const char* what, std::size_t index, double value) {
  std::ostringstream os;
  os << what << " coordinate " << index << " is not finite ("
     << (std::isnan(value) ? "nan" : (value > 0 ? "+inf" : "-inf")) << ")";
  throw NumericError(os.str());
}

}  // namespace

GradientSample GradientSample::dense(std::vector<double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw_non_finite("gradient", i, values[i]);
  }
  GradientSample g;
  g.sparse_ = false;
  g.dim_ = values.size();
  g.values_ = std::move(values);
  return g;
}

GradientSample GradientSample::sparse(std::size_t dim,
                                      std::vector<SparseEntry> entries) {
  std::size_t prev = 0;
  bool first = true;
  for (const SparseEntry& e : entries) {
    if (e.index >= dim) {
      std::ostringstream os;
      os << "sparse gradient index " << e.index << " out of range for dim "
         << dim;
      throw ConfigError(os.str());
    }
    if (!first && e.index <= prev) {
      throw ConfigError("sparse gradient indices must be strictly increasing");
    }
    if (!std::isfinite(e.value)) throw_non_finite("gradient", e.index, e.value);
    prev = e.index;
    first = false;
  }
  GradientSample g;
  g.sparse_ = true;
  g.dim_ = dim;
  g.entries_ = std::move(entries);
  return g;
}

const std::vector<double>& GradientSample::dense_values() const {
  if (sparse_) throw ConfigError("dense_values() called on a sparse gradient");
  return values_;
}

const std::vector<SparseEntry>& GradientSample::entries() const {
  if (!sparse_) throw ConfigError("entries() called on a dense gradient");
  return entries_;
}

std::size_t GradientSample::stored_count() const noexcept {
  return sparse_ ? entries_.size() : values_.size();
}

std::vector<double> GradientSample::to_dense() const {
  if (!sparse_) return values_;
  std::vector<double> out(dim_, 0.0);
  for (const SparseEntry& e : entries_) out[e.index] = e.value;
  return out;
}

double Objective::value_on(const ParamVector&,
                           std::span<const std::size_t>) const {
  throw ConfigError("objective has no examples; subset evaluation unsupported");
}

GradientSample Objective::grad_on(const ParamVector&,
                                  std::span<const std::size_t>) const {
  throw ConfigError("objective has no examples; subset gradients unsupported");
}

void ensure_finite(const ParamVector& v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw_non_finite(what, i, v[i]);
  }
}

std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 0x632be59bd9b4e019ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return seed_mix(seed_mix(a, b), c);
}

}  // namespace gradbench
