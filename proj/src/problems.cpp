#include "gradbench/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace gradbench {

SurfaceEval beale_eval(double x, double y) {
  const double r1 = 1.5 - x + x * y;
  const double r2 = 2.25 - x + x * y * y;
  const double r3 = 2.625 - x + x * y * y * y;
  SurfaceEval e;
  e.value = r1 * r1 + r2 * r2 + r3 * r3;
  e.gx = 2.0 * r1 * (y - 1.0) + 2.0 * r2 * (y * y - 1.0) +
         2.0 * r3 * (y * y * y - 1.0);
  e.gy = 2.0 * r1 * x + 4.0 * r2 * x * y + 6.0 * r3 * x * y * y;
  return e;
}

SurfaceEval saddle_eval(double x, double y) {
  return {x * x - y * y, 2.0 * x, -2.0 * y};
}

SurfaceEval ravine_eval(double x, double y, double curvature) {
  return {0.5 * (x * x + curvature * y * y), x, curvature * y};
}

AnalyticSurface::AnalyticSurface(
    std::string name, EvalFn eval, ParamVector canonical_start, Box plot_box,
    std::optional<std::pair<ParamVector, double>> known_minimum)
    : name_(std::move(name)),
      eval_(std::move(eval)),
      canonical_start_(std::move(canonical_start)),
      plot_box_(plot_box),
      known_minimum_(std::move(known_minimum)) {
  if (canonical_start_.size() != 2) {
    throw ConfigError("analytic surfaces are two-dimensional");
  }
}

double AnalyticSurface::value(const ParamVector& theta) const {
  if (theta.size() != 2) throw ConfigError("surface expects a 2-vector");
  return eval_(theta[0], theta[1]).value;
}

GradientSample AnalyticSurface::grad(const ParamVector& theta) const {
  if (theta.size() != 2) throw ConfigError("surface expects a 2-vector");
  const SurfaceEval e = eval_(theta[0], theta[1]);
  return GradientSample::dense({e.gx, e.gy});
}

AnalyticSurface make_beale() {
  return AnalyticSurface(
      "beale", [](double x, double y) { return beale_eval(x, y); },
      {2.9, 0.8}, {-4.5, 4.5, -4.5, 4.5},
      std::make_pair(ParamVector{3.0, 0.5}, 0.0));
}

AnalyticSurface make_saddle() {
  return AnalyticSurface(
      "saddle", [](double x, double y) { return saddle_eval(x, y); },
      {-0.001, 0.0001}, {-2.0, 2.0, -2.0, 2.0}, std::nullopt);
}

AnalyticSurface make_ravine(double curvature) {
  if (!(curvature >= 1.0)) throw ConfigError("ravine curvature must be >= 1");
  return AnalyticSurface(
      "ravine",
      [curvature](double x, double y) { return ravine_eval(x, y, curvature); },
      {-5.0, 1.0}, {-5.5, 5.5, -1.5, 1.5},
      std::make_pair(ParamVector{0.0, 0.0}, 0.0));
}

namespace {

// ln(1 + exp(u)) without overflow; for u > 35 the correction term is below
// double precision.
double log1p_exp(double u) {
  if (u > 35.0) return u;
  return std::log1p(std::exp(u));
}

// 1 / (1 + exp(u)) without overflow.
double logistic_neg(double u) {
  if (u > 35.0) return std::exp(-u);
  return 1.0 / (1.0 + std::exp(u));
}

double sparse_dot(const std::vector<SparseEntry>& features,
                  const ParamVector& theta) {
  double z = 0.0;
  for (const SparseEntry& e : features) z += e.value * theta[e.index];
  return z;
}

}  // namespace

SparseLogReg SparseLogReg::make(std::size_t n, std::size_t d, double density,
                                std::uint64_t seed) {
  if (n < 1 || d < 1) throw ConfigError("logreg needs n >= 1 and d >= 1");
  if (!(density > 0.0) || !(density <= 1.0)) {
    throw ConfigError("logreg density must lie in (0, 1]");
  }
  constexpr std::size_t kPlantedNnz = 10;
  constexpr double kLabelNoise = 0.05;
  constexpr double kSupportBias = 0.3;  // fraction of draws aimed at the support

  SparseLogReg problem;
  problem.d_ = d;
  problem.density_target_ = density;

  std::mt19937_64 rng(seed_mix(seed, 0x6c6f67u));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> any_index(0, d - 1);

  // Planted hyperplane on a small random support; coefficients scaled up so
  // margins dominate the label noise.
  const std::size_t planted_nnz = std::min(kPlantedNnz, d);
  std::set<std::size_t> support_set;
  while (support_set.size() < planted_nnz) support_set.insert(any_index(rng));
  const std::vector<std::size_t> support(support_set.begin(), support_set.end());
  problem.planted_.assign(d, 0.0);
  for (std::size_t j : support) problem.planted_[j] = 2.0 * normal(rng);

  std::size_t row_nnz = static_cast<std::size_t>(
      std::llround(density * static_cast<double>(d)));
  row_nnz = std::min(std::max<std::size_t>(row_nnz, 1), d);

  std::uniform_int_distribution<std::size_t> support_pick(0, support.size() - 1);

  auto generate = [&](std::vector<SparseExample>& out, std::size_t count,
                      bool track_margin) {
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      std::set<std::size_t> idx;
      while (idx.size() < row_nnz) {
        if (unit(rng) < kSupportBias) {
          idx.insert(support[support_pick(rng)]);
        } else {
          idx.insert(any_index(rng));
        }
      }
      SparseExample ex;
      ex.features.reserve(idx.size());
      double margin = 0.0;
      for (std::size_t j : idx) {
        const double v = normal(rng);
        ex.features.push_back({j, v});
        margin += v * problem.planted_[j];
      }
      if (margin > 0.0) {
        ex.label = 1;
      } else if (margin < 0.0) {
        ex.label = -1;
      } else {
        ex.label = unit(rng) < 0.5 ? -1 : 1;
      }
      if (unit(rng) < kLabelNoise) ex.label = -ex.label;
      if (track_margin) problem.planted_margin_.push_back(margin);
      out.push_back(std::move(ex));
    }
  };

  generate(problem.examples_, n, true);
  // Held-out split for validation_value, drawn from the same stream.
  generate(problem.validation_, std::max<std::size_t>(1, n / 5), false);

  double nnz_total = 0.0;
  for (const SparseExample& ex : problem.examples_) {
    nnz_total += static_cast<double>(ex.features.size());
  }
  problem.density_actual_ =
      nnz_total / (static_cast<double>(n) * static_cast<double>(d));
  return problem;
}

namespace {

double logreg_example_loss(const SparseExample& ex, const ParamVector& theta) {
  const double z = sparse_dot(ex.features, theta);
  return log1p_exp(-static_cast<double>(ex.label) * z);
}

double mean_loss(const std::vector<SparseExample>& rows,
                 const ParamVector& theta) {
  double total = 0.0;
  for (const SparseExample& ex : rows) total += logreg_example_loss(ex, theta);
  return total / static_cast<double>(rows.size());
}

}  // namespace

double SparseLogReg::value(const ParamVector& theta) const {
  if (theta.size() != d_) throw ConfigError("theta dimension mismatch");
  return mean_loss(examples_, theta);
}

GradientSample SparseLogReg::grad(const ParamVector& theta) const {
  if (theta.size() != d_) throw ConfigError("theta dimension mismatch");
  std::vector<double> g(d_, 0.0);
  const double inv_n = 1.0 / static_cast<double>(examples_.size());
  for (const SparseExample& ex : examples_) {
    const double z = sparse_dot(ex.features, theta);
    const double y = static_cast<double>(ex.label);
    const double scale = -y * logistic_neg(y * z);
    for (const SparseEntry& e : ex.features) {
      g[e.index] += inv_n * scale * e.value;
    }
  }
  return GradientSample::dense(std::move(g));
}

double SparseLogReg::value_on(const ParamVector& theta,
                              std::span<const std::size_t> examples) const {
  if (theta.size() != d_) throw ConfigError("theta dimension mismatch");
  if (examples.empty()) throw ConfigError("empty example index set");
  double total = 0.0;
  for (std::size_t i : examples) {
    if (i >= examples_.size()) throw ConfigError("example index out of range");
    total += logreg_example_loss(examples_[i], theta);
  }
  return total / static_cast<double>(examples.size());
}

GradientSample SparseLogReg::grad_on(const ParamVector& theta,
                                     std::span<const std::size_t> examples) const {
  if (theta.size() != d_) throw ConfigError("theta dimension mismatch");
  if (examples.empty()) throw ConfigError("empty example index set");
  if (examples.size() == 1) return example_grad(theta, examples[0]);
  std::vector<double> g(d_, 0.0);
  const double inv_b = 1.0 / static_cast<double>(examples.size());
  for (std::size_t i : examples) {
    if (i >= examples_.size()) throw ConfigError("example index out of range");
    const SparseExample& ex = examples_[i];
    const double z = sparse_dot(ex.features, theta);
    const double y = static_cast<double>(ex.label);
    const double scale = -y * logistic_neg(y * z);
    for (const SparseEntry& e : ex.features) {
      g[e.index] += inv_b * scale * e.value;
    }
  }
  return GradientSample::dense(std::move(g));
}

double SparseLogReg::validation_value(const ParamVector& theta) const {
  if (theta.size() != d_) throw ConfigError("theta dimension mismatch");
  return mean_loss(validation_, theta);
}

double SparseLogReg::example_loss(const ParamVector& theta,
                                  std::size_t i) const {
  if (i >= examples_.size()) throw ConfigError("example index out of range");
  return logreg_example_loss(examples_[i], theta);
}

GradientSample SparseLogReg::example_grad(const ParamVector& theta,
                                          std::size_t i) const {
  if (theta.size() != d_) throw ConfigError("theta dimension mismatch");
  if (i >= examples_.size()) throw ConfigError("example index out of range");
  const SparseExample& ex = examples_[i];
  const double z = sparse_dot(ex.features, theta);
  const double y = static_cast<double>(ex.label);
  const double scale = -y * logistic_neg(y * z);
  std::vector<SparseEntry> entries;
  entries.reserve(ex.features.size());
  for (const SparseEntry& e : ex.features) {
    entries.push_back({e.index, scale * e.value});
  }
  return GradientSample::sparse(d_, std::move(entries));
}

double SparseLogReg::example_difficulty(std::size_t i) const {
  if (i >= planted_margin_.size()) {
    throw ConfigError("example index out of range");
  }
  // Small |margin| = close to the hyperplane = hard; negate so ascending
  // difficulty visits easy examples first.
  return -std::fabs(planted_margin_[i]);
}

void SparseLogReg::export_text(std::ostream& os) const {
  char buf[64];
  for (const SparseExample& ex : examples_) {
    os << ex.label;
    for (const SparseEntry& e : ex.features) {
      std::snprintf(buf, sizeof buf, "%.17g", e.value);
      os << ' ' << e.index << ':' << buf;
    }
    os << '\n';
  }
}

std::vector<SparseExample> SparseLogReg::parse_text(std::istream& is) {
  std::vector<SparseExample> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    SparseExample ex;
    if (!(ls >> ex.label) || (ex.label != 1 && ex.label != -1)) {
      throw IoError("dataset line must start with a label of 1 or -1");
    }
    std::string tok;
    while (ls >> tok) {
      const std::size_t colon = tok.find(':');
      if (colon == std::string::npos) {
        throw IoError("dataset feature token missing ':' separator");
      }
      SparseEntry e;
      e.index = std::stoull(tok.substr(0, colon));
      e.value = std::stod(tok.substr(colon + 1));
      ex.features.push_back(e);
    }
    rows.push_back(std::move(ex));
  }
  return rows;
}

GradCheckReport gradcheck(const Objective& objective,
                          const std::vector<ParamVector>& points, double h) {
  if (!(h > 0.0)) throw ConfigError("gradcheck step must be positive");
  GradCheckReport report;
  for (const ParamVector& point : points) {
    if (point.size() != objective.dim()) {
      throw ConfigError("gradcheck point dimension mismatch");
    }
    const GradientSample analytic = objective.grad(point);
    const std::vector<double> a = analytic.to_dense();
    bool skip = false;
    double point_max = 0.0;
    std::size_t point_worst = 0;
    ParamVector probe = point;
    for (std::size_t i = 0; i < point.size() && !skip; ++i) {
      probe[i] = point[i] + h;
      const double f_plus = objective.value(probe);
      probe[i] = point[i] - h;
      const double f_minus = objective.value(probe);
      probe[i] = point[i];
      if (!std::isfinite(f_plus) || !std::isfinite(f_minus)) {
        skip = true;
        break;
      }
      const double numeric = (f_plus - f_minus) / (2.0 * h);
      const double rel = std::fabs(a[i] - numeric) /
                         std::max(1e-12, std::fabs(a[i]) + std::fabs(numeric));
      if (rel > point_max) {
        point_max = rel;
        point_worst = i;
      }
    }
    if (skip) {
      ++report.points_skipped;
      continue;
    }
    ++report.points_checked;
    if (point_max > report.max_rel_error) {
      report.max_rel_error = point_max;
      report.worst_coordinate = point_worst;
    }
  }
  return report;
}

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = {"beale", "saddle", "ravine",
                                                 "logreg"};
  return names;
}

}  // namespace gradbench
