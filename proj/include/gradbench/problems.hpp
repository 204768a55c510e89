#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gradbench/types.hpp"

namespace gradbench {

// Value and both partials of a two-variable surface at one point.
struct SurfaceEval {
  double value = 0.0;
  double gx = 0.0;
  double gy = 0.0;
};

// f(x,y) = (1.5 - x + xy)^2 + (2.25 - x + xy^2)^2 + (2.625 - x + xy^3)^2
// Global minimum f(3, 0.5) = 0; nonnegative everywhere.
SurfaceEval beale_eval(double x, double y);

// f(x,y) = x^2 - y^2; saddle point at the origin.
SurfaceEval saddle_eval(double x, double y);

// f(x,y) = (x^2 + a*y^2)/2, a >= 1. Steep across y, shallow along x;
// plain gradient descent oscillates across the valley for eta near 2/a.
SurfaceEval ravine_eval(double x, double y, double curvature);

// A closed-form 2-D objective with a canonical start and a plotting box.
class AnalyticSurface final : public Objective {
 public:
  struct Box {
    double x_min, x_max, y_min, y_max;
  };

  using EvalFn = std::function<SurfaceEval(double, double)>;

  AnalyticSurface(std::string name, EvalFn eval, ParamVector canonical_start,
                  Box plot_box,
                  std::optional<std::pair<ParamVector, double>> known_minimum);

  std::size_t dim() const override { return 2; }
  double value(const ParamVector& theta) const override;
  GradientSample grad(const ParamVector& theta) const override;
  ParamVector initial_point() const override { return canonical_start_; }

  const std::string& surface_name() const noexcept { return name_; }
  const ParamVector& canonical_start() const noexcept { return canonical_start_; }
  const Box& plot_box() const noexcept { return plot_box_; }
  const std::optional<std::pair<ParamVector, double>>& known_minimum() const noexcept {
    return known_minimum_;
  }

 private:
  std::string name_;
  EvalFn eval_;
  ParamVector canonical_start_;
  Box plot_box_;
  std::optional<std::pair<ParamVector, double>> known_minimum_;
};

AnalyticSurface make_beale();
AnalyticSurface make_saddle();
AnalyticSurface make_ravine(double curvature = 100.0);

// One sparse training example; indices sorted and strictly increasing.
struct SparseExample {
  std::vector<SparseEntry> features;
  int label = 1;  // -1 or +1
};

// Synthetic sparse logistic regression with a planted sparse hyperplane.
// Loss per example: ln(1 + exp(-y * <x, theta>)). Deterministic in
// (n, d, density, seed); 5% label noise; the planted weight vector has 10
// nonzero coefficients. A 20% validation split is generated from the same
// stream and backs validation_value().
class SparseLogReg final : public Objective {
 public:
  static SparseLogReg make(std::size_t n, std::size_t d, double density,
                           std::uint64_t seed);

  std::size_t dim() const override { return d_; }
  std::size_t n_examples() const override { return examples_.size(); }
  double value(const ParamVector& theta) const override;
  GradientSample grad(const ParamVector& theta) const override;
  double value_on(const ParamVector& theta,
                  std::span<const std::size_t> examples) const override;
  GradientSample grad_on(const ParamVector& theta,
                         std::span<const std::size_t> examples) const override;
  double validation_value(const ParamVector& theta) const override;

  double example_loss(const ParamVector& theta, std::size_t i) const;
  // Sparse gradient of one example; support equals the example's support.
  GradientSample example_grad(const ParamVector& theta, std::size_t i) const;

  // Curriculum difficulty: distance from the generating hyperplane, oriented
  // so ascending order visits easy (large-margin) examples first.
  double example_difficulty(std::size_t i) const;

  const std::vector<SparseExample>& examples() const noexcept { return examples_; }
  const std::vector<SparseExample>& validation_examples() const noexcept {
    return validation_;
  }
  const ParamVector& planted_weights() const noexcept { return planted_; }
  // Mean fraction of nonzero features per example.
  double density() const noexcept { return density_actual_; }
  double target_density() const noexcept { return density_target_; }

  // One line per example: `label idx:val idx:val ...` with exact decimals.
  void export_text(std::ostream& os) const;
  static std::vector<SparseExample> parse_text(std::istream& is);

 private:
  SparseLogReg() = default;
  std::size_t d_ = 0;
  std::vector<SparseExample> examples_;
  std::vector<SparseExample> validation_;
  ParamVector planted_;
  std::vector<double> planted_margin_;  // per training example
  double density_target_ = 0.0;
  double density_actual_ = 0.0;
};

// Central-difference comparison of analytic gradients:
// rel_err = |a - n| / max(1e-12, |a| + |n|). Points where any probe value
// is non-finite are skipped and counted.
struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_coordinate = 0;
  int points_checked = 0;
  int points_skipped = 0;
};

GradCheckReport gradcheck(const Objective& objective,
                          const std::vector<ParamVector>& points, double h);

// Problem names for CLI/config selection: beale, saddle, ravine, logreg.
const std::vector<std::string>& problem_names();

}  // namespace gradbench
