#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gradbench/data.hpp"
#include "gradbench/optimizers.hpp"
#include "gradbench/parallel.hpp"
#include "gradbench/problems.hpp"
#include "gradbench/schedules.hpp"
#include "gradbench/svg.hpp"
#include "gradbench/train.hpp"

namespace gradbench {

// Learning-rate schedule shape; the base rate is filled in per optimizer
// when the experiment runs.
struct ScheduleSpec {
  LrScheduleKind kind = LrScheduleKind::kConstant;
  double drop = 0.5;
  long every_k = 100;
  double k = 1.0;
  double factor = 0.5;
  double min_improvement = 1e-4;

  LrSchedule instantiate(double base_eta) const;
};

// One optimizer selection with fully resolved hyperparameters.
struct OptimizerSetting {
  std::string name;
  HyperParams hp;
};

// A whole experiment: one problem, one start, one seed, N optimizers.
struct ExperimentConfig {
  std::string problem = "beale";
  std::optional<ParamVector> start;  // nullopt = problem's canonical start
  long steps = 1000;
  std::uint64_t seed = 0;
  long record_every = 1;
  std::vector<OptimizerSetting> optimizers;

  std::optional<ScheduleSpec> schedule;
  std::optional<NoiseSchedule> noise;
  std::optional<EarlyStopState> early_stop;
  OrderPolicy policy = OrderPolicy::kShuffle;
  std::size_t batch_size = BatchPolicy::kDefaultBatchSize;
  std::size_t block = 0;
  BatchPolicyKind batch = BatchPolicyKind::kFull;

  // logreg generator knobs
  std::size_t logreg_n = 10000;
  std::size_t logreg_d = 1000;
  double logreg_density = 0.01;

  // lock-free parallel mode (sgd on logreg only)
  bool hogwild = false;
  int workers = 1;
  int epochs = 5;

  std::optional<std::string> csv_path;
  std::optional<std::string> svg_path;
  ContourSpec contour;
};

// Parses and validates a JSON experiment file. Unknown keys are rejected so
// typos fail loudly instead of silently running defaults.
ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_config(const std::string& json_text);

// The problem behind a config; surface/logreg expose the concrete type when
// the caller needs plotting or parallel training.
struct BuiltProblem {
  std::shared_ptr<Objective> objective;
  const AnalyticSurface* surface = nullptr;
  const SparseLogReg* logreg = nullptr;
};
BuiltProblem build_problem(const ExperimentConfig& config);

// Runs every optimizer from the same start and seed, in config order.
// Output paths named in the config are checked for writability before any
// compute. In hogwild mode the single trajectory holds the initial point and
// the final shared vector.
std::vector<Trajectory> run_experiment(const ExperimentConfig& config);

// Header `optimizer,step,loss,theta_0,...`; every real rendered with 17
// significant digits so parsing the file back reproduces exact doubles.
std::string export_csv(const std::vector<Trajectory>& trajectories,
                       std::size_t dim);

// One line per optimizer with its resolved hyperparameters (only the fields
// its rule reads; adadelta reports no learning rate).
std::string describe_optimizer(const OptimizerSetting& setting);

// Seed/start/hyperparameter block embedded in SVG comments and printed by
// the CLI before a run.
std::string experiment_metadata(const ExperimentConfig& config,
                                const ParamVector& start);

}  // namespace gradbench
