#include "gradbench/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace gradbench {

namespace {

using nlohmann::json;

[[noreturn]] void unknown_name_error(const std::string& kind,
                                     const std::string& name,
                                     const std::vector<std::string>& valid) {
  std::ostringstream os;
  os << "unknown " << kind << " '" << name << "'; valid names:";
  for (const std::string& v : valid) os << ' ' << v;
  throw UsageError(os.str());
}

void check_keys(const json& j, const std::set<std::string>& allowed,
                const char* where) {
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError(std::string("unknown config key '") + item.key() +
                        "' in " + where);
    }
  }
}

double get_positive(const json& j, const char* key, const char* where) {
  const double v = j.at(key).get<double>();
  if (!(v > 0.0)) {
    throw ConfigError(std::string(key) + " must be positive in " + where);
  }
  return v;
}

HyperParams resolve_hyper(const std::string& name, const json* overrides,
                          const std::optional<double>& global_eta) {
  const OptimizerKind kind = optimizer_kind_from_name(name);
  HyperParams hp = default_hyper_params(kind);
  if (global_eta) hp.eta = *global_eta;
  if (overrides) {
    check_keys(*overrides, {"name", "eta", "gamma", "beta1", "beta2", "epsilon"},
               "optimizer entry");
    if (overrides->contains("eta")) hp.eta = overrides->at("eta").get<double>();
    if (overrides->contains("gamma")) hp.gamma = overrides->at("gamma").get<double>();
    if (overrides->contains("beta1")) hp.beta1 = overrides->at("beta1").get<double>();
    if (overrides->contains("beta2")) hp.beta2 = overrides->at("beta2").get<double>();
    if (overrides->contains("epsilon")) hp.epsilon = overrides->at("epsilon").get<double>();
  }
  return hp;
}

ScheduleSpec parse_schedule(const json& j) {
  check_keys(j, {"kind", "drop", "every_k", "k", "factor", "min_improvement"},
             "schedule");
  ScheduleSpec spec;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") {
    spec.kind = LrScheduleKind::kConstant;
  } else if (kind == "step_decay") {
    spec.kind = LrScheduleKind::kStepDecay;
    spec.drop = get_positive(j, "drop", "schedule");
    spec.every_k = j.at("every_k").get<long>();
  } else if (kind == "inverse_t") {
    spec.kind = LrScheduleKind::kInverseT;
    spec.k = get_positive(j, "k", "schedule");
  } else if (kind == "threshold_anneal") {
    spec.kind = LrScheduleKind::kThresholdAnneal;
    spec.factor = get_positive(j, "factor", "schedule");
    spec.min_improvement = get_positive(j, "min_improvement", "schedule");
  } else {
    throw ConfigError("unknown schedule kind: " + kind);
  }
  return spec;
}

}  // namespace

LrSchedule ScheduleSpec::instantiate(double base_eta) const {
  switch (kind) {
    case LrScheduleKind::kConstant:
      return LrSchedule::constant(base_eta);
    case LrScheduleKind::kStepDecay:
      return LrSchedule::step_decay(base_eta, drop, every_k);
    case LrScheduleKind::kInverseT:
      return LrSchedule::inverse_t(base_eta, k);
    case LrScheduleKind::kThresholdAnneal:
      return LrSchedule::threshold_anneal(base_eta, factor, min_improvement);
  }
  throw ConfigError("unhandled schedule kind");
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j,
             {"problem", "start", "steps", "seed", "record_every", "eta",
              "optimizers", "schedule", "noise", "early_stop", "data", "batch",
              "logreg", "parallel", "workers", "epochs", "outputs", "contour"},
             "experiment config");

  ExperimentConfig cfg;
  if (j.contains("problem")) cfg.problem = j.at("problem").get<std::string>();
  bool known_problem = false;
  for (const std::string& p : problem_names()) known_problem |= p == cfg.problem;
  if (!known_problem) unknown_name_error("problem", cfg.problem, problem_names());

  if (j.contains("start")) {
    cfg.start = j.at("start").get<std::vector<double>>();
  }
  if (j.contains("steps")) cfg.steps = j.at("steps").get<long>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("record_every")) {
    cfg.record_every = j.at("record_every").get<long>();
  }

  std::optional<double> global_eta;
  if (j.contains("eta")) global_eta = get_positive(j, "eta", "experiment");

  if (!j.contains("optimizers") || !j.at("optimizers").is_array() ||
      j.at("optimizers").empty()) {
    throw ConfigError("config needs a nonempty 'optimizers' array");
  }
  for (const json& item : j.at("optimizers")) {
    OptimizerSetting setting;
    if (item.is_string()) {
      setting.name = item.get<std::string>();
      setting.hp = resolve_hyper(setting.name, nullptr, global_eta);
    } else if (item.is_object()) {
      setting.name = item.at("name").get<std::string>();
      setting.hp = resolve_hyper(setting.name, &item, global_eta);
    } else {
      throw ConfigError("optimizer entries must be names or objects");
    }
    cfg.optimizers.push_back(std::move(setting));
  }

  if (j.contains("schedule")) cfg.schedule = parse_schedule(j.at("schedule"));

  if (j.contains("noise")) {
    const json& jn = j.at("noise");
    check_keys(jn, {"eta", "gamma"}, "noise");
    NoiseSchedule noise;
    noise.noise_eta = jn.at("eta").get<double>();
    if (jn.contains("gamma")) noise.noise_gamma = jn.at("gamma").get<double>();
    if (noise.noise_eta < 0.0 || noise.noise_gamma < 0.0) {
      throw ConfigError("noise constants must be nonnegative");
    }
    cfg.noise = noise;
  }

  if (j.contains("early_stop")) {
    const json& je = j.at("early_stop");
    check_keys(je, {"patience", "min_delta"}, "early_stop");
    const long patience = je.at("patience").get<long>();
    const double min_delta =
        je.contains("min_delta") ? je.at("min_delta").get<double>() : 0.0;
    cfg.early_stop = EarlyStopState::with_patience(patience, min_delta);
  }

  if (j.contains("data")) {
    const json& jd = j.at("data");
    check_keys(jd, {"policy", "batch_size", "block"}, "data");
    if (jd.contains("policy")) {
      cfg.policy = order_policy_from_name(jd.at("policy").get<std::string>());
    }
    if (jd.contains("batch_size")) {
      cfg.batch_size = jd.at("batch_size").get<std::size_t>();
    }
    if (jd.contains("block")) cfg.block = jd.at("block").get<std::size_t>();
  }

  if (j.contains("batch")) {
    const std::string b = j.at("batch").get<std::string>();
    if (b == "full") {
      cfg.batch = BatchPolicyKind::kFull;
    } else if (b == "single") {
      cfg.batch = BatchPolicyKind::kSingle;
    } else if (b == "minibatch") {
      cfg.batch = BatchPolicyKind::kMiniBatch;
    } else {
      throw ConfigError("batch must be one of full, single, minibatch");
    }
  }

  if (j.contains("logreg")) {
    const json& jl = j.at("logreg");
    check_keys(jl, {"n", "d", "density"}, "logreg");
    if (jl.contains("n")) cfg.logreg_n = jl.at("n").get<std::size_t>();
    if (jl.contains("d")) cfg.logreg_d = jl.at("d").get<std::size_t>();
    if (jl.contains("density")) {
      cfg.logreg_density = jl.at("density").get<double>();
    }
  }

  if (j.contains("parallel")) {
    const std::string mode = j.at("parallel").get<std::string>();
    if (mode != "hogwild") {
      throw ConfigError("parallel mode must be 'hogwild'");
    }
    cfg.hogwild = true;
  }
  if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();
  if (j.contains("epochs")) cfg.epochs = j.at("epochs").get<int>();

  if (j.contains("outputs")) {
    const json& jo = j.at("outputs");
    check_keys(jo, {"csv", "svg"}, "outputs");
    if (jo.contains("csv")) cfg.csv_path = jo.at("csv").get<std::string>();
    if (jo.contains("svg")) cfg.svg_path = jo.at("svg").get<std::string>();
  }

  if (j.contains("contour")) {
    const json& jc = j.at("contour");
    check_keys(jc, {"box", "resolution", "levels", "log_levels"}, "contour");
    if (jc.contains("box")) {
      const auto box = jc.at("box").get<std::vector<double>>();
      if (box.size() != 4) {
        throw ConfigError("contour box must be [x_min, x_max, y_min, y_max]");
      }
      cfg.contour.x_min = box[0];
      cfg.contour.x_max = box[1];
      cfg.contour.y_min = box[2];
      cfg.contour.y_max = box[3];
    }
    if (jc.contains("resolution")) {
      cfg.contour.resolution = jc.at("resolution").get<int>();
    }
    if (jc.contains("levels")) cfg.contour.levels = jc.at("levels").get<int>();
    if (jc.contains("log_levels")) {
      cfg.contour.log_levels = jc.at("log_levels").get<bool>();
    }
  }

  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config file: " + path);
  std::stringstream buffer;
  buffer << is.rdbuf();
  return parse_experiment_config(buffer.str());
}

BuiltProblem build_problem(const ExperimentConfig& config) {
  BuiltProblem built;
  if (config.problem == "beale") {
    auto s = std::make_shared<AnalyticSurface>(make_beale());
    built.surface = s.get();
    built.objective = std::move(s);
  } else if (config.problem == "saddle") {
    auto s = std::make_shared<AnalyticSurface>(make_saddle());
    built.surface = s.get();
    built.objective = std::move(s);
  } else if (config.problem == "ravine") {
    auto s = std::make_shared<AnalyticSurface>(make_ravine());
    built.surface = s.get();
    built.objective = std::move(s);
  } else if (config.problem == "logreg") {
    auto p = std::make_shared<SparseLogReg>(SparseLogReg::make(
        config.logreg_n, config.logreg_d, config.logreg_density, config.seed));
    built.logreg = p.get();
    built.objective = std::move(p);
  } else {
    unknown_name_error("problem", config.problem, problem_names());
  }
  return built;
}

namespace {

void check_writable(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::app);
  if (!os) throw IoError("output path is not writable: " + path);
}

std::vector<Trajectory> run_hogwild_experiment(const ExperimentConfig& config,
                                               const BuiltProblem& built) {
  if (!built.logreg) {
    throw ConfigError("hogwild mode requires the logreg problem");
  }
  if (config.optimizers.size() != 1 || config.optimizers[0].name != "sgd") {
    throw ConfigError("hogwild mode runs plain sgd only");
  }
  HogwildConfig hw;
  hw.workers = config.workers;
  hw.eta = config.optimizers[0].hp.eta;
  hw.epochs = config.epochs;
  hw.seed = config.seed;
  const HogwildResult result = hogwild_train(*built.logreg, hw);

  Trajectory traj;
  traj.optimizer_name = "sgd";
  const ParamVector zeros(built.logreg->dim(), 0.0);
  traj.entries.push_back({0, zeros, built.logreg->value(zeros)});
  if (config.epochs > 0) {
    const long total_updates =
        static_cast<long>(built.logreg->n_examples()) * config.epochs;
    traj.entries.push_back({total_updates, result.params, result.final_loss});
  }
  return {traj};
}

}  // namespace

std::vector<Trajectory> run_experiment(const ExperimentConfig& config) {
  const BuiltProblem built = build_problem(config);
  if (config.svg_path && !built.surface) {
    throw ConfigError("contour plotting is unsupported for this problem; "
                      "it needs a 2-D analytic surface");
  }
  if (config.csv_path) check_writable(*config.csv_path);
  if (config.svg_path) check_writable(*config.svg_path);

  if (config.hogwild) return run_hogwild_experiment(config, built);

  const Objective& objective = *built.objective;
  if (config.start && config.start->size() != objective.dim()) {
    throw ConfigError("start point dimension does not match the problem");
  }

  std::vector<Trajectory> out;
  out.reserve(config.optimizers.size());
  for (const OptimizerSetting& setting : config.optimizers) {
    Optimizer optimizer = Optimizer::by_name(setting.name, objective.dim(),
                                             setting.hp);
    RunConfig rc;
    rc.learning_rate = setting.hp.eta;
    rc.max_steps = config.steps;
    rc.seed = config.seed;
    rc.record_every = config.record_every;
    switch (config.batch) {
      case BatchPolicyKind::kFull:
        rc.batch_policy = BatchPolicy::full();
        break;
      case BatchPolicyKind::kSingle:
        rc.batch_policy = BatchPolicy::single();
        break;
      case BatchPolicyKind::kMiniBatch:
        rc.batch_policy = BatchPolicy::mini_batch(config.batch_size);
        break;
    }

    StrategySet strategies;
    if (config.schedule) {
      strategies.schedule = config.schedule->instantiate(setting.hp.eta);
    }
    strategies.noise = config.noise;
    strategies.early_stop = config.early_stop;
    strategies.order_policy = config.policy;
    strategies.curriculum_block = config.block;
    if (built.logreg) {
      const SparseLogReg* p = built.logreg;
      strategies.difficulty = [p](std::size_t i) {
        return p->example_difficulty(i);
      };
    }

    out.push_back(
        minimize(objective, std::move(optimizer), rc, strategies, config.start));
  }
  return out;
}

std::string export_csv(const std::vector<Trajectory>& trajectories,
                       std::size_t dim) {
  if (trajectories.empty()) throw ConfigError("no trajectories to export");
  std::ostringstream os;
  os << "optimizer,step,loss";
  for (std::size_t i = 0; i < dim; ++i) os << ",theta_" << i;
  os << '\n';
  char buf[64];
  for (const Trajectory& traj : trajectories) {
    for (const TrajectoryEntry& e : traj.entries) {
      os << traj.optimizer_name << ',' << e.step;
      std::snprintf(buf, sizeof buf, "%.17g", e.loss);
      os << ',' << buf;
      for (std::size_t i = 0; i < dim; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", e.theta[i]);
        os << ',' << buf;
      }
      os << '\n';
    }
  }
  return os.str();
}

std::string describe_optimizer(const OptimizerSetting& setting) {
  const OptimizerKind kind = optimizer_kind_from_name(setting.name);
  const HyperParams& hp = setting.hp;
  char buf[160];
  switch (kind) {
    case OptimizerKind::kSgd:
      std::snprintf(buf, sizeof buf, "sgd(eta=%g)", hp.eta);
      break;
    case OptimizerKind::kMomentum:
    case OptimizerKind::kNag:
    case OptimizerKind::kNagModified:
      std::snprintf(buf, sizeof buf, "%s(eta=%g,gamma=%g)",
                    std::string(setting.name).c_str(), hp.eta, hp.gamma);
      break;
    case OptimizerKind::kAdagrad:
      std::snprintf(buf, sizeof buf, "adagrad(eta=%g,epsilon=%g)", hp.eta,
                    hp.epsilon);
      break;
    case OptimizerKind::kAdadelta:
      std::snprintf(buf, sizeof buf, "adadelta(gamma=%g,epsilon=%g)", hp.gamma,
                    hp.epsilon);
      break;
    case OptimizerKind::kRmsprop:
      std::snprintf(buf, sizeof buf, "rmsprop(eta=%g,gamma=%g,epsilon=%g)",
                    hp.eta, hp.gamma, hp.epsilon);
      break;
    case OptimizerKind::kAdam:
    case OptimizerKind::kNadam:
      std::snprintf(buf, sizeof buf, "%s(eta=%g,beta1=%g,beta2=%g,epsilon=%g)",
                    std::string(setting.name).c_str(), hp.eta, hp.beta1,
                    hp.beta2, hp.epsilon);
      break;
    case OptimizerKind::kAdamax:
      std::snprintf(buf, sizeof buf, "adamax(eta=%g,beta1=%g,beta2=%g)",
                    hp.eta, hp.beta1, hp.beta2);
      break;
  }
  return buf;
}

std::string experiment_metadata(const ExperimentConfig& config,
                                const ParamVector& start) {
  std::ostringstream os;
  os << "problem=" << config.problem << " seed=" << config.seed << " start=(";
  char buf[48];
  const std::size_t shown = std::min<std::size_t>(start.size(), 8);
  for (std::size_t i = 0; i < shown; ++i) {
    std::snprintf(buf, sizeof buf, "%g", start[i]);
    os << (i ? "," : "") << buf;
  }
  if (shown < start.size()) os << ",... dim=" << start.size();
  os << ")";
  if (config.hogwild) {
    os << " mode=hogwild workers=" << config.workers
       << " epochs=" << config.epochs;
  } else {
    os << " steps=" << config.steps;
  }
  os << " optimizers=[";
  for (std::size_t i = 0; i < config.optimizers.size(); ++i) {
    os << (i ? ", " : "") << describe_optimizer(config.optimizers[i]);
  }
  os << "]";
  return os.str();
}

}  // namespace gradbench
