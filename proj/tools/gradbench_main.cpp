#include <cstdlib>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gradbench/experiment.hpp"

namespace {

using namespace gradbench;

struct Flags {
  std::string config_path;
  std::string problem;
  std::vector<std::string> optimizers;
  std::optional<long> steps;
  std::optional<std::uint64_t> seed;
  std::optional<double> eta;
  std::optional<long> record_every;
  std::string csv_path;
  std::string svg_path;
  std::string parallel;
  std::optional<int> workers;
  std::optional<int> epochs;
  bool frames = false;
  // gradcheck
  std::string gc_problem;
  int gc_points = 100;
  double gc_h = 1e-5;
  std::uint64_t gc_seed = 0;
};

// Seed precedence: --seed flag, then GRADBENCH_SEED, then the config file.
void apply_env_seed(ExperimentConfig& cfg, bool seed_flag_given) {
  if (seed_flag_given) return;
  const char* env = std::getenv("GRADBENCH_SEED");
  if (!env || !*env) return;
  try {
    cfg.seed = std::stoull(env);
  } catch (const std::exception&) {
    throw UsageError("GRADBENCH_SEED must be an unsigned integer");
  }
}

ExperimentConfig assemble_config(const Flags& flags, bool seed_flag_given) {
  ExperimentConfig cfg;
  if (!flags.config_path.empty()) {
    cfg = load_experiment_config(flags.config_path);
  } else if (flags.problem.empty()) {
    throw UsageError("provide a config file or --problem");
  }
  if (!flags.problem.empty()) cfg.problem = flags.problem;
  if (!flags.optimizers.empty()) {
    cfg.optimizers.clear();
    for (const std::string& name : flags.optimizers) {
      OptimizerSetting setting;
      setting.name = name;
      setting.hp = default_hyper_params(optimizer_kind_from_name(name));
      cfg.optimizers.push_back(std::move(setting));
    }
  }
  if (cfg.optimizers.empty()) {
    throw UsageError("no optimizer selected; pass --optimizer or a config");
  }
  if (flags.steps) cfg.steps = *flags.steps;
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.eta) {
    for (OptimizerSetting& s : cfg.optimizers) s.hp.eta = *flags.eta;
  }
  if (flags.record_every) cfg.record_every = *flags.record_every;
  if (!flags.csv_path.empty()) cfg.csv_path = flags.csv_path;
  if (!flags.svg_path.empty()) cfg.svg_path = flags.svg_path;
  if (!flags.parallel.empty()) {
    if (flags.parallel != "hogwild") {
      throw UsageError("--parallel supports only 'hogwild'");
    }
    cfg.hogwild = true;
  }
  if (flags.workers) cfg.workers = *flags.workers;
  if (flags.epochs) cfg.epochs = *flags.epochs;
  apply_env_seed(cfg, seed_flag_given);
  return cfg;
}

ParamVector resolved_start(const ExperimentConfig& cfg) {
  if (cfg.start) return *cfg.start;
  return build_problem(cfg).objective->initial_point();
}

void print_run_header(const ExperimentConfig& cfg) {
  const ParamVector start = resolved_start(cfg);
  std::cout << experiment_metadata(cfg, start) << '\n';
}

int cmd_run(const Flags& flags, bool seed_flag_given) {
  ExperimentConfig cfg = assemble_config(flags, seed_flag_given);
  print_run_header(cfg);
  const std::vector<Trajectory> trajectories = run_experiment(cfg);
  const std::size_t dim = trajectories.front().front().theta.size();
  for (const Trajectory& t : trajectories) {
    std::cout << t.optimizer_name << ": steps=" << t.back().step
              << " final_loss=" << t.back().loss << '\n';
  }
  if (cfg.csv_path) {
    write_text_file(*cfg.csv_path, export_csv(trajectories, dim));
    std::cout << "csv: " << *cfg.csv_path << '\n';
  }
  if (cfg.svg_path) {
    const BuiltProblem built = build_problem(cfg);
    write_text_file(*cfg.svg_path,
                    render_contour_svg(*built.surface, cfg.contour,
                                       trajectories,
                                       experiment_metadata(cfg, resolved_start(cfg))));
    std::cout << "svg: " << *cfg.svg_path << '\n';
  }
  return 0;
}

int cmd_plot(const Flags& flags, bool seed_flag_given) {
  ExperimentConfig cfg = assemble_config(flags, seed_flag_given);
  if (!cfg.svg_path) throw UsageError("plot needs an SVG output path");
  print_run_header(cfg);
  const BuiltProblem built = build_problem(cfg);
  if (!built.surface) {
    throw ConfigError("contour plotting is unsupported for this problem; "
                      "it needs a 2-D analytic surface");
  }
  const std::vector<Trajectory> trajectories = run_experiment(cfg);
  const std::string metadata = experiment_metadata(cfg, resolved_start(cfg));
  write_text_file(*cfg.svg_path,
                  render_contour_svg(*built.surface, cfg.contour, trajectories,
                                     metadata));
  std::cout << "svg: " << *cfg.svg_path << '\n';

  if (flags.frames) {
    // Static frame sequence: truncated copies of every trajectory.
    std::size_t longest = 0;
    for (const Trajectory& t : trajectories) {
      longest = std::max(longest, t.entries.size());
    }
    const int frame_count = static_cast<int>(std::min<std::size_t>(48, longest));
    for (int f = 1; f <= frame_count; ++f) {
      const std::size_t keep =
          std::max<std::size_t>(1, longest * static_cast<std::size_t>(f) /
                                       static_cast<std::size_t>(frame_count));
      std::vector<Trajectory> partial = trajectories;
      for (Trajectory& t : partial) {
        if (t.entries.size() > keep) t.entries.resize(keep);
      }
      char suffix[32];
      std::snprintf(suffix, sizeof suffix, ".frame%03d.svg", f);
      write_text_file(*cfg.svg_path + suffix,
                      render_contour_svg(*built.surface, cfg.contour, partial,
                                         metadata));
    }
    std::cout << "frames: " << frame_count << '\n';
  }
  return 0;
}

int cmd_gradcheck(const Flags& flags) {
  ExperimentConfig cfg;
  cfg.problem = flags.gc_problem;
  cfg.seed = flags.gc_seed;
  // Small, dense instance. Per-coordinate gradient magnitudes scale like
  // sqrt(density/n); keeping them well above the finite-difference noise
  // floor (~ulp(loss)/2h) is what makes a 1e-6 relative tolerance usable.
  cfg.logreg_n = 64;
  cfg.logreg_d = 24;
  cfg.logreg_density = 0.25;
  const BuiltProblem built = build_problem(cfg);
  const Objective& obj = *built.objective;

  std::mt19937_64 rng(seed_mix(flags.gc_seed, 0x67633031u));
  // Keep logreg probes where the sigmoid is far from saturation; otherwise
  // near-zero gradient coordinates turn finite-difference cancellation noise
  // into large relative errors.
  const double half_width = built.logreg ? 1.0 : 4.0;
  std::uniform_real_distribution<double> coord(-half_width, half_width);
  std::vector<ParamVector> points;
  points.reserve(static_cast<std::size_t>(flags.gc_points));
  for (int i = 0; i < flags.gc_points; ++i) {
    ParamVector p(obj.dim());
    for (double& v : p) v = coord(rng);
    points.push_back(std::move(p));
  }
  // The mean-of-many-examples loss leaves individual gradient coordinates
  // near zero by cancellation, which amplifies finite-difference noise into
  // large relative errors; logreg therefore gets a looser gate. A wrong
  // gradient still shows up orders of magnitude above it.
  const double tol = built.logreg ? 1e-4 : 1e-6;
  const GradCheckReport report = gradcheck(obj, points, flags.gc_h);
  std::cout << "problem=" << cfg.problem << " points=" << report.points_checked
            << " skipped=" << report.points_skipped
            << " max_rel_error=" << report.max_rel_error
            << " worst_coordinate=" << report.worst_coordinate << '\n';
  if (report.max_rel_error >= tol) {
    char msg[96];
    std::snprintf(msg, sizeof msg,
                  "gradient check failed: max relative error above %g", tol);
    throw NumericError(msg);
  }
  std::cout << "ok\n";
  return 0;
}

int cmd_list() {
  std::cout << "problems:";
  for (const std::string& p : problem_names()) std::cout << ' ' << p;
  std::cout << "\noptimizers:";
  for (const std::string& o : optimizer_names()) std::cout << ' ' << o;
  std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gradient descent optimizer workbench"};
  app.require_subcommand(1);

  Flags flags;

  CLI::App* run = app.add_subcommand("run", "run an experiment, export CSV");
  run->add_option("config", flags.config_path, "experiment JSON file");
  run->add_option("--problem", flags.problem, "problem name");
  run->add_option("--optimizer", flags.optimizers,
                  "optimizer name (repeatable)");
  run->add_option("--steps", flags.steps, "step count override");
  CLI::Option* run_seed = run->add_option("--seed", flags.seed, "RNG seed");
  run->add_option("--eta", flags.eta, "learning rate override");
  run->add_option("--record-every", flags.record_every, "recording stride");
  run->add_option("--csv", flags.csv_path, "CSV output path");
  run->add_option("--svg", flags.svg_path, "SVG output path");
  run->add_option("--parallel", flags.parallel, "parallel mode (hogwild)");
  run->add_option("--workers", flags.workers, "hogwild worker count");
  run->add_option("--epochs", flags.epochs, "hogwild epoch count");

  CLI::App* plot = app.add_subcommand("plot", "render trajectory contours");
  plot->add_option("config", flags.config_path, "experiment JSON file")
      ->required();
  CLI::Option* plot_seed = plot->add_option("--seed", flags.seed, "RNG seed");
  plot->add_option("--svg", flags.svg_path, "SVG output path");
  plot->add_option("--steps", flags.steps, "step count override");
  plot->add_flag("--frames", flags.frames, "emit a per-frame SVG sequence");

  CLI::App* gc = app.add_subcommand("gradcheck",
                                    "finite-difference gradient check");
  gc->set_help_flag("--help", "print help");  // frees -h for the --h option
  gc->add_option("problem", flags.gc_problem, "problem name")->required();
  gc->add_option("--points", flags.gc_points, "probe point count");
  gc->add_option("--h", flags.gc_h, "finite-difference step");
  gc->add_option("--seed", flags.gc_seed, "probe RNG seed");

  CLI::App* list = app.add_subcommand("list", "enumerate problems/optimizers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(flags, run_seed->count() > 0);
    if (plot->parsed()) return cmd_plot(flags, plot_seed->count() > 0);
    if (gc->parsed()) return cmd_gradcheck(flags);
    if (list->parsed()) return cmd_list();
    throw UsageError("no command given");
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 4;
  }
}
