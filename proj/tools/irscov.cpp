// irscov: coverage sweeps, phase optimization and Monte-Carlo validation for
// links assisted by distributed IRSs under correlated Rayleigh fading.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "irscov/config.hpp"
#include "irscov/errors.hpp"
#include "irscov/gradcheck.hpp"
#include "irscov/montecarlo.hpp"
#include "irscov/optimizer.hpp"
#include "irscov/parallel.hpp"
#include "irscov/sweep.hpp"

namespace {

using namespace irscov;

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CommonOptions {
  std::string config_path;
  bool uncorrelated = false;
  std::string regime = "m-finite";
  std::uint64_t trials = 0;
  std::uint64_t seed = 1;
  std::string out;
};

struct GridOptions {
  double t_min = -10.0;
  double t_max = 20.0;
  int t_points = 31;
  std::string t_list;
  bool rate = false;
  bool linear = false;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_trials) {
  cmd->add_option("--config", o.config_path, "Scenario JSON (defaults to the built-in reference scenario)");
  cmd->add_flag("--uncorrelated", o.uncorrelated, "Replace the sinc correlation by a scaled identity");
  cmd->add_option("--regime", o.regime, "Closed form to use")->check(CLI::IsMember({"m-finite", "m-large"}));
  cmd->add_option("--seed", o.seed, "Monte-Carlo seed");
  cmd->add_option("--out", o.out, "Output file (stdout when omitted)");
  if (with_trials) cmd->add_option("--trials", o.trials, "Monte-Carlo trials per point (0 disables)");
}

void add_grid(CLI::App* cmd, GridOptions& g) {
  cmd->add_option("--t-min", g.t_min, "First threshold");
  cmd->add_option("--t-max", g.t_max, "Last threshold");
  cmd->add_option("--t-points", g.t_points, "Number of grid points")->check(CLI::PositiveNumber);
  cmd->add_option("--t-grid", g.t_list, "Comma-separated thresholds (overrides min/max/points)");
  auto* rate = cmd->add_flag("--rate", g.rate, "Grid values are target rates in b/s/Hz, T = 2^R - 1");
  cmd->add_flag("--linear", g.linear, "Grid values are linear thresholds")->excludes(rate);
}

Regime parse_regime(const std::string& s) {
  return s == "m-large" ? Regime::kLargeMFiniteN : Regime::kFiniteMLargeN;
}

ExperimentConfig load_experiment(const CommonOptions& o) {
  ExperimentConfig cfg;
  if (!o.config_path.empty()) {
    cfg = load_config(o.config_path);
  } else {
    cfg.scenario = reference_scenario();
  }
  if (o.uncorrelated) cfg.correlation.model = CorrelationModel::kUncorrelated;
  return cfg;
}

std::vector<double> make_grid(const GridOptions& g) {
  if (!g.t_list.empty()) {
    std::vector<double> out;
    std::stringstream ss(g.t_list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        out.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ConfigError("--t-grid", "malformed value '" + item + "'");
      }
    }
    return out;
  }
  return linear_grid(g.t_min, g.t_max, g.t_points);
}

ThresholdUnit grid_unit(const GridOptions& g) {
  if (g.rate) return ThresholdUnit::kRate;
  if (g.linear) return ThresholdUnit::kLinear;
  return ThresholdUnit::kDb;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("--out", "cannot write " + path);
  out << text;
}

std::string with_extension(const std::string& path, const std::string& ext) {
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
    return path.substr(0, dot) + ext;
  }
  return path + ext;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coverage probability of distributed IRS links under correlated Rayleigh fading"};
  app.require_subcommand(1);

  // sweep
  CommonOptions sweep_opts;
  GridOptions sweep_grid;
  std::string sweep_phases = "optimized";
  std::uint64_t sweep_phase_seed = 1;
  std::string sweep_phase_file;
  bool sweep_dat = false;
  auto* sweep = app.add_subcommand("sweep", "Closed-form (and optional Monte-Carlo) coverage over a threshold grid");
  add_common(sweep, sweep_opts, true);
  add_grid(sweep, sweep_grid);
  sweep->add_option("--phases", sweep_phases, "Phase source")
      ->check(CLI::IsMember({"initial", "optimized", "random", "file"}));
  sweep->add_option("--phase-seed", sweep_phase_seed, "Seed for --phases random");
  sweep->add_option("--phase-file", sweep_phase_file, "CSV irs,element,theta_rad for --phases file");
  sweep->add_flag("--dat", sweep_dat, "Also write a gnuplot .dat next to --out");

  // optimize
  CommonOptions opt_opts;
  double opt_threshold_db = 0.0;
  std::string opt_mode = "sweep";
  std::string opt_objective = "coverage";
  std::string opt_phases_out;
  int opt_max_iter = 500;
  double opt_epsilon = 1e-10;
  auto* optimize_cmd = app.add_subcommand("optimize", "Projected gradient ascent; writes the iteration trace CSV");
  add_common(optimize_cmd, opt_opts, false);
  optimize_cmd->add_option("--threshold-db", opt_threshold_db, "SNR threshold T in dB");
  optimize_cmd->add_option("--mode", opt_mode, "Block update order")->check(CLI::IsMember({"sweep", "simultaneous"}));
  optimize_cmd->add_option("--objective", opt_objective, "Maximized quantity")
      ->check(CLI::IsMember({"coverage", "aggregate"}));
  optimize_cmd->add_option("--max-iterations", opt_max_iter)->check(CLI::PositiveNumber);
  optimize_cmd->add_option("--epsilon", opt_epsilon)->check(CLI::PositiveNumber);
  optimize_cmd->add_option("--phases-out", opt_phases_out, "Write the optimized phases as CSV");

  // mc-validate
  CommonOptions mc_opts;
  mc_opts.trials = 20000;
  GridOptions mc_grid;
  auto* mc_cmd = app.add_subcommand("mc-validate", "Closed form vs Monte-Carlo over a grid, plus a second-moment check");
  add_common(mc_cmd, mc_opts, true);
  add_grid(mc_cmd, mc_grid);

  // reproduce
  std::string which;
  CommonOptions rep_opts;
  double rep_t_min = -60.0, rep_t_max = 20.0, rep_direct_scale = 1.0;
  int rep_points = 81;
  auto* reproduce = app.add_subcommand("reproduce", "Figure data for the reference scenario");
  reproduce->add_option("figure", which, "fig1 or fig2")->required()->check(CLI::IsMember({"fig1", "fig2"}));
  reproduce->add_option("--trials", rep_opts.trials, "Monte-Carlo trials per point (0 disables)");
  reproduce->add_option("--seed", rep_opts.seed);
  reproduce->add_option("--out", rep_opts.out);
  reproduce->add_option("--t-min", rep_t_min, "First threshold in dB");
  reproduce->add_option("--t-max", rep_t_max, "Last threshold in dB");
  reproduce->add_option("--t-points", rep_points)->check(CLI::PositiveNumber);
  reproduce->add_option("--direct-scale", rep_direct_scale, "Multiplier on beta_d")->check(CLI::NonNegativeNumber);

  // gradcheck
  int gc_instances = 20;
  std::uint64_t gc_seed = 1;
  double gc_step = 1e-6;
  double gc_tol = 1e-5;
  auto* gradcheck = app.add_subcommand("gradcheck", "Analytic vs finite-difference gradients on random instances");
  gradcheck->add_option("--instances", gc_instances)->check(CLI::PositiveNumber);
  gradcheck->add_option("--seed", gc_seed);
  gradcheck->add_option("--step", gc_step, "Finite-difference step in radians");
  gradcheck->add_option("--tolerance", gc_tol, "Relative tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const std::size_t workers = default_worker_count();

  try {
    if (*sweep) {
      SweepSpec spec;
      spec.t_grid = make_grid(sweep_grid);
      spec.unit = grid_unit(sweep_grid);
      spec.regime = parse_regime(sweep_opts.regime);
      spec.phase_source = sweep_phases == "initial"  ? PhaseSource::kInitial
                          : sweep_phases == "random" ? PhaseSource::kRandom
                          : sweep_phases == "file"   ? PhaseSource::kFile
                                                     : PhaseSource::kOptimized;
      spec.phase_seed = sweep_phase_seed;
      spec.phase_file = sweep_phase_file;
      spec.mc_trials = sweep_opts.trials;
      spec.seed = sweep_opts.seed;
      const SweepResult result = run_sweep(load_experiment(sweep_opts), spec, workers);
      emit(sweep_opts.out, sweep_csv(result));
      if (sweep_dat) {
        if (sweep_opts.out.empty()) throw ConfigError("--dat", "requires --out");
        emit(with_extension(sweep_opts.out, ".dat"), irscov::sweep_dat(result));
      }
    } else if (*optimize_cmd) {
      const ExperimentConfig cfg = load_experiment(opt_opts);
      const LinkModel model = build_link_model(cfg.scenario, cfg.correlation);
      OptimizerConfig oc;
      oc.mode = opt_mode == "simultaneous" ? UpdateMode::kSimultaneous : UpdateMode::kSweep;
      oc.objective = opt_objective == "aggregate" ? Objective::kAggregate : Objective::kCoverage;
      oc.max_iterations = opt_max_iter;
      oc.epsilon = opt_epsilon;
      const double t = db_to_linear(opt_threshold_db);
      const Regime regime = parse_regime(opt_opts.regime);
      const OptimizerResult r = optimize(model, regime, t, oc);
      std::string extra = "# regime=" + std::string(regime_name(regime)) + "\n";
      extra += "# threshold_db=" + num(opt_threshold_db) + "\n";
      extra += std::string("# stop_reason=") + stop_reason_name(r.reason) + " iterations=" +
               std::to_string(r.iterations) + "\n";
      emit(opt_opts.out, metadata_header(cfg, extra) + trace_csv(r));
      if (!opt_phases_out.empty()) emit(opt_phases_out, phase_file_csv(r.phases));
    } else if (*mc_cmd) {
      if (mc_opts.trials == 0) throw ConfigError("--trials", "mc-validate needs at least one trial");
      const ExperimentConfig cfg = load_experiment(mc_opts);
      SweepSpec spec;
      spec.t_grid = make_grid(mc_grid);
      spec.unit = grid_unit(mc_grid);
      spec.regime = parse_regime(mc_opts.regime);
      spec.phase_source = PhaseSource::kOptimized;
      spec.mc_trials = mc_opts.trials;
      spec.seed = mc_opts.seed;
      const SweepResult result = run_sweep(cfg, spec, workers);
      double worst = 0.0;
      for (const auto& row : result.rows) worst = std::max(worst, std::abs(row.pc_closed_form - *row.pc_mc));

      const LinkModel model = build_link_model(cfg.scenario, cfg.correlation);
      const PhaseConfig phases = PhaseConfig::initial(model.irs_count(), model.element_count());
      McOptions mo;
      mo.workers = workers;
      const MomentEstimate moment = second_moment(model, phases, mc_opts.trials, mc_opts.seed, mo);
      const double bm = aggregate_bm(model, phases);
      const double z = moment.std_error > 0.0 ? std::abs(moment.mean - bm) / moment.std_error : 0.0;

      std::string csv = sweep_csv(result);
      csv.insert(csv.find("t_db,"), "# max_abs_closed_form_minus_mc=" + num(worst) + "\n" +
                                        "# second_moment=" + num(moment.mean) + " std_error=" +
                                        num(moment.std_error) + " b_m=" + num(bm) + " z=" + num(z) + "\n");
      emit(mc_opts.out, csv);
      std::fprintf(stderr, "max |closed form - MC| = %.4g; second moment z-score = %.3f\n", worst, z);
    } else if (*reproduce) {
      ReproduceOptions ro;
      ro.t_grid_db = linear_grid(rep_t_min, rep_t_max, rep_points);
      ro.mc_trials = rep_opts.trials;
      ro.seed = rep_opts.seed;
      ro.direct_scale = rep_direct_scale;
      const FigureBundle bundle = reproduce_figure(which == "fig1" ? Figure::kFig1 : Figure::kFig2, ro, workers);
      emit(rep_opts.out, figure_csv(bundle));
    } else if (*gradcheck) {
      std::string out = "instance,surfaces,elements,rel_error_m_finite,rel_error_m_large,zero_branch\n";
      bool ok = true;
      for (int i = 0; i < gc_instances; ++i) {
        const GradcheckCase c = random_gradcheck_case(gc_seed + static_cast<std::uint64_t>(i));
        const double e1 = gradient_relative_error(c, Regime::kFiniteMLargeN, gc_step);
        const double e2 = gradient_relative_error(c, Regime::kLargeMFiniteN, gc_step);
        // Below the branch point the gradient must vanish exactly.
        const double saturating = 0.5 * c.model.gamma0 * aggregate_bm(c.model, c.phases);
        bool zero = true;
        for (int m = 0; m < c.model.irs_count(); ++m) {
          zero = zero && gradient_regime1(c.model, c.phases, saturating, m).isZero(0.0) &&
                 gradient_regime2(c.model, c.phases, saturating, m).isZero(0.0);
        }
        ok = ok && e1 <= gc_tol && e2 <= gc_tol && zero;
        out += std::to_string(i) + "," + std::to_string(c.model.irs_count()) + "," +
               std::to_string(c.model.element_count()) + "," + num(e1) + "," + num(e2) + "," +
               (zero ? "true" : "false") + "\n";
      }
      std::cout << out;
      if (!ok) {
        std::fprintf(stderr, "gradient check failed (tolerance %g)\n", gc_tol);
        return kExitNumeric;
      }
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kExitConfig;
  }
  return 0;
}
