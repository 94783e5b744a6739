#include "irscov/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "irscov/errors.hpp"
#include "irscov/montecarlo.hpp"
#include "irscov/parallel.hpp"

#ifndef IRSCOV_BUILD_ID
#define IRSCOV_BUILD_ID "unknown"
#endif

namespace irscov {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_optional(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

double to_linear(double value, ThresholdUnit unit) {
  switch (unit) {
    case ThresholdUnit::kDb: return db_to_linear(value);
    case ThresholdUnit::kLinear: return value;
    case ThresholdUnit::kRate: return convert_rate_to_threshold(value);
  }
  return value;
}

const char* unit_name(ThresholdUnit unit) {
  switch (unit) {
    case ThresholdUnit::kDb: return "db";
    case ThresholdUnit::kLinear: return "linear";
    case ThresholdUnit::kRate: return "rate-bps-hz";
  }
  return "unknown";
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

}  // namespace

double convert_rate_to_threshold(double rate_bps_hz) {
  if (!(rate_bps_hz >= 0.0)) throw std::invalid_argument("rate must be >= 0");
  return std::exp2(rate_bps_hz) - 1.0;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) {
  return linear > 0.0 ? 10.0 * std::log10(linear) : -std::numeric_limits<double>::infinity();
}

const char* phase_source_name(PhaseSource source) {
  switch (source) {
    case PhaseSource::kInitial: return "initial";
    case PhaseSource::kOptimized: return "optimized";
    case PhaseSource::kRandom: return "random";
    case PhaseSource::kFile: return "file";
  }
  return "unknown";
}

const char* build_id() { return IRSCOV_BUILD_ID; }

void SweepSpec::validate() const {
  if (t_grid.empty()) throw ConfigError("", "threshold grid is empty");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!std::isfinite(t_grid[i])) throw ConfigError("", "non-finite threshold in grid");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) {
      throw ConfigError("", "threshold grid must be strictly increasing");
    }
  }
  if (unit != ThresholdUnit::kDb && t_grid.front() < 0.0) {
    throw ConfigError("", "linear thresholds and rates must be >= 0");
  }
  if (phase_source == PhaseSource::kFile && phase_file.empty()) {
    throw ConfigError("", "phase source 'file' requires a phase file");
  }
  optimizer.validate();
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  if (points < 1) throw std::invalid_argument("linear_grid: points must be >= 1");
  if (points == 1) return {lo};
  std::vector<double> out(points);
  for (int i = 0; i < points; ++i) out[i] = lo + (hi - lo) * i / (points - 1);
  return out;
}

SweepResult run_sweep(const ExperimentConfig& config, const SweepSpec& spec, std::size_t workers) {
  spec.validate();
  const LinkModel model = build_link_model(config.scenario, config.correlation);
  const int surfaces = model.irs_count();
  const int order = model.element_count();
  const std::size_t points = spec.t_grid.size();

  std::vector<double> t_linear(points);
  for (std::size_t i = 0; i < points; ++i) t_linear[i] = to_linear(spec.t_grid[i], spec.unit);

  std::vector<PhaseConfig> phases(points);
  switch (spec.phase_source) {
    case PhaseSource::kInitial:
      phases.assign(points, PhaseConfig::initial(surfaces, order));
      break;
    case PhaseSource::kRandom:
      phases.assign(points, PhaseConfig::random(surfaces, order, spec.phase_seed));
      break;
    case PhaseSource::kFile:
      phases.assign(points, load_phase_file(spec.phase_file, surfaces, order));
      break;
    case PhaseSource::kOptimized:
      parallel_for(points, workers, [&](std::size_t i) {
        phases[i] = optimize(model, spec.regime, t_linear[i], spec.optimizer).phases;
      });
      break;
  }

  SweepResult result{{}, config, spec};
  result.rows.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    ResultRow& row = result.rows[i];
    row.t_linear = t_linear[i];
    row.t_db = linear_to_db(t_linear[i]);
    row.b_value = aggregate(model, phases[i], spec.regime);
    row.pc_closed_form = coverage_closed_form(row.b_value, t_linear[i], model.gamma0, model.beta_d);
    row.m_count = surfaces;
    row.n_count = order;
    row.regime = spec.regime;
    row.correlated = config.correlation.model == CorrelationModel::kSinc;
    row.seed = spec.seed;
  }

  if (spec.mc_trials > 0) {
    McOptions mc;
    mc.workers = workers;
    auto fill = [&](std::size_t i, const McEstimate& e) {
      result.rows[i].pc_mc = e.coverage_hat;
      result.rows[i].ci_low = e.ci_low;
      result.rows[i].ci_high = e.ci_high;
    };
    if (spec.phase_source == PhaseSource::kOptimized) {
      for (std::size_t i = 0; i < points; ++i) {
        fill(i, estimate_coverage(model, phases[i], t_linear[i], spec.mc_trials, spec.seed, mc));
      }
    } else {
      const auto estimates =
          estimate_coverage_grid(model, phases.front(), t_linear, spec.mc_trials, spec.seed, mc);
      for (std::size_t i = 0; i < points; ++i) fill(i, estimates[i]);
    }
  }
  return result;
}

std::string metadata_header(const ExperimentConfig& config, const std::string& extra) {
  const LinkModel model = build_link_model(config.scenario, config.correlation);
  std::string out;
  out += "# irscov schema_version=" + std::to_string(kConfigSchemaVersion) + "\n";
  out += std::string("# build_id=") + build_id() + "\n";
  out += "# sinc_convention=normalized sin(pi x)/(pi x)\n";
  out += std::string("# path_loss_convention=") + sign_convention_name(config.scenario.path_loss.sign) + "\n";
  out += std::string("# correlation_model=") +
         (config.correlation.model == CorrelationModel::kSinc ? "sinc" : "uncorrelated") + "\n";
  out += std::string("# diagonal_normalization=") + normalization_name(config.correlation.normalization) + "\n";
  out += std::string("# noise=") +
         (config.scenario.radio.add_noise_figure ? "floor+figure" : "floor") + "\n";
  out += std::string("# rng=") + kRngIdentity + "\n";
  out += "# gamma0=" + fmt(model.gamma0) + " beta_d=" + fmt(model.beta_d) + "\n";
  out += extra;
  return out;
}

std::string sweep_csv(const SweepResult& result) {
  const SweepSpec& spec = result.spec;
  std::string extra;
  extra += std::string("# threshold_unit=") + unit_name(spec.unit) + "\n";
  extra += std::string("# regime=") + regime_name(spec.regime) + "\n";
  extra += std::string("# phase_source=") + phase_source_name(spec.phase_source) + "\n";
  extra += "# mc_trials=" + std::to_string(spec.mc_trials) + " seed=" + std::to_string(spec.seed) + "\n";
  std::string out = metadata_header(result.config, extra);
  out += "t_db,t_linear,b_value,pc_closed_form,pc_mc,ci_low,ci_high,m_count,n_count,regime,correlated,seed\n";
  for (const auto& r : result.rows) {
    out += fmt(r.t_db) + "," + fmt(r.t_linear) + "," + fmt(r.b_value) + "," + fmt(r.pc_closed_form) +
           "," + fmt_optional(r.pc_mc) + "," + fmt_optional(r.ci_low) + "," + fmt_optional(r.ci_high) +
           "," + std::to_string(r.m_count) + "," + std::to_string(r.n_count) + "," +
           regime_name(r.regime) + "," + (r.correlated ? "true" : "false") + "," +
           std::to_string(r.seed) + "\n";
  }
  return out;
}

std::string sweep_dat(const SweepResult& result) {
  std::string out = "# t_db t_linear b_value pc_closed_form pc_mc ci_low ci_high\n";
  for (const auto& r : result.rows) {
    out += fmt(r.t_db) + " " + fmt(r.t_linear) + " " + fmt(r.b_value) + " " + fmt(r.pc_closed_form) + " " +
           (r.pc_mc ? fmt(*r.pc_mc) : "nan") + " " + (r.ci_low ? fmt(*r.ci_low) : "nan") + " " +
           (r.ci_high ? fmt(*r.ci_high) : "nan") + "\n";
  }
  return out;
}

PhaseConfig load_phase_file(const std::filesystem::path& path, int irs_count, int element_count) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open phase file " + path.string());
  std::vector<std::vector<double>> theta(irs_count, std::vector<double>(element_count, std::nan("")));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("irs,", 0) == 0) continue;
    const auto fields = split(line, ',');
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (fields.size() != 3) throw ConfigError(where, "expected irs,element,theta_rad");
    int m = 0, n = 0;
    double t = 0.0;
    try {
      m = std::stoi(fields[0]);
      n = std::stoi(fields[1]);
      t = std::stod(fields[2]);
    } catch (const std::exception&) {
      throw ConfigError(where, "malformed number");
    }
    if (m < 0 || m >= irs_count || n < 0 || n >= element_count) {
      throw ConfigError(where, "index out of range");
    }
    theta[m][n] = t;
  }
  for (int m = 0; m < irs_count; ++m) {
    for (int n = 0; n < element_count; ++n) {
      if (std::isnan(theta[m][n])) {
        throw ConfigError(path.string(), "missing phase for irs " + std::to_string(m) + " element " +
                                             std::to_string(n));
      }
    }
  }
  return PhaseConfig::from_angles(theta);
}

std::string phase_file_csv(const PhaseConfig& phases) {
  std::string out = "irs,element,theta_rad\n";
  for (int m = 0; m < phases.irs_count(); ++m) {
    for (int n = 0; n < phases.element_count(); ++n) {
      out += std::to_string(m) + "," + std::to_string(n) + "," + fmt(std::arg(phases.per_irs[m](n))) + "\n";
    }
  }
  return out;
}

FigureBundle reproduce_figure(Figure figure, const ReproduceOptions& options, std::size_t workers) {
  FigureBundle bundle;
  bundle.figure = figure;

  auto add_curve = [&](int m, int side, bool correlated, Regime regime) {
    ExperimentConfig cfg;
    cfg.scenario = reference_scenario(m, side);
    cfg.scenario.path_loss.direct_scale = options.direct_scale;
    cfg.correlation.model = correlated ? CorrelationModel::kSinc : CorrelationModel::kUncorrelated;
    SweepSpec spec;
    spec.t_grid = options.t_grid_db;
    spec.unit = ThresholdUnit::kDb;
    spec.regime = regime;
    spec.phase_source = correlated ? PhaseSource::kOptimized : PhaseSource::kInitial;
    spec.mc_trials = options.mc_trials;
    spec.seed = options.seed;
    const std::string label = "N" + std::to_string(side * side) + "_M" + std::to_string(m) +
                              (correlated ? "_corr" : "_uncorr");
    bundle.curves.push_back({label, run_sweep(cfg, spec, workers)});
  };

  if (figure == Figure::kFig1) {
    for (int side : {10, 15}) {
      for (bool correlated : {true, false}) {
        for (int m : {15, 34}) add_curve(m, side, correlated, Regime::kFiniteMLargeN);
      }
    }
  } else {
    for (int m : {15, 34}) {
      for (int side : {10, 15}) add_curve(m, side, true, Regime::kLargeMFiniteN);
    }
  }
  return bundle;
}

std::string figure_csv(const FigureBundle& bundle) {
  if (bundle.curves.empty()) return {};
  const auto& first = bundle.curves.front().sweep;
  std::string extra = std::string("# figure=") + (bundle.figure == Figure::kFig1 ? "fig1" : "fig2") + "\n";
  extra += "# threshold_unit=db (x axis is T in dB; use --rate on sweep for spectral-efficiency input)\n";
  extra += "# mc_trials=" + std::to_string(first.spec.mc_trials) + " seed=" + std::to_string(first.spec.seed) + "\n";
  for (const auto& c : bundle.curves) {
    extra += "# curve " + c.label + ": M=" + std::to_string(c.sweep.rows.front().m_count) +
             " N=" + std::to_string(c.sweep.rows.front().n_count) + " regime=" +
             regime_name(c.sweep.spec.regime) + " phases=" + phase_source_name(c.sweep.spec.phase_source) + "\n";
  }
  std::string out = metadata_header(first.config, extra);
  out += "t_db";
  for (const auto& c : bundle.curves) {
    for (const char* col : {"b", "pc_closed_form", "pc_mc", "ci_low", "ci_high"}) {
      out += "," + c.label + "." + col;
    }
  }
  out += "\n";
  for (std::size_t i = 0; i < first.rows.size(); ++i) {
    out += fmt(first.rows[i].t_db);
    for (const auto& c : bundle.curves) {
      const auto& r = c.sweep.rows[i];
      out += "," + fmt(r.b_value) + "," + fmt(r.pc_closed_form) + "," + fmt_optional(r.pc_mc) + "," +
             fmt_optional(r.ci_low) + "," + fmt_optional(r.ci_high);
    }
    out += "\n";
  }
  return out;
}

}  // namespace irscov
