#include "irscov/optimizer.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "irscov/errors.hpp"

namespace irscov {

namespace {

// dB/ds_m^* = beta_m (R1 o R2^T) phi_m
Eigen::VectorXcd bm_direction(const IrsStatistics& s, const Eigen::VectorXcd& phi) {
  const Eigen::MatrixXd hadamard = s.r1->entries.cwiseProduct(s.r2->entries.transpose());
  return s.cascaded() * (hadamard.cast<std::complex<double>>() * phi);
}

// dB_N/ds_m^*, n-th entry sum_p Q1_{np}[m] Q2_{np}[m] phi_{mp}
Eigen::VectorXcd bn_direction(const LinkModel& model, const Eigen::VectorXcd& phi, int m) {
  const auto& s = model.irs[m];
  const int order = model.element_count();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(order);
  for (int n = 0; n < order; ++n) {
    std::complex<double> acc = 0.0;
    for (int p = 0; p < order; ++p) {
      acc += (s.beta1 * s.r1->entries(n, p)) * (s.beta2 * s.r2->entries(n, p)) * phi(p);
    }
    out(n) = acc;
  }
  return out;
}

Eigen::VectorXcd block_direction(const LinkModel& model, Regime regime,
                                 const Eigen::VectorXcd& phi, int m) {
  return regime == Regime::kFiniteMLargeN ? bm_direction(model.irs[m], phi)
                                          : bn_direction(model, phi, m);
}

double surface_term(const LinkModel& model, Regime regime, const Eigen::VectorXcd& phi, int m) {
  if (regime == Regime::kFiniteMLargeN) {
    const auto& s = model.irs[m];
    return s.cascaded() * surface_quadratic_form(s.r1->entries, s.r2->entries, phi);
  }
  return bn_surface_term(model, phi, m);
}

void check_block(const LinkModel& model, const PhaseConfig& phases, int m) {
  model.validate();
  if (m < 0 || m >= model.irs_count()) throw std::out_of_range("surface index out of range");
  if (phases.irs_count() != model.irs_count() ||
      phases.per_irs[m].size() != model.element_count()) {
    throw std::invalid_argument("gradient: dimension mismatch");
  }
}

// Zero past the branch point, otherwise (P_c / beta_d) dB/ds_m^*.
Eigen::VectorXcd chain_coverage(const LinkModel& model, double b, double t_threshold,
                                Eigen::VectorXcd direction) {
  if (b >= t_threshold / model.gamma0) return Eigen::VectorXcd::Zero(direction.size());
  const double pc = coverage_closed_form(b, t_threshold, model.gamma0, model.beta_d);
  return (pc / model.beta_d) * direction;
}

double sum_terms(const std::vector<double>& terms) {
  return std::accumulate(terms.begin(), terms.end(), 0.0);
}

}  // namespace

Eigen::VectorXcd gradient_regime1(const LinkModel& model, const PhaseConfig& phases,
                                  double t_threshold, int m) {
  check_block(model, phases, m);
  const double b = aggregate_bm(model, phases);
  return chain_coverage(model, b, t_threshold, bm_direction(model.irs[m], phases.per_irs[m]));
}

Eigen::VectorXcd gradient_regime2(const LinkModel& model, const PhaseConfig& phases,
                                  double t_threshold, int m) {
  check_block(model, phases, m);
  const double b = aggregate_bn(model, phases);
  return chain_coverage(model, b, t_threshold, bn_direction(model, phases.per_irs[m], m));
}

Eigen::VectorXcd coverage_gradient(const LinkModel& model, const PhaseConfig& phases,
                                   Regime regime, double t_threshold, int m) {
  return regime == Regime::kFiniteMLargeN ? gradient_regime1(model, phases, t_threshold, m)
                                          : gradient_regime2(model, phases, t_threshold, m);
}

Eigen::VectorXcd aggregate_gradient(const LinkModel& model, const PhaseConfig& phases,
                                    Regime regime, int m) {
  check_block(model, phases, m);
  return block_direction(model, regime, phases.per_irs[m], m);
}

void OptimizerConfig::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("OptimizerConfig: epsilon must be > 0");
  if (!(shrink > 0.0 && shrink < 1.0)) throw std::invalid_argument("OptimizerConfig: shrink in (0,1)");
  if (!(initial_step > 0.0)) throw std::invalid_argument("OptimizerConfig: initial_step must be > 0");
  if (max_iterations < 1) throw std::invalid_argument("OptimizerConfig: max_iterations must be >= 1");
  if (max_backtracks < 0) throw std::invalid_argument("OptimizerConfig: max_backtracks must be >= 0");
  if (!(sufficient_increase >= 0.0)) {
    throw std::invalid_argument("OptimizerConfig: sufficient_increase must be >= 0");
  }
}

LineSearchResult backtracking_search(const std::function<double(const PhaseConfig&)>& objective,
                                     const PhaseConfig& current, double current_value,
                                     const BlockDirection& direction,
                                     const OptimizerConfig& config) {
  LineSearchResult result{0.0, current, current_value};
  double largest = 0.0;
  for (const auto& q : direction) {
    if (q.size() > 0) largest = std::max(largest, q.cwiseAbs().maxCoeff());
  }
  if (!(largest > 0.0)) return result;

  double step = config.initial_step;
  if (config.step_scale == StepScale::kGradientRelative) step /= largest;

  for (int k = 0; k <= config.max_backtracks; ++k, step *= config.shrink) {
    PhaseConfig candidate = current;
    double predicted = 0.0;
    for (std::size_t m = 0; m < direction.size(); ++m) {
      const auto& q = direction[m];
      if (q.size() == 0) continue;
      candidate.per_irs[m] = project_unit_modulus(current.per_irs[m] + step * q);
      predicted += 2.0 * q.dot(candidate.per_irs[m] - current.per_irs[m]).real();
    }
    const double value = objective(candidate);
    if (!std::isfinite(value)) throw NumericError("line search: non-finite objective");
    if (value >= current_value && value >= current_value + config.sufficient_increase * predicted) {
      result.step = step;
      result.candidate = std::move(candidate);
      result.value = value;
      return result;
    }
  }
  return result;
}

const char* stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::kConverged: return "converged";
    case StopReason::kSaturated: return "saturated";
    case StopReason::kMaxIterations: return "max-iterations";
    case StopReason::kStalled: return "stalled";
  }
  return "unknown";
}

OptimizerResult optimize(const LinkModel& model, Regime regime, double t_threshold,
                         const OptimizerConfig& config) {
  return optimize_from(model, regime, t_threshold,
                       PhaseConfig::initial(model.irs_count(), model.element_count()), config);
}

OptimizerResult optimize_from(const LinkModel& model, Regime regime, double t_threshold,
                              PhaseConfig start, const OptimizerConfig& config) {
  model.validate();
  config.validate();
  if (!(t_threshold >= 0.0)) throw std::invalid_argument("optimize: threshold must be >= 0");
  if (start.irs_count() != model.irs_count() || start.element_count() != model.element_count()) {
    throw std::invalid_argument("optimize: start phases do not match the model");
  }
  const int surfaces = model.irs_count();
  const bool by_coverage = config.objective == Objective::kCoverage;
  auto coverage_of = [&](double b) {
    return coverage_closed_form(b, t_threshold, model.gamma0, model.beta_d);
  };
  auto value_of = [&](double b) { return by_coverage ? coverage_of(b) : b; };

  OptimizerResult result;
  result.phases = std::move(start);
  std::vector<double> terms(surfaces);
  for (int m = 0; m < surfaces; ++m) terms[m] = surface_term(model, regime, result.phases.per_irs[m], m);
  double b = sum_terms(terms);
  double value = value_of(b);
  if (!std::isfinite(value)) throw NumericError("optimize: non-finite objective at start");
  result.trace.push_back({0, coverage_of(b), b, 0.0, 0.0});

  auto saturated = [&] { return by_coverage && b >= t_threshold / model.gamma0; };
  auto finish = [&](StopReason reason, int iterations) {
    result.reason = reason;
    result.iterations = iterations;
    result.b = b;
    result.coverage = coverage_of(b);
    return result;
  };
  if (saturated()) return finish(StopReason::kSaturated, 0);

  auto scaled = [&](Eigen::VectorXcd direction) {
    return by_coverage ? Eigen::VectorXcd((coverage_of(b) / model.beta_d) * direction) : direction;
  };

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    const double previous = value;
    double step_taken = 0.0;
    double grad_sq = 0.0;

    if (config.mode == UpdateMode::kSweep) {
      for (int m = 0; m < surfaces; ++m) {
        BlockDirection direction(surfaces);
        direction[m] = scaled(block_direction(model, regime, result.phases.per_irs[m], m));
        grad_sq += direction[m].squaredNorm();
        auto objective = [&](const PhaseConfig& candidate) {
          std::vector<double> trial = terms;
          trial[m] = surface_term(model, regime, candidate.per_irs[m], m);
          return value_of(sum_terms(trial));
        };
        LineSearchResult ls = backtracking_search(objective, result.phases, value, direction, config);
        if (ls.step > 0.0) {
          result.phases = std::move(ls.candidate);
          terms[m] = surface_term(model, regime, result.phases.per_irs[m], m);
          b = sum_terms(terms);
          value = value_of(b);
          step_taken = std::max(step_taken, ls.step);
        }
        if (saturated()) break;
      }
    } else {
      BlockDirection direction(surfaces);
      for (int m = 0; m < surfaces; ++m) {
        direction[m] = scaled(block_direction(model, regime, result.phases.per_irs[m], m));
        grad_sq += direction[m].squaredNorm();
      }
      auto objective = [&](const PhaseConfig& candidate) {
        std::vector<double> trial(surfaces);
        for (int m = 0; m < surfaces; ++m) trial[m] = surface_term(model, regime, candidate.per_irs[m], m);
        return value_of(sum_terms(trial));
      };
      LineSearchResult ls = backtracking_search(objective, result.phases, value, direction, config);
      if (ls.step > 0.0) {
        result.phases = std::move(ls.candidate);
        for (int m = 0; m < surfaces; ++m) terms[m] = surface_term(model, regime, result.phases.per_irs[m], m);
        b = sum_terms(terms);
        value = value_of(b);
        step_taken = ls.step;
      }
    }

    if (!std::isfinite(value)) throw NumericError("optimize: non-finite objective");
    result.trace.push_back({iter, coverage_of(b), b, step_taken, std::sqrt(grad_sq)});

    if (saturated()) return finish(StopReason::kSaturated, iter);
    const double delta = value - previous;
    if (delta * delta < config.epsilon) {
      return finish(step_taken > 0.0 ? StopReason::kConverged : StopReason::kStalled, iter);
    }
  }
  return finish(StopReason::kMaxIterations, config.max_iterations);
}

std::string trace_csv(const OptimizerResult& result) {
  std::string out = "iteration,coverage,b,step,gradient_norm\n";
  char buf[160];
  for (const auto& r : result.trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", r.iteration, r.coverage, r.b,
                  r.step, r.gradient_norm);
    out += buf;
  }
  return out;
}

}  // namespace irscov
