#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "irscov/dequiv.hpp"
#include "irscov/phases.hpp"
#include "irscov/spatialcorr.hpp"

namespace irscov {

// Wirtinger derivative dP_c/ds_m^* of the closed-form coverage for surface m
// (0-based). Zero when B >= T/gamma0.
//   regime 1: (beta_m/beta_d) P_c diag(R_{m,1} Phi_m R_{m,2})
//   regime 2: (beta_m/beta_d) P_c sum_p c_p, [c_p]_n = r1_{np} r2_{np} phi_{mp}
Eigen::VectorXcd gradient_regime1(const LinkModel& model, const PhaseConfig& phases,
                                  double t_threshold, int m);
Eigen::VectorXcd gradient_regime2(const LinkModel& model, const PhaseConfig& phases,
                                  double t_threshold, int m);

Eigen::VectorXcd coverage_gradient(const LinkModel& model, const PhaseConfig& phases,
                                   Regime regime, double t_threshold, int m);

// dB/ds_m^* (no coverage chain factor).
Eigen::VectorXcd aggregate_gradient(const LinkModel& model, const PhaseConfig& phases,
                                    Regime regime, int m);

enum class UpdateMode {
  kSweep,         // surfaces updated one after another within an iteration
  kSimultaneous,  // one step length shared by all surfaces
};

enum class StepScale {
  kAbsolute,          // trial steps mu0 shrink^k
  kGradientRelative,  // trial steps mu0 shrink^k / max_n |q_n|
};

enum class Objective {
  kCoverage,   // closed-form P_c
  kAggregate,  // B itself
};

struct OptimizerConfig {
  double epsilon = 1e-10;  // stop when |P_c^{i+1} - P_c^i|^2 < epsilon
  int max_iterations = 500;
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_increase = 1e-4;
  int max_backtracks = 60;
  UpdateMode mode = UpdateMode::kSweep;
  StepScale step_scale = StepScale::kGradientRelative;
  Objective objective = Objective::kCoverage;

  void validate() const;
};

// Ascent direction for a subset of surfaces; empty entries are not moved.
using BlockDirection = std::vector<Eigen::VectorXcd>;

struct LineSearchResult {
  double step = 0.0;  // 0 when no trial step was acceptable
  PhaseConfig candidate;
  double value = 0.0;
};

// Backtracking over mu = base * shrink^k, k = 0..max_backtracks, where base
// is the initial step (divided by max|q| under kGradientRelative). A trial
// point P(s + mu q) is accepted when
//   f(new) >= f(s)  and  f(new) >= f(s) + c * 2 Re<q, new - s>.
LineSearchResult backtracking_search(const std::function<double(const PhaseConfig&)>& objective,
                                     const PhaseConfig& current, double current_value,
                                     const BlockDirection& direction,
                                     const OptimizerConfig& config);

enum class StopReason { kConverged, kSaturated, kMaxIterations, kStalled };

const char* stop_reason_name(StopReason reason);

struct IterationRecord {
  int iteration = 0;
  double coverage = 0.0;
  double b = 0.0;
  double step = 0.0;
  double gradient_norm = 0.0;
};

struct OptimizerResult {
  PhaseConfig phases;
  std::vector<IterationRecord> trace;  // trace[0] is the initialization
  double coverage = 0.0;
  double b = 0.0;
  int iterations = 0;
  StopReason reason = StopReason::kConverged;
};

// Projected gradient ascent from exp(j pi/2) 1_N on every surface.
OptimizerResult optimize(const LinkModel& model, Regime regime, double t_threshold,
                         const OptimizerConfig& config = {});

OptimizerResult optimize_from(const LinkModel& model, Regime regime, double t_threshold,
                              PhaseConfig start, const OptimizerConfig& config = {});

// "iteration,coverage,b,step,gradient_norm" CSV.
std::string trace_csv(const OptimizerResult& result);

}  // namespace irscov
