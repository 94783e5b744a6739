#pragma once

#include "irscov/phases.hpp"
#include "irscov/spatialcorr.hpp"

namespace irscov {

// Deterministic equivalents of the cascaded-channel power.
//
// B_M = sum_m beta_m tr(R_{m,1} Phi_m R_{m,2} Phi_m^H)
// B_N = sum_n sum_p tr(Q_{np,1} Psi_n Q_{np,2} Psi_p^H)
//
// Both are the unnormalized forms. They equal the exact expectation
// E|sum_m h_{m,1}^H Phi_m h_{m,2}|^2, so the surviving term of the large-N /
// large-M expansion is a plain second moment. B_M and B_N are the same
// quadratic form summed in a different order.

enum class Regime {
  kFiniteMLargeN,  // B_M
  kLargeMFiniteN,  // B_N
};

const char* regime_name(Regime regime);

// phi^H (R1 o R2^T) phi for one surface, without the path loss.
double surface_quadratic_form(const Eigen::MatrixXd& r1, const Eigen::MatrixXd& r2,
                              const Eigen::VectorXcd& phi);

double aggregate_bm(const LinkModel& model, const PhaseConfig& phases);

enum class BnEvaluation {
  kReduced,  // scalar loop over (n, p, m), exploiting the diagonal Q
  kLiteral,  // materializes every Q_{np,k} and Psi_n as M x M matrices
};

double aggregate_bn(const LinkModel& model, const PhaseConfig& phases,
                    BnEvaluation evaluation = BnEvaluation::kReduced);

// Contribution of surface m to B_N, evaluated through the Q diagonals.
double bn_surface_term(const LinkModel& model, const Eigen::VectorXcd& phi, int m);

double aggregate(const LinkModel& model, const PhaseConfig& phases, Regime regime);

// exp(-(T/gamma0 - b)/beta_d) if b < T/gamma0, 1 otherwise.
double coverage_closed_form(double b, double t_threshold, double gamma0, double beta_d);

// E[gamma] = gamma0 (b + beta_d).
double mean_snr(double b, double beta_d, double gamma0);

// Largest T with closed-form coverage >= level. level = 1 gives gamma0 b.
double knee_threshold(double b, double gamma0, double beta_d, double level = 1.0);

struct DeResult {
  double b = 0.0;
  double coverage = 0.0;
  Regime regime = Regime::kFiniteMLargeN;
  double threshold_ratio = 0.0;  // T / gamma0
};

DeResult evaluate_closed_form(const LinkModel& model, const PhaseConfig& phases, Regime regime,
                              double t_threshold);

}  // namespace irscov
