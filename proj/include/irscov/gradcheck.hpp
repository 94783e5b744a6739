#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "irscov/dequiv.hpp"
#include "irscov/phases.hpp"
#include "irscov/spatialcorr.hpp"

namespace irscov {

// Small random instance in the active branch (B < T/gamma0): up to 4
// surfaces of up to 8 elements, unit-diagonal sinc correlation, O(1) path
// losses and gamma0 = 1.
struct GradcheckCase {
  LinkModel model;
  PhaseConfig phases;
  double t_threshold = 0.0;
};

GradcheckCase random_gradcheck_case(std::uint64_t seed);

// d f / d theta_n from a Wirtinger derivative g = df/ds^* at s = exp(j theta).
Eigen::VectorXd angle_derivative(const Eigen::VectorXcd& wirtinger, const Eigen::VectorXcd& s);

// Central differences of the closed-form coverage in the angles of surface m.
Eigen::VectorXd coverage_angle_differences(const LinkModel& model, const PhaseConfig& phases,
                                           Regime regime, double t_threshold, int m,
                                           double step = 1e-6);

// max_m ||analytic - fd||_inf / ||fd||_inf over every surface.
double gradient_relative_error(const GradcheckCase& c, Regime regime, double step = 1e-6);

}  // namespace irscov
