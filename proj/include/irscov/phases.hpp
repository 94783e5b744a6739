#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace irscov {

// Unit-modulus reflection coefficients, one length-N vector per surface
// (the diagonal of Phi_m). The element-wise regrouping Psi_n is exposed by
// `element_group`.
struct PhaseConfig {
  std::vector<Eigen::VectorXcd> per_irs;

  int irs_count() const { return static_cast<int>(per_irs.size()); }
  int element_count() const { return per_irs.empty() ? 0 : static_cast<int>(per_irs.front().size()); }

  // diag(Psi_n): the n-th (0-based) coefficient of every surface.
  Eigen::VectorXcd element_group(int n) const;

  // max | |phi_mn| - 1 |
  double max_modulus_error() const;

  // exp(j pi/2) on every element.
  static PhaseConfig initial(int irs_count, int element_count);
  static PhaseConfig random(int irs_count, int element_count, std::uint64_t seed);
  static PhaseConfig from_angles(const std::vector<std::vector<double>>& theta);
};

// Entry-wise exp(j arg(z)); exact zeros map to 1.
Eigen::VectorXcd project_unit_modulus(const Eigen::VectorXcd& raw);

}  // namespace irscov
