#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "irscov/scenario.hpp"

namespace irscov {

// Normalized sinc: sin(pi x) / (pi x), equal to 1 at x = 0.
//
// Every correlation value in this library uses the normalized convention;
// switching to sin(x)/x would change every derived number.
double sinc_normalized(double x);

// Position of element `index` (1-based, row-major over n_h columns) inside
// its panel: [0, mod(index-1, n_h) d_h, floor((index-1)/n_h) d_v].
Eigen::Vector3d element_position(int index, const PanelGeometry& panel);

enum class CorrelationModel {
  kSinc,          // isotropic-scattering sinc kernel
  kUncorrelated,  // c * I, no kernel evaluation
};

enum class DiagonalNormalization {
  kElementArea,  // diagonal d_h d_v
  kUnit,         // diagonal 1
};

struct CorrelationOptions {
  CorrelationModel model = CorrelationModel::kSinc;
  DiagonalNormalization normalization = DiagonalNormalization::kElementArea;
};

struct CorrelationMatrix {
  Eigen::MatrixXd entries;  // real symmetric, N x N
  bool repaired = false;    // true if any eigenvalue had to be clamped

  int order() const { return static_cast<int>(entries.rows()); }
};

// r_np = c sinc(2 |u_n - u_p| / lambda) with c the diagonal value, followed
// by a PSD repair (negative eigenvalues clamped to zero, then a congruence
// rescale so the diagonal is exactly c again).
CorrelationMatrix build_correlation(const PanelGeometry& panel, double wavelength,
                                    DiagonalNormalization normalization =
                                        DiagonalNormalization::kElementArea);

CorrelationMatrix uncorrelated_matrix(const PanelGeometry& panel,
                                      DiagonalNormalization normalization =
                                          DiagonalNormalization::kElementArea);

CorrelationMatrix make_correlation(const PanelGeometry& panel, double wavelength,
                                   const CorrelationOptions& options);

// L with L L^T = R, from the eigenpairs whose eigenvalue exceeds
// 1e-12 * lambda_max.
struct SamplingFactor {
  Eigen::MatrixXd factor;  // N x r

  int rank() const { return static_cast<int>(factor.cols()); }
};

SamplingFactor sampling_factor(const CorrelationMatrix& r);

// Second-order statistics of every cascaded link. Identical panels share
// one CorrelationMatrix instance.
struct IrsStatistics {
  double beta1 = 0.0;
  double beta2 = 0.0;
  std::shared_ptr<const CorrelationMatrix> r1;
  std::shared_ptr<const CorrelationMatrix> r2;

  double cascaded() const { return beta1 * beta2; }
};

struct LinkModel {
  std::vector<IrsStatistics> irs;
  double beta_d = 0.0;
  double gamma0 = 1.0;

  int irs_count() const { return static_cast<int>(irs.size()); }
  int element_count() const;
  void validate() const;
};

LinkModel build_link_model(const Scenario& scenario, const CorrelationOptions& options = {});

// Diagonal of Q_{np,link} (0-based element indices n, p; link 1 or 2):
// entry m is beta_{m,link} r^{link}_{np,m}.
Eigen::VectorXd build_q(int n, int p, int link, const LinkModel& model);

// Little-endian binary dump: uint64 order, then order*order float64 values
// in row-major order.
void write_matrix_binary(const std::filesystem::path& path, const Eigen::MatrixXd& matrix);
Eigen::MatrixXd read_matrix_binary(const std::filesystem::path& path);

// "index,eigenvalue" CSV, eigenvalues in descending order.
void write_eigen_spectrum_csv(const std::filesystem::path& path, const Eigen::MatrixXd& matrix);

}  // namespace irscov
