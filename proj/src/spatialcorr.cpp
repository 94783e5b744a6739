#include "irscov/spatialcorr.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <string>

#include "irscov/errors.hpp"

namespace irscov {

namespace {

double diagonal_value(const PanelGeometry& panel, DiagonalNormalization normalization) {
  return normalization == DiagonalNormalization::kElementArea ? panel.d_h * panel.d_v : 1.0;
}

// Clamp negative eigenvalues, then rescale by congruence so the diagonal is
// `diag` again. Congruence keeps the result PSD.
bool repair_psd(Eigen::MatrixXd& r, double diag) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r);
  if (eig.info() != Eigen::Success) {
    throw NumericError("eigendecomposition failed for correlation matrix of order " +
                       std::to_string(r.rows()));
  }
  if (eig.eigenvalues().minCoeff() >= 0.0) return false;

  const Eigen::VectorXd clamped = eig.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd fixed = eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose();
  const Eigen::VectorXd scale = (diag / fixed.diagonal().array()).sqrt().matrix();
  fixed = scale.asDiagonal() * fixed * scale.asDiagonal();
  r = 0.5 * (fixed + fixed.transpose());
  r.diagonal().setConstant(diag);
  return true;
}

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
    throw std::runtime_error("truncated matrix file");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

double sinc_normalized(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

Eigen::Vector3d element_position(int index, const PanelGeometry& panel) {
  if (index < 1 || index > panel.element_count()) {
    throw std::out_of_range("element_position: index " + std::to_string(index) +
                            " outside [1, " + std::to_string(panel.element_count()) + "]");
  }
  const int k = index - 1;
  return {0.0, (k % panel.n_h) * panel.d_h, (k / panel.n_h) * panel.d_v};
}

CorrelationMatrix build_correlation(const PanelGeometry& panel, double wavelength,
                                    DiagonalNormalization normalization) {
  if (!(wavelength > 0.0)) throw std::invalid_argument("build_correlation: wavelength must be > 0");
  panel.validate();
  const int n = panel.element_count();
  const double diag = diagonal_value(panel, normalization);

  std::vector<Eigen::Vector3d> u(n);
  for (int i = 0; i < n; ++i) u[i] = element_position(i + 1, panel);

  CorrelationMatrix out;
  out.entries.resize(n, n);
  for (int i = 0; i < n; ++i) {
    out.entries(i, i) = diag;
    for (int j = i + 1; j < n; ++j) {
      const double v = diag * sinc_normalized(2.0 * (u[i] - u[j]).norm() / wavelength);
      out.entries(i, j) = v;
      out.entries(j, i) = v;
    }
  }
  out.repaired = repair_psd(out.entries, diag);
  return out;
}

CorrelationMatrix uncorrelated_matrix(const PanelGeometry& panel,
                                      DiagonalNormalization normalization) {
  panel.validate();
  const int n = panel.element_count();
  CorrelationMatrix out;
  out.entries = Eigen::MatrixXd::Identity(n, n) * diagonal_value(panel, normalization);
  return out;
}

CorrelationMatrix make_correlation(const PanelGeometry& panel, double wavelength,
                                   const CorrelationOptions& options) {
  if (options.model == CorrelationModel::kUncorrelated) {
    return uncorrelated_matrix(panel, options.normalization);
  }
  return build_correlation(panel, wavelength, options.normalization);
}

SamplingFactor sampling_factor(const CorrelationMatrix& r) {
  const int n = r.order();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r.entries);
  if (eig.info() != Eigen::Success) {
    throw NumericError("eigendecomposition failed for sampling factor of order " +
                       std::to_string(n));
  }
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double largest = n > 0 ? values(n - 1) : 0.0;
  SamplingFactor out;
  if (!(largest > 0.0)) {
    out.factor.resize(n, 0);
    return out;
  }
  const double cutoff = 1e-12 * largest;
  int first = n;
  while (first > 0 && values(first - 1) > cutoff) --first;
  const int rank = n - first;
  // Columns in descending eigenvalue order.
  out.factor.resize(n, rank);
  for (int k = 0; k < rank; ++k) {
    const int src = n - 1 - k;
    out.factor.col(k) = eig.eigenvectors().col(src) * std::sqrt(values(src));
  }
  return out;
}

int LinkModel::element_count() const {
  return irs.empty() || !irs.front().r1 ? 0 : irs.front().r1->order();
}

void LinkModel::validate() const {
  if (irs.empty()) throw std::invalid_argument("LinkModel: no surfaces");
  const int n = element_count();
  for (const auto& s : irs) {
    if (!s.r1 || !s.r2) throw std::invalid_argument("LinkModel: missing correlation matrix");
    if (s.r1->order() != n || s.r2->order() != n) {
      throw std::invalid_argument("LinkModel: correlation order mismatch");
    }
    if (!(s.beta1 >= 0.0) || !(s.beta2 >= 0.0)) {
      throw std::invalid_argument("LinkModel: negative path loss");
    }
  }
  if (!(beta_d >= 0.0) || !(gamma0 > 0.0)) {
    throw std::invalid_argument("LinkModel: beta_d must be >= 0 and gamma0 > 0");
  }
}

LinkModel build_link_model(const Scenario& scenario, const CorrelationOptions& options) {
  scenario.validate();
  const LinkGains gains = cascaded_gains(scenario);
  auto shared = std::make_shared<const CorrelationMatrix>(
      make_correlation(scenario.panel, scenario.radio.wavelength(), options));

  LinkModel model;
  model.beta_d = gains.direct;
  model.gamma0 = transmit_snr(scenario.radio);
  for (int m = 0; m < scenario.irs_count(); ++m) {
    model.irs.push_back({gains.link1[m], gains.link2[m], shared, shared});
  }
  return model;
}

Eigen::VectorXd build_q(int n, int p, int link, const LinkModel& model) {
  const int order = model.element_count();
  if (n < 0 || n >= order || p < 0 || p >= order) {
    throw std::out_of_range("build_q: element index out of range");
  }
  if (link != 1 && link != 2) throw std::invalid_argument("build_q: link must be 1 or 2");
  Eigen::VectorXd q(model.irs_count());
  for (int m = 0; m < model.irs_count(); ++m) {
    const auto& s = model.irs[m];
    q(m) = link == 1 ? s.beta1 * s.r1->entries(n, p) : s.beta2 * s.r2->entries(n, p);
  }
  return q;
}

void write_matrix_binary(const std::filesystem::path& path, const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols()) throw std::invalid_argument("matrix must be square");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  put_u64(out, static_cast<std::uint64_t>(matrix.rows()));
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      put_u64(out, std::bit_cast<std::uint64_t>(matrix(i, j)));
    }
  }
}

Eigen::MatrixXd read_matrix_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const auto order = static_cast<Eigen::Index>(get_u64(in));
  Eigen::MatrixXd m(order, order);
  for (Eigen::Index i = 0; i < order; ++i) {
    for (Eigen::Index j = 0; j < order; ++j) m(i, j) = std::bit_cast<double>(get_u64(in));
  }
  return m;
}

void write_eigen_spectrum_csv(const std::filesystem::path& path, const Eigen::MatrixXd& matrix) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(matrix, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw NumericError("eigendecomposition failed for matrix of order " +
                       std::to_string(matrix.rows()));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "index,eigenvalue\n";
  char buf[64];
  const auto n = eig.eigenvalues().size();
  for (Eigen::Index k = 0; k < n; ++k) {
    std::snprintf(buf, sizeof buf, "%lld,%.17g\n", static_cast<long long>(k),
                  eig.eigenvalues()(n - 1 - k));
    out << buf;
  }
}

}  // namespace irscov
