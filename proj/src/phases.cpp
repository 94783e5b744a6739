#include "irscov/phases.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace irscov {

Eigen::VectorXcd PhaseConfig::element_group(int n) const {
  Eigen::VectorXcd psi(irs_count());
  for (int m = 0; m < irs_count(); ++m) psi(m) = per_irs[m](n);
  return psi;
}

double PhaseConfig::max_modulus_error() const {
  double worst = 0.0;
  for (const auto& v : per_irs) {
    for (Eigen::Index n = 0; n < v.size(); ++n) worst = std::max(worst, std::abs(std::abs(v(n)) - 1.0));
  }
  return worst;
}

PhaseConfig PhaseConfig::initial(int irs_count, int element_count) {
  const std::complex<double> start = std::polar(1.0, std::numbers::pi / 2.0);
  PhaseConfig out;
  out.per_irs.assign(irs_count, Eigen::VectorXcd::Constant(element_count, start));
  return out;
}

PhaseConfig PhaseConfig::random(int irs_count, int element_count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  PhaseConfig out;
  out.per_irs.resize(irs_count);
  for (auto& v : out.per_irs) {
    v.resize(element_count);
    for (int n = 0; n < element_count; ++n) v(n) = std::polar(1.0, angle(rng));
  }
  return out;
}

PhaseConfig PhaseConfig::from_angles(const std::vector<std::vector<double>>& theta) {
  PhaseConfig out;
  for (const auto& row : theta) {
    if (!out.per_irs.empty() && row.size() != static_cast<std::size_t>(out.element_count())) {
      throw std::invalid_argument("PhaseConfig::from_angles: ragged angle table");
    }
    Eigen::VectorXcd v(row.size());
    for (std::size_t n = 0; n < row.size(); ++n) v(n) = std::polar(1.0, row[n]);
    out.per_irs.push_back(std::move(v));
  }
  return out;
}

Eigen::VectorXcd project_unit_modulus(const Eigen::VectorXcd& raw) {
  Eigen::VectorXcd out(raw.size());
  for (Eigen::Index n = 0; n < raw.size(); ++n) {
    out(n) = raw(n) == std::complex<double>(0.0, 0.0) ? std::complex<double>(1.0, 0.0)
                                                        : std::polar(1.0, std::arg(raw(n)));
  }
  return out;
}

}  // namespace irscov
