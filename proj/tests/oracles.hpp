#pragma once

// Test-only reference computations. Nothing here calls into the code paths
// they check: traces are formed from dense complex products, derivatives by
// central differences.

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <random>

#include <Eigen/Dense>

#include "irscov/phases.hpp"
#include "irscov/spatialcorr.hpp"

namespace oracle {

using cd = std::complex<double>;

// sum_m beta_m tr(R1 Phi R2 Phi^H) with every product materialized.
inline double dense_trace_bm(const irscov::LinkModel& model, const irscov::PhaseConfig& phases) {
  cd total = 0.0;
  for (int m = 0; m < model.irs_count(); ++m) {
    const auto& s = model.irs[m];
    const Eigen::MatrixXcd r1 = s.r1->entries.cast<cd>();
    const Eigen::MatrixXcd r2 = s.r2->entries.cast<cd>();
    const Eigen::MatrixXcd phi = phases.per_irs[m].asDiagonal();
    total += s.beta1 * s.beta2 * (r1 * phi * r2 * phi.adjoint()).trace();
  }
  return total.real();
}

// sum_m beta_m sum_{n,p} r1_np r2_np phi_mp conj(phi_mn)
inline double elementwise_bm(const irscov::LinkModel& model, const irscov::PhaseConfig& phases) {
  double total = 0.0;
  for (int m = 0; m < model.irs_count(); ++m) {
    const auto& s = model.irs[m];
    const auto& phi = phases.per_irs[m];
    cd acc = 0.0;
    for (int n = 0; n < phi.size(); ++n) {
      for (int p = 0; p < phi.size(); ++p) {
        acc += s.r1->entries(n, p) * s.r2->entries(n, p) * phi(p) * std::conj(phi(n));
      }
    }
    total += s.beta1 * s.beta2 * acc.real();
  }
  return total;
}

inline double coverage(double b, double t, double gamma0, double beta_d) {
  const double ratio = t / gamma0;
  return b >= ratio ? 1.0 : std::exp(-(ratio - b) / beta_d);
}

// d f / d theta_{mn} by central differences, f evaluated through dense traces.
inline Eigen::VectorXd fd_coverage_angles(const irscov::LinkModel& model,
                                          const irscov::PhaseConfig& phases, double t, int m,
                                          double h = 1e-6) {
  Eigen::VectorXd out(phases.element_count());
  for (int n = 0; n < phases.element_count(); ++n) {
    auto plus = phases;
    auto minus = phases;
    plus.per_irs[m](n) *= std::polar(1.0, h);
    minus.per_irs[m](n) *= std::polar(1.0, -h);
    const double fp = coverage(dense_trace_bm(model, plus), t, model.gamma0, model.beta_d);
    const double fm = coverage(dense_trace_bm(model, minus), t, model.gamma0, model.beta_d);
    out(n) = (fp - fm) / (2.0 * h);
  }
  return out;
}

// d f / d theta from a Wirtinger derivative g = df/ds^*.
inline Eigen::VectorXd wirtinger_to_angles(const Eigen::VectorXcd& g, const Eigen::VectorXcd& s) {
  Eigen::VectorXd out(s.size());
  for (int n = 0; n < s.size(); ++n) out(n) = 2.0 * (g(n) * std::conj(s(n))).imag();
  return out;
}

inline double rel_inf(const Eigen::VectorXd& a, const Eigen::VectorXd& ref) {
  const double scale = ref.cwiseAbs().maxCoeff();
  return (a - ref).cwiseAbs().maxCoeff() / (scale > 0.0 ? scale : 1.0);
}

// Small model with O(1) scales. `asymmetric` gives link 2 a different
// element spacing so R1 o R2 has entries of both signs.
inline irscov::LinkModel random_model(std::uint64_t seed, int surfaces, int n_h, int n_v,
                                      bool asymmetric = true) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> gain(0.5, 2.0);
  std::uniform_real_distribution<double> spacing(0.15, 0.6);
  irscov::PanelGeometry p1{n_h, n_v, spacing(rng), spacing(rng)};
  irscov::PanelGeometry p2 = asymmetric ? irscov::PanelGeometry{n_h, n_v, spacing(rng), spacing(rng)} : p1;
  auto r1 = std::make_shared<const irscov::CorrelationMatrix>(
      irscov::build_correlation(p1, 1.0, irscov::DiagonalNormalization::kUnit));
  auto r2 = asymmetric ? std::make_shared<const irscov::CorrelationMatrix>(irscov::build_correlation(
                             p2, 1.0, irscov::DiagonalNormalization::kUnit))
                       : r1;
  irscov::LinkModel model;
  for (int m = 0; m < surfaces; ++m) model.irs.push_back({gain(rng), gain(rng), r1, r2});
  model.beta_d = gain(rng);
  model.gamma0 = 1.0;
  return model;
}

}  // namespace oracle
