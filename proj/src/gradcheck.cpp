#include "irscov/gradcheck.hpp"

#include <memory>
#include <random>

#include "irscov/optimizer.hpp"

namespace irscov {

GradcheckCase random_gradcheck_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> surfaces(1, 4);
  std::uniform_int_distribution<int> columns(1, 4);
  std::uniform_real_distribution<double> spacing(1.0 / 8.0, 1.0 / 2.0);
  std::uniform_real_distribution<double> gain(0.5, 2.0);
  std::uniform_real_distribution<double> margin(0.2, 2.0);

  const int m_count = surfaces(rng);
  PanelGeometry panel;
  panel.n_h = columns(rng);
  panel.n_v = std::uniform_int_distribution<int>(1, 8 / panel.n_h)(rng);
  if (panel.element_count() < 2) panel.n_h = 2;  // a single element has a constant objective
  const double wavelength = 1.0;
  panel.d_h = spacing(rng) * wavelength;
  panel.d_v = spacing(rng) * wavelength;

  GradcheckCase c;
  auto r = std::make_shared<const CorrelationMatrix>(
      build_correlation(panel, wavelength, DiagonalNormalization::kUnit));
  for (int m = 0; m < m_count; ++m) c.model.irs.push_back({gain(rng), gain(rng), r, r});
  c.model.beta_d = gain(rng);
  c.model.gamma0 = 1.0;
  c.phases = PhaseConfig::random(m_count, panel.element_count(), rng());
  const double b = aggregate_bm(c.model, c.phases);
  c.t_threshold = c.model.gamma0 * (b + c.model.beta_d * margin(rng));
  return c;
}

Eigen::VectorXd angle_derivative(const Eigen::VectorXcd& wirtinger, const Eigen::VectorXcd& s) {
  // df/dtheta = 2 Re(j s conj(g)) = 2 Im(g conj(s))
  Eigen::VectorXd out(s.size());
  for (Eigen::Index n = 0; n < s.size(); ++n) out(n) = 2.0 * (wirtinger(n) * std::conj(s(n))).imag();
  return out;
}

Eigen::VectorXd coverage_angle_differences(const LinkModel& model, const PhaseConfig& phases,
                                           Regime regime, double t_threshold, int m, double step) {
  const int order = phases.element_count();
  Eigen::VectorXd out(order);
  for (int n = 0; n < order; ++n) {
    PhaseConfig plus = phases;
    PhaseConfig minus = phases;
    plus.per_irs[m](n) *= std::polar(1.0, step);
    minus.per_irs[m](n) *= std::polar(1.0, -step);
    const double fp = evaluate_closed_form(model, plus, regime, t_threshold).coverage;
    const double fm = evaluate_closed_form(model, minus, regime, t_threshold).coverage;
    out(n) = (fp - fm) / (2.0 * step);
  }
  return out;
}

double gradient_relative_error(const GradcheckCase& c, Regime regime, double step) {
  double worst = 0.0;
  for (int m = 0; m < c.model.irs_count(); ++m) {
    const Eigen::VectorXcd g = coverage_gradient(c.model, c.phases, regime, c.t_threshold, m);
    const Eigen::VectorXd analytic = angle_derivative(g, c.phases.per_irs[m]);
    const Eigen::VectorXd fd = coverage_angle_differences(c.model, c.phases, regime, c.t_threshold, m, step);
    const double scale = fd.cwiseAbs().maxCoeff();
    const double err = (analytic - fd).cwiseAbs().maxCoeff();
    worst = std::max(worst, scale > 0.0 ? err / scale : err);
  }
  return worst;
}

}  // namespace irscov
