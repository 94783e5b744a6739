#include "irscov/dequiv.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "irscov/errors.hpp"

namespace irscov {

namespace {

constexpr double kImagTolerance = 1e-10;

void check_dimensions(const LinkModel& model, const PhaseConfig& phases) {
  if (phases.irs_count() != model.irs_count()) {
    throw std::invalid_argument("phase configuration has " + std::to_string(phases.irs_count()) +
                                " surfaces, model has " + std::to_string(model.irs_count()));
  }
  const int n = model.element_count();
  for (const auto& v : phases.per_irs) {
    if (v.size() != n) {
      throw std::invalid_argument("phase vector length " + std::to_string(v.size()) +
                                  " does not match element count " + std::to_string(n));
    }
  }
}

double checked_real(std::complex<double> value, double magnitude_scale, const char* what) {
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
    throw NumericError(std::string(what) + ": non-finite value");
  }
  if (std::abs(value.imag()) > kImagTolerance * magnitude_scale) {
    throw NumericError(std::string(what) + ": imaginary residue " + std::to_string(value.imag()) +
                       " exceeds tolerance");
  }
  return value.real();
}

}  // namespace

const char* regime_name(Regime regime) {
  return regime == Regime::kFiniteMLargeN ? "m-finite" : "m-large";
}

double surface_quadratic_form(const Eigen::MatrixXd& r1, const Eigen::MatrixXd& r2,
                              const Eigen::VectorXcd& phi) {
  if (r1.rows() != phi.size() || r2.rows() != phi.size() || r1.cols() != r2.cols()) {
    throw std::invalid_argument("surface_quadratic_form: dimension mismatch");
  }
  // tr(R1 Phi R2 Phi^H) = sum_{n,p} r1_np r2_pn phi_p conj(phi_n)
  const Eigen::MatrixXd hadamard = r1.cwiseProduct(r2.transpose());
  const std::complex<double> value = phi.dot(hadamard * phi);
  return checked_real(value, hadamard.cwiseAbs().sum(), "tr(R1 Phi R2 Phi^H)");
}

double aggregate_bm(const LinkModel& model, const PhaseConfig& phases) {
  check_dimensions(model, phases);
  double total = 0.0;
  for (int m = 0; m < model.irs_count(); ++m) {
    const auto& s = model.irs[m];
    total += s.cascaded() * surface_quadratic_form(s.r1->entries, s.r2->entries, phases.per_irs[m]);
  }
  return total;
}

double bn_surface_term(const LinkModel& model, const Eigen::VectorXcd& phi, int m) {
  const auto& s = model.irs.at(m);
  const int order = model.element_count();
  if (phi.size() != order) throw std::invalid_argument("bn_surface_term: dimension mismatch");
  const auto& r1 = s.r1->entries;
  const auto& r2 = s.r2->entries;
  std::complex<double> acc = 0.0;
  double scale = 0.0;
  for (int n = 0; n < order; ++n) {
    for (int p = 0; p < order; ++p) {
      const double q = s.beta1 * r1(n, p) * s.beta2 * r2(n, p);
      acc += q * phi(n) * std::conj(phi(p));
      scale += std::abs(q);
    }
  }
  return checked_real(acc, scale, "B_N surface term");
}

double aggregate_bn(const LinkModel& model, const PhaseConfig& phases, BnEvaluation evaluation) {
  check_dimensions(model, phases);
  const int order = model.element_count();
  const int surfaces = model.irs_count();
  std::complex<double> acc = 0.0;
  double scale = 0.0;

  if (evaluation == BnEvaluation::kLiteral) {
    std::vector<Eigen::MatrixXcd> psi(order);
    for (int n = 0; n < order; ++n) psi[n] = phases.element_group(n).asDiagonal();
    for (int n = 0; n < order; ++n) {
      for (int p = 0; p < order; ++p) {
        const Eigen::MatrixXcd q1 = build_q(n, p, 1, model).cast<std::complex<double>>().asDiagonal();
        const Eigen::MatrixXcd q2 = build_q(n, p, 2, model).cast<std::complex<double>>().asDiagonal();
        const Eigen::MatrixXcd product = q1 * psi[n] * q2 * psi[p].adjoint();
        acc += product.trace();
        scale += (q1.cwiseAbs().diagonal().cwiseProduct(q2.cwiseAbs().diagonal())).sum();
      }
    }
    return checked_real(acc, scale, "B_N");
  }

  for (int n = 0; n < order; ++n) {
    for (int p = 0; p < order; ++p) {
      for (int m = 0; m < surfaces; ++m) {
        const auto& s = model.irs[m];
        const double q = s.beta1 * s.r1->entries(n, p) * s.beta2 * s.r2->entries(n, p);
        acc += q * phases.per_irs[m](n) * std::conj(phases.per_irs[m](p));
        scale += std::abs(q);
      }
    }
  }
  return checked_real(acc, scale, "B_N");
}

double aggregate(const LinkModel& model, const PhaseConfig& phases, Regime regime) {
  return regime == Regime::kFiniteMLargeN ? aggregate_bm(model, phases)
                                          : aggregate_bn(model, phases);
}

double coverage_closed_form(double b, double t_threshold, double gamma0, double beta_d) {
  if (!(gamma0 > 0.0)) throw std::invalid_argument("coverage_closed_form: gamma0 must be > 0");
  if (!(beta_d > 0.0)) throw std::invalid_argument("coverage_closed_form: beta_d must be > 0");
  if (!(t_threshold >= 0.0)) throw std::invalid_argument("coverage_closed_form: T must be >= 0");
  if (!std::isfinite(b)) throw NumericError("coverage_closed_form: non-finite aggregate");
  const double ratio = t_threshold / gamma0;
  if (b >= ratio) return 1.0;
  return std::exp(-(ratio - b) / beta_d);
}

double mean_snr(double b, double beta_d, double gamma0) { return gamma0 * (b + beta_d); }

double knee_threshold(double b, double gamma0, double beta_d, double level) {
  if (!(level > 0.0 && level <= 1.0)) throw std::invalid_argument("knee_threshold: level in (0,1]");
  return gamma0 * (b - beta_d * std::log(level));
}

DeResult evaluate_closed_form(const LinkModel& model, const PhaseConfig& phases, Regime regime,
                              double t_threshold) {
  DeResult out;
  out.regime = regime;
  out.b = aggregate(model, phases, regime);
  out.threshold_ratio = t_threshold / model.gamma0;
  out.coverage = coverage_closed_form(out.b, t_threshold, model.gamma0, model.beta_d);
  return out;
}

}  // namespace irscov
