#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "irscov/dequiv.hpp"
#include "irscov/montecarlo.hpp"
#include "oracles.hpp"

using namespace irscov;
using doctest::Approx;

namespace {

std::shared_ptr<const CorrelationMatrix> shared(const Eigen::MatrixXd& m) {
  return std::make_shared<const CorrelationMatrix>(CorrelationMatrix{m, false});
}

LinkModel scalar_model(double c, double beta_d) {
  LinkModel model;
  auto r = shared(Eigen::MatrixXd::Constant(1, 1, c));
  model.irs.push_back({1.0, 1.0, r, r});
  model.beta_d = beta_d;
  model.gamma0 = 1.0;
  return model;
}

LinkModel desk_model() { return build_link_model(desk_scenario()); }

}  // namespace

TEST_CASE("trial streams depend only on seed and trial") {
  auto a = trial_engine(5, 17);
  auto b = trial_engine(5, 17);
  auto c = trial_engine(5, 18);
  auto d = trial_engine(6, 17);
  const auto va = a();
  CHECK(va == b());
  CHECK(va != c());
  CHECK(va != d());
}

TEST_CASE("rank-one factor gives collinear draws") {
  Eigen::VectorXd a(4);
  a << 1.0, 0.5, -0.25, 2.0;
  LinkModel model;
  model.irs.push_back({2.0, 3.0, shared(a * a.transpose()), shared(a * a.transpose())});
  model.beta_d = 1.0;
  auto factors = sampling_factors(model);
  CHECK(factors[0].link1.get() != nullptr);
  auto rng = trial_engine(1, 0);
  auto draw = sample_channels(model, factors, rng);
  const std::complex<double> ratio = draw.h1[0](0) / a(0);
  for (int n = 0; n < 4; ++n) CHECK(std::abs(draw.h1[0](n) - ratio * a(n)) < 1e-12 * std::abs(ratio));
}

TEST_CASE("shared matrices share a factor") {
  auto model = desk_model();
  auto factors = sampling_factors(model);
  REQUIRE(factors.size() == 8);
  for (const auto& f : factors) {
    CHECK(f.link1.get() == factors[0].link1.get());
    CHECK(f.link2.get() == factors[0].link1.get());
  }
}

TEST_CASE("sample covariance matches beta R") {
  auto model = oracle::random_model(21, 1, 2, 2, false);
  model.irs[0].beta1 = 1.7;
  auto factors = sampling_factors(model);
  const int trials = 100000;
  Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(4, 4);
  for (int t = 0; t < trials; ++t) {
    auto rng = trial_engine(3, t);
    auto draw = sample_channels(model, factors, rng);
    cov += draw.h1[0] * draw.h1[0].adjoint();
  }
  cov /= static_cast<double>(trials);
  const Eigen::MatrixXd target = 1.7 * model.irs[0].r1->entries;
  CHECK((cov - target.cast<std::complex<double>>()).norm() / target.norm() < 0.05);
}

TEST_CASE("zero direct path draws exactly zero") {
  auto model = scalar_model(1.0, 0.0);
  auto factors = sampling_factors(model);
  for (int t = 0; t < 20; ++t) {
    auto rng = trial_engine(9, t);
    CHECK(sample_channels(model, factors, rng).hd == std::complex<double>(0, 0));
  }
}

TEST_CASE("instantaneous SNR examples") {
  ChannelDraw zero;
  zero.h1 = {Eigen::VectorXcd::Zero(3)};
  zero.h2 = {Eigen::VectorXcd::Zero(3)};
  zero.hd = 1.0;
  CHECK(instantaneous_snr(zero, PhaseConfig::initial(1, 3), 2.0) == 2.0);

  ChannelDraw one;
  const std::complex<double> a(0.3, -1.2), b(-0.7, 0.4);
  one.h1 = {Eigen::VectorXcd::Constant(1, a)};
  one.h2 = {Eigen::VectorXcd::Constant(1, b)};
  one.hd = 0.0;
  for (double theta : {0.0, 0.4, 2.9}) {
    auto phases = PhaseConfig::from_angles({{theta}});
    CHECK(instantaneous_snr(one, phases, 3.0) == Approx(3.0 * std::norm(a) * std::norm(b)).epsilon(1e-14));
  }

  CHECK_THROWS_AS(instantaneous_snr(one, PhaseConfig::initial(2, 1), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(instantaneous_snr(one, PhaseConfig::initial(1, 2), 1.0), std::invalid_argument);
}

TEST_CASE("element regrouping gives the same SNR") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto model = oracle::random_model(seed, 1 + seed % 6, 3, 3);
    auto factors = sampling_factors(model);
    auto phases = PhaseConfig::random(model.irs_count(), 9, seed);
    auto rng = trial_engine(seed, 0);
    auto draw = sample_channels(model, factors, rng);
    const double a = instantaneous_snr(draw, phases, 2.0);
    const double b = instantaneous_snr_by_element(draw, phases, 2.0);
    CHECK(std::abs(a - b) <= 1e-12 * a);
  }
}

TEST_CASE("fast path matches explicit channel draws") {
  auto model = oracle::random_model(31, 3, 2, 3);
  auto phases = PhaseConfig::random(3, 6, 31);
  auto factors = sampling_factors(model);
  const std::uint64_t trials = 5000, seed = 77;
  double sum = 0.0, sum_power = 0.0;
  std::vector<double> snr(trials);
  for (std::uint64_t t = 0; t < trials; ++t) {
    auto rng = trial_engine(seed, t);
    auto draw = sample_channels(model, factors, rng);
    snr[t] = instantaneous_snr(draw, phases, model.gamma0);
    sum += snr[t];
    for (int m = 0; m < 3; ++m) sum_power += std::norm(draw.h1[m].dot(phases.per_irs[m].cwiseProduct(draw.h2[m])));
  }
  auto mean = snr_mean(model, phases, trials, seed);
  CHECK(mean.mean == Approx(sum / trials).epsilon(1e-10));
  auto moment = second_moment(model, phases, trials, seed);
  CHECK(moment.mean == Approx(sum_power / trials).epsilon(1e-10));

  std::sort(snr.begin(), snr.end());
  const double t_mid = 0.5 * (snr[trials / 2] + snr[trials / 2 + 1]);
  std::uint64_t hits = 0;
  for (double v : snr) hits += v > t_mid ? 1 : 0;
  CHECK(estimate_coverage(model, phases, t_mid, trials, seed).hits == hits);
}

TEST_CASE("estimates are identical for every worker count") {
  auto model = desk_model();
  auto phases = PhaseConfig::random(8, 64, 2);
  const double b = aggregate_bm(model, phases);
  std::vector<double> grid{model.gamma0 * b, model.gamma0 * (b + model.beta_d), model.gamma0 * 3 * (b + model.beta_d)};
  auto ref = estimate_coverage_grid(model, phases, grid, 9000, 4, {1, CiMethod::kNormal});
  auto ref_moment = second_moment(model, phases, 9000, 4, {1, CiMethod::kNormal});
  for (std::size_t workers : {2u, 3u, 8u}) {
    auto other = estimate_coverage_grid(model, phases, grid, 9000, 4, {workers, CiMethod::kNormal});
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(other[i].hits == ref[i].hits);
      CHECK(other[i].ci_low == ref[i].ci_low);
    }
    auto moment = second_moment(model, phases, 9000, 4, {workers, CiMethod::kNormal});
    CHECK(moment.mean == ref_moment.mean);
    CHECK(moment.std_error == ref_moment.std_error);
  }
}

TEST_CASE("coverage limits") {
  auto model = desk_model();
  auto phases = PhaseConfig::initial(8, 64);
  CHECK(estimate_coverage(model, phases, 0.0, 2000, 1).coverage_hat == 1.0);
  CHECK(estimate_coverage(model, phases, 1e30, 2000, 1).coverage_hat == 0.0);
  CHECK_THROWS_AS(estimate_coverage(model, phases, 1.0, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(second_moment(model, phases, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(estimate_coverage(model, PhaseConfig::initial(7, 64), 1.0, 10, 1), std::invalid_argument);
}

TEST_CASE("coverage grid is non-increasing in T") {
  auto model = oracle::random_model(5, 2, 2, 2);
  auto phases = PhaseConfig::random(2, 4, 5);
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back(0.25 * i);
  auto est = estimate_coverage_grid(model, phases, grid, 20000, 8);
  for (std::size_t i = 0; i < est.size(); ++i) {
    CHECK(est[i].ci_low <= est[i].coverage_hat);
    CHECK(est[i].coverage_hat <= est[i].ci_high);
    CHECK(est[i].ci_low >= 0.0);
    CHECK(est[i].ci_high <= 1.0);
    if (i > 0) CHECK(est[i].hits <= est[i - 1].hits);
  }
}

TEST_CASE("binomial intervals") {
  auto n = binomial_estimate(50, 100, 3, CiMethod::kNormal);
  CHECK(n.coverage_hat == 0.5);
  CHECK(n.ci_low == Approx(0.5 - 1.959963984540054 * 0.05).epsilon(1e-14));
  CHECK(n.seed == 3);
  auto edge = binomial_estimate(0, 100, 3, CiMethod::kNormal);
  CHECK(edge.ci_low == 0.0);
  CHECK(edge.ci_high == 0.0);

  // scipy.stats.beta.ppf
  auto cp = binomial_estimate(5, 10, 0, CiMethod::kClopperPearson);
  CHECK(cp.ci_low == Approx(0.18708602844739855).epsilon(1e-12));
  CHECK(cp.ci_high == Approx(0.8129139715526015).epsilon(1e-12));
  auto cp0 = binomial_estimate(0, 10, 0, CiMethod::kClopperPearson);
  CHECK(cp0.ci_low == 0.0);
  CHECK(cp0.ci_high == Approx(0.3084971078187608).epsilon(1e-12));
  auto cp_all = binomial_estimate(10, 10, 0, CiMethod::kClopperPearson);
  CHECK(cp_all.ci_high == 1.0);
  CHECK(cp_all.ci_low == Approx(1.0 - 0.3084971078187608).epsilon(1e-12));
  CHECK_THROWS_AS(binomial_estimate(0, 0, 0, CiMethod::kNormal), std::invalid_argument);
}

TEST_CASE("second moment of a single scalar link") {
  // |a|^2 |b|^2 with independent unit exponentials has mean c^2 and variance 3 c^4
  const double c = 0.4;
  auto model = scalar_model(c, 1.0);
  auto est = second_moment(model, PhaseConfig::initial(1, 1), 200000, 12);
  CHECK(std::abs(est.mean - c * c) <= 3.0 * est.std_error);
  CHECK(est.std_error == Approx(std::sqrt(3.0) * c * c / std::sqrt(200000.0)).epsilon(0.05));
}

TEST_CASE("second moment of a zero-gain model") {
  auto model = oracle::random_model(2, 2, 2, 2);
  for (auto& s : model.irs) s.beta1 = 0.0;
  auto est = second_moment(model, PhaseConfig::random(2, 4, 1), 1000, 2);
  CHECK(est.mean == 0.0);
}

TEST_CASE("second moment and mean SNR agree with the aggregates") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto model = oracle::random_model(seed + 50, 3, 3, 2);
    auto phases = PhaseConfig::random(3, 6, seed);
    const double b = aggregate_bm(model, phases);
    auto moment = second_moment(model, phases, 40000, seed);
    CHECK(std::abs(moment.mean - b) <= 3.0 * moment.std_error);
    auto mean = snr_mean(model, phases, 40000, seed);
    CHECK(std::abs(mean.mean - mean_snr(b, model.beta_d, model.gamma0)) <= 3.0 * mean.std_error);
  }
}

TEST_CASE("global phase rotation leaves the coverage distribution unchanged") {
  auto model = oracle::random_model(14, 3, 2, 2);
  auto phases = PhaseConfig::random(3, 4, 14);
  auto rotated = phases;
  for (auto& v : rotated.per_irs) v *= std::polar(1.0, 1.1);
  const double t = model.gamma0 * (aggregate_bm(model, phases) + model.beta_d);
  auto a = estimate_coverage(model, phases, t, 40000, 1);
  auto b = estimate_coverage(model, rotated, t, 40000, 2);
  CHECK(b.coverage_hat >= a.ci_low - (a.ci_high - a.ci_low));
  CHECK(b.coverage_hat <= a.ci_high + (a.ci_high - a.ci_low));
}
