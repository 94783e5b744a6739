#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <Eigen/Eigenvalues>

#include "irscov/errors.hpp"
#include "irscov/spatialcorr.hpp"

using namespace irscov;
using doctest::Approx;

namespace {

constexpr double kSincSixteenth = 0.993586851144205766;  // sin(pi/16)/(pi/16), mpmath

double frob_rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / b.norm();
}

}  // namespace

TEST_CASE("normalized sinc") {
  CHECK(sinc_normalized(0.0) == 1.0);
  CHECK(std::abs(sinc_normalized(1.0)) < 1e-16);
  CHECK(std::abs(sinc_normalized(-2.0)) < 1e-16);
  CHECK(sinc_normalized(1.0 / 16.0) == Approx(kSincSixteenth).epsilon(1e-15));
  CHECK(sinc_normalized(0.5) == Approx(2.0 / M_PI).epsilon(1e-15));
  CHECK(sinc_normalized(-0.3) == sinc_normalized(0.3));
  CHECK(sinc_normalized(1e-9) == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("element positions") {
  PanelGeometry p{4, 3, 0.01, 0.02};
  CHECK(element_position(1, p) == Eigen::Vector3d(0, 0, 0));
  CHECK(element_position(4, p).isApprox(Eigen::Vector3d(0, 0.03, 0)));
  CHECK(element_position(5, p).isApprox(Eigen::Vector3d(0, 0, 0.02)));
  CHECK(element_position(12, p).isApprox(Eigen::Vector3d(0, 0.03, 0.04)));
  for (int i = 1; i <= 12; ++i) {
    auto u = element_position(i, p);
    CHECK(u(0) == 0.0);
    CHECK(u(1) >= 0.0);
    CHECK(u(1) <= 3 * p.d_h + 1e-15);
    CHECK(u(2) <= 2 * p.d_v + 1e-15);
  }
  CHECK_THROWS_AS(element_position(0, p), std::out_of_range);
  CHECK_THROWS_AS(element_position(13, p), std::out_of_range);
}

TEST_CASE("correlation matrix examples") {
  const double lambda = 0.1;
  const double d = lambda / 32.0;

  auto single = build_correlation({1, 1, d, d}, lambda);
  REQUIRE(single.order() == 1);
  CHECK(single.entries(0, 0) == d * d);

  auto pair = build_correlation({2, 1, d, d}, lambda);
  CHECK(pair.entries(0, 0) == d * d);
  CHECK(pair.entries(0, 1) == Approx(d * d * kSincSixteenth).epsilon(1e-14));
  CHECK(pair.entries(1, 0) == pair.entries(0, 1));

  auto half = build_correlation({5, 2, lambda / 2, lambda / 3}, lambda);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(half.entries(i, i + 1)) < 1e-15);

  auto unit = build_correlation({2, 1, d, d}, lambda, DiagonalNormalization::kUnit);
  CHECK(unit.entries(0, 0) == 1.0);
  CHECK(unit.entries(0, 1) == Approx(kSincSixteenth).epsilon(1e-14));

  CHECK_THROWS_AS(build_correlation({2, 2, d, d}, 0.0), std::invalid_argument);
}

TEST_CASE("correlation matrix invariants") {
  const double lambda = 0.0999308193333;
  for (auto [nh, nv, frac] : {std::tuple{4, 4, 32.0}, {8, 8, 32.0}, {6, 3, 4.0}, {5, 5, 2.5}}) {
    PanelGeometry p{nh, nv, lambda / frac, lambda / frac};
    auto r = build_correlation(p, lambda);
    const double c = p.d_h * p.d_v;
    CHECK((r.entries - r.entries.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < r.order(); ++i) CHECK(r.entries(i, i) == c);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.entries);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12 * es.eigenvalues().maxCoeff());
  }
}

TEST_CASE("correlation depends only on distance") {
  const double lambda = 1.0;
  PanelGeometry p{5, 5, 0.21, 0.21};
  auto r = build_correlation(p, lambda, DiagonalNormalization::kUnit);
  if (!r.repaired) {
    // elements (1,2) and (7,8) are horizontal neighbours; (1,6) and (2,7) vertical
    CHECK(r.entries(0, 1) == Approx(r.entries(6, 7)).epsilon(1e-12));
    CHECK(r.entries(0, 1) == Approx(r.entries(0, 5)).epsilon(1e-12));
    CHECK(r.entries(0, 6) == Approx(r.entries(1, 5)).epsilon(1e-12));
  }
  CHECK(r.entries(0, 1) == Approx(sinc_normalized(0.42)).epsilon(1e-12));
}

TEST_CASE("sub-wavelength panels need repair") {
  const double lambda = 0.0999308193333;
  auto r = build_correlation({8, 8, lambda / 32, lambda / 32}, lambda);
  CHECK(r.repaired);
  auto loose = build_correlation({3, 3, lambda / 2, lambda / 2}, lambda);
  CHECK_FALSE(loose.repaired);
}

TEST_CASE("uncorrelated mode") {
  PanelGeometry p{3, 2, 0.2, 0.5};
  auto a = uncorrelated_matrix(p);
  CHECK(a.entries == Eigen::MatrixXd::Identity(6, 6) * 0.1);
  auto u = uncorrelated_matrix(p, DiagonalNormalization::kUnit);
  CHECK(u.entries == Eigen::MatrixXd::Identity(6, 6));
  auto via = make_correlation(p, 1.0, {CorrelationModel::kUncorrelated, DiagonalNormalization::kElementArea});
  CHECK(via.entries == a.entries);
}

TEST_CASE("sampling factor examples") {
  CorrelationMatrix scaled{Eigen::MatrixXd::Identity(5, 5) * 2.5, false};
  auto f = sampling_factor(scaled);
  CHECK(f.rank() == 5);
  CHECK(frob_rel(f.factor * f.factor.transpose(), scaled.entries) < 1e-14);
  // eigenvectors of c I are any orthonormal basis, so only L^T L is fixed
  CHECK((f.factor.transpose() * f.factor - 2.5 * Eigen::MatrixXd::Identity(5, 5)).norm() < 1e-13);

  Eigen::VectorXd a(4);
  a << 1.0, -2.0, 0.5, 3.0;
  CorrelationMatrix rank_one{a * a.transpose(), false};
  auto g = sampling_factor(rank_one);
  CHECK(g.rank() == 1);
  CHECK(frob_rel(g.factor * g.factor.transpose(), rank_one.entries) < 1e-14);
}

TEST_CASE("sampling factor of a dense sub-wavelength panel") {
  const double lambda = 0.0999308193333;
  auto r = build_correlation({4, 4, lambda / 32, lambda / 32}, lambda);
  auto f = sampling_factor(r);
  CHECK(f.rank() == 13);
  CHECK(frob_rel(f.factor * f.factor.transpose(), r.entries) < 1e-8);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.entries);
  const double top = es.eigenvalues().maxCoeff();
  int significant = 0;
  for (double v : es.eigenvalues()) significant += v > 1e-6 * top ? 1 : 0;
  CHECK(significant == 6);

  auto big = build_correlation({8, 8, lambda / 32, lambda / 32}, lambda);
  auto fb = sampling_factor(big);
  CHECK(fb.rank() < 32);
  CHECK(frob_rel(fb.factor * fb.factor.transpose(), big.entries) < 1e-8);
  for (int j = 1; j < fb.rank(); ++j) CHECK(fb.factor.col(j).norm() <= fb.factor.col(j - 1).norm() + 1e-15);
}

TEST_CASE("sampling factor reconstruction on random panels") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> spacing(0.01, 0.7);
  std::uniform_int_distribution<int> side(1, 6);
  for (int trial = 0; trial < 40; ++trial) {
    PanelGeometry p{side(rng), side(rng), spacing(rng), spacing(rng)};
    auto r = build_correlation(p, 1.0);
    auto f = sampling_factor(r);
    CHECK(frob_rel(f.factor * f.factor.transpose(), r.entries) < 1e-8);
  }
}

TEST_CASE("Hadamard products of repaired matrices are PSD") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> spacing(0.02, 0.6);
  for (int trial = 0; trial < 30; ++trial) {
    auto a = build_correlation({3, 3, spacing(rng), spacing(rng)}, 1.0, DiagonalNormalization::kUnit);
    auto b = build_correlation({3, 3, spacing(rng), spacing(rng)}, 1.0, DiagonalNormalization::kUnit);
    Eigen::MatrixXd h = a.entries.cwiseProduct(b.entries.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12 * es.eigenvalues().maxCoeff());
  }
}

TEST_CASE("link model shares one matrix for identical panels") {
  Scenario s = reference_scenario(4, 3);
  auto model = build_link_model(s);
  REQUIRE(model.irs_count() == 4);
  CHECK(model.element_count() == 9);
  for (const auto& surface : model.irs) {
    CHECK(surface.r1.get() == model.irs[0].r1.get());
    CHECK(surface.r2.get() == model.irs[0].r1.get());
  }
  auto gains = cascaded_gains(s);
  for (int m = 0; m < 4; ++m) {
    CHECK(model.irs[m].beta1 == gains.link1[m]);
    CHECK(model.irs[m].beta2 == gains.link2[m]);
  }
  CHECK(model.beta_d == gains.direct);
  CHECK(model.gamma0 == transmit_snr(s.radio));
}

TEST_CASE("cross-element diagonals") {
  Scenario s = reference_scenario(2, 3);
  auto model = build_link_model(s);
  const double c = s.panel.d_h * s.panel.d_v;

  auto q_diag = build_q(4, 4, 1, model);
  REQUIRE(q_diag.size() == 2);
  CHECK(q_diag(0) == Approx(model.irs[0].beta1 * c).epsilon(1e-15));
  CHECK(q_diag(1) == Approx(model.irs[1].beta1 * c).epsilon(1e-15));
  CHECK((q_diag.array() >= 0.0).all());

  auto q_off = build_q(0, 1, 2, model);
  const double r01 = model.irs[0].r2->entries(0, 1);
  CHECK(q_off(0) == Approx(model.irs[0].beta2 * r01).epsilon(1e-15));
  CHECK(q_off(1) == Approx(model.irs[1].beta2 * r01).epsilon(1e-15));
  CHECK(q_off(0) / q_off(1) == Approx(model.irs[0].beta2 / model.irs[1].beta2).epsilon(1e-14));

  auto unc = build_link_model(s, {CorrelationModel::kUncorrelated, DiagonalNormalization::kElementArea});
  CHECK(build_q(0, 1, 1, unc).isZero(0.0));
  CHECK(build_q(3, 7, 2, unc).isZero(0.0));

  CHECK_THROWS_AS(build_q(9, 0, 1, model), std::out_of_range);
  CHECK_THROWS_AS(build_q(-1, 0, 1, model), std::out_of_range);
  CHECK_THROWS_AS(build_q(0, 0, 3, model), std::invalid_argument);
}

TEST_CASE("binary matrix dump round trip") {
  auto dir = std::filesystem::temp_directory_path() / "irscov_spatialcorr_test";
  std::filesystem::create_directories(dir);
  auto r = build_correlation({3, 2, 0.013, 0.021}, 0.1);
  write_matrix_binary(dir / "r.bin", r.entries);
  CHECK(std::filesystem::file_size(dir / "r.bin") == 8 + 36 * 8);
  auto back = read_matrix_binary(dir / "r.bin");
  CHECK(back == r.entries);

  std::ifstream raw(dir / "r.bin", std::ios::binary);
  unsigned char header[8];
  raw.read(reinterpret_cast<char*>(header), 8);
  CHECK(header[0] == 6);
  for (int i = 1; i < 8; ++i) CHECK(header[i] == 0);

  write_eigen_spectrum_csv(dir / "spectrum.csv", r.entries);
  std::ifstream csv(dir / "spectrum.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line == "index,eigenvalue");
  int rows = 0;
  double previous = INFINITY;
  while (std::getline(csv, line)) {
    const double v = std::stod(line.substr(line.find(',') + 1));
    CHECK(v <= previous);
    previous = v;
    ++rows;
  }
  CHECK(rows == 6);
  std::filesystem::remove_all(dir);
}
