#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "irscov/phases.hpp"
#include "irscov/spatialcorr.hpp"

namespace irscov {

// Identifier written into output metadata.
inline constexpr const char* kRngIdentity = "mt19937_64/splitmix64(seed,trial)";

// Engine for trial `trial` of a run keyed by `seed`. Streams depend only on
// (seed, trial), so any partition of trials over workers reproduces the
// same draws.
std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t trial);

struct ChannelDraw {
  std::vector<Eigen::VectorXcd> h1;  // TX -> IRS m
  std::vector<Eigen::VectorXcd> h2;  // IRS m -> RX
  std::complex<double> hd;
};

struct FactorPair {
  std::shared_ptr<const SamplingFactor> link1;
  std::shared_ptr<const SamplingFactor> link2;
};

// One factor pair per surface; shared correlation matrices share a factor.
std::vector<FactorPair> sampling_factors(const LinkModel& model);

// h_{m,k} = sqrt(beta_{m,k}) L_{m,k} z, z ~ CN(0, I); h_d ~ CN(0, beta_d).
// Draw order: for each m, z for link 1 then link 2; h_d last.
ChannelDraw sample_channels(const LinkModel& model, const std::vector<FactorPair>& factors,
                            std::mt19937_64& rng);

// gamma0 |sum_m h_{m,1}^H Phi_m h_{m,2} + h_d|^2
double instantaneous_snr(const ChannelDraw& draw, const PhaseConfig& phases, double gamma0);

// Same quantity summed per element across surfaces:
// gamma0 |sum_n g_{n,1}^H Psi_n g_{n,2} + h_d|^2
double instantaneous_snr_by_element(const ChannelDraw& draw, const PhaseConfig& phases,
                                    double gamma0);

enum class CiMethod { kNormal, kClopperPearson };

struct McOptions {
  std::size_t workers = 0;  // 0: default_worker_count()
  CiMethod ci = CiMethod::kNormal;
};

struct McEstimate {
  double coverage_hat = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t seed = 0;
};

// 95% interval for hits/trials.
McEstimate binomial_estimate(std::uint64_t hits, std::uint64_t trials, std::uint64_t seed,
                             CiMethod method);

// Fraction of draws with gamma > T.
McEstimate estimate_coverage(const LinkModel& model, const PhaseConfig& phases,
                             double t_threshold, std::uint64_t trials, std::uint64_t seed,
                             const McOptions& options = {});

// Same draws evaluated against every threshold of the grid.
std::vector<McEstimate> estimate_coverage_grid(const LinkModel& model, const PhaseConfig& phases,
                                               const std::vector<double>& t_thresholds,
                                               std::uint64_t trials, std::uint64_t seed,
                                               const McOptions& options = {});

struct MomentEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample std / sqrt(trials)
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

// Sample mean of sum_m |h_{m,1}^H Phi_m h_{m,2}|^2 (no cross terms).
MomentEstimate second_moment(const LinkModel& model, const PhaseConfig& phases,
                             std::uint64_t trials, std::uint64_t seed,
                             const McOptions& options = {});

// Sample mean of gamma.
MomentEstimate snr_mean(const LinkModel& model, const PhaseConfig& phases, std::uint64_t trials,
                        std::uint64_t seed, const McOptions& options = {});

}  // namespace irscov
