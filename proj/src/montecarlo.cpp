#include "irscov/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

#include "irscov/parallel.hpp"

namespace irscov {

namespace {

constexpr std::uint64_t kBlockTrials = 4096;
constexpr double kZ95 = 1.959963984540054;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Eigen::VectorXcd draw_standard(int size, std::mt19937_64& rng, std::normal_distribution<double>& normal) {
  Eigen::VectorXcd z(size);
  for (int k = 0; k < size; ++k) {
    const double re = normal(rng);
    const double im = normal(rng);
    z(k) = std::complex<double>(re, im) * (1.0 / std::numbers::sqrt2);
  }
  return z;
}

void check_phases(const LinkModel& model, const PhaseConfig& phases) {
  if (phases.irs_count() != model.irs_count()) {
    throw std::invalid_argument("Monte-Carlo: phase/model surface count mismatch");
  }
  for (const auto& v : phases.per_irs) {
    if (v.size() != model.element_count()) {
      throw std::invalid_argument("Monte-Carlo: phase/model element count mismatch");
    }
  }
}

// Reduced kernels sqrt(beta_m) L1^T Phi_m L2: the cascaded term of a trial is
// z1^H K_m z2, with the same z as sample_channels would draw.
struct TrialKernel {
  std::vector<Eigen::MatrixXcd> kernels;
  std::vector<int> rank1;
  std::vector<int> rank2;
  double sqrt_beta_d = 0.0;
};

TrialKernel make_kernel(const LinkModel& model, const PhaseConfig& phases) {
  model.validate();
  check_phases(model, phases);
  const auto factors = sampling_factors(model);
  TrialKernel k;
  for (int m = 0; m < model.irs_count(); ++m) {
    const Eigen::MatrixXd& l1 = factors[m].link1->factor;
    const Eigen::MatrixXd& l2 = factors[m].link2->factor;
    const double scale = std::sqrt(model.irs[m].beta1 * model.irs[m].beta2);
    Eigen::MatrixXcd weighted = phases.per_irs[m].asDiagonal() * l2.cast<std::complex<double>>();
    k.kernels.push_back(scale * (l1.transpose().cast<std::complex<double>>() * weighted));
    k.rank1.push_back(static_cast<int>(l1.cols()));
    k.rank2.push_back(static_cast<int>(l2.cols()));
  }
  k.sqrt_beta_d = std::sqrt(model.beta_d);
  return k;
}

struct TrialSample {
  std::complex<double> cascaded;  // sum_m h_{m,1}^H Phi_m h_{m,2}
  double surface_power = 0.0;     // sum_m |h_{m,1}^H Phi_m h_{m,2}|^2
  std::complex<double> hd;
};

TrialSample run_trial(const TrialKernel& k, std::uint64_t seed, std::uint64_t trial) {
  auto rng = trial_engine(seed, trial);
  std::normal_distribution<double> normal;
  TrialSample out;
  for (std::size_t m = 0; m < k.kernels.size(); ++m) {
    const Eigen::VectorXcd z1 = draw_standard(k.rank1[m], rng, normal);
    const Eigen::VectorXcd z2 = draw_standard(k.rank2[m], rng, normal);
    const std::complex<double> term = z1.dot(k.kernels[m] * z2);
    out.cascaded += term;
    out.surface_power += std::norm(term);
  }
  const Eigen::VectorXcd zd = draw_standard(1, rng, normal);
  out.hd = k.sqrt_beta_d * zd(0);
  return out;
}

// Welford accumulator; blocks are merged in index order.
struct Moments {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const Moments& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double n = static_cast<double>(count + other.count);
    const double delta = other.mean - mean;
    mean += delta * static_cast<double>(other.count) / n;
    m2 += other.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(other.count) / n;
    count += other.count;
  }
};

template <typename Accumulator, typename Visit>
std::vector<Accumulator> run_blocks(const TrialKernel& kernel, std::uint64_t trials,
                                    std::uint64_t seed, std::size_t workers,
                                    const Accumulator& prototype, Visit visit) {
  const std::uint64_t blocks = (trials + kBlockTrials - 1) / kBlockTrials;
  std::vector<Accumulator> partial(blocks, prototype);
  parallel_for(blocks, workers, [&](std::size_t b) {
    const std::uint64_t begin = b * kBlockTrials;
    const std::uint64_t end = std::min(trials, begin + kBlockTrials);
    for (std::uint64_t t = begin; t < end; ++t) visit(partial[b], run_trial(kernel, seed, t));
  });
  return partial;
}

MomentEstimate finish(const std::vector<Moments>& blocks, std::uint64_t seed) {
  Moments total;
  for (const auto& b : blocks) total.merge(b);
  MomentEstimate out;
  out.trials = total.count;
  out.seed = seed;
  out.mean = total.mean;
  if (total.count > 1) {
    const double variance = total.m2 / static_cast<double>(total.count - 1);
    out.std_error = std::sqrt(variance / static_cast<double>(total.count));
  }
  return out;
}

}  // namespace

std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t trial) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(~trial)));
}

std::vector<FactorPair> sampling_factors(const LinkModel& model) {
  std::map<const CorrelationMatrix*, std::shared_ptr<const SamplingFactor>> cache;
  auto factor_for = [&](const std::shared_ptr<const CorrelationMatrix>& r) {
    auto it = cache.find(r.get());
    if (it == cache.end()) {
      it = cache.emplace(r.get(), std::make_shared<const SamplingFactor>(sampling_factor(*r))).first;
    }
    return it->second;
  };
  std::vector<FactorPair> out;
  out.reserve(model.irs.size());
  for (const auto& s : model.irs) out.push_back({factor_for(s.r1), factor_for(s.r2)});
  return out;
}

ChannelDraw sample_channels(const LinkModel& model, const std::vector<FactorPair>& factors,
                            std::mt19937_64& rng) {
  if (factors.size() != model.irs.size()) {
    throw std::invalid_argument("sample_channels: one factor pair per surface required");
  }
  std::normal_distribution<double> normal;
  ChannelDraw draw;
  for (std::size_t m = 0; m < factors.size(); ++m) {
    const Eigen::MatrixXd& l1 = factors[m].link1->factor;
    const Eigen::MatrixXd& l2 = factors[m].link2->factor;
    const Eigen::VectorXcd z1 = draw_standard(static_cast<int>(l1.cols()), rng, normal);
    const Eigen::VectorXcd z2 = draw_standard(static_cast<int>(l2.cols()), rng, normal);
    draw.h1.push_back(std::sqrt(model.irs[m].beta1) * (l1.cast<std::complex<double>>() * z1));
    draw.h2.push_back(std::sqrt(model.irs[m].beta2) * (l2.cast<std::complex<double>>() * z2));
  }
  const Eigen::VectorXcd zd = draw_standard(1, rng, normal);
  draw.hd = std::sqrt(model.beta_d) * zd(0);
  return draw;
}

double instantaneous_snr(const ChannelDraw& draw, const PhaseConfig& phases, double gamma0) {
  if (draw.h1.size() != static_cast<std::size_t>(phases.irs_count()) || draw.h2.size() != draw.h1.size()) {
    throw std::invalid_argument("instantaneous_snr: surface count mismatch");
  }
  std::complex<double> total = draw.hd;
  for (std::size_t m = 0; m < draw.h1.size(); ++m) {
    const auto& phi = phases.per_irs[m];
    if (draw.h1[m].size() != phi.size() || draw.h2[m].size() != phi.size()) {
      throw std::invalid_argument("instantaneous_snr: element count mismatch");
    }
    total += draw.h1[m].dot(phi.cwiseProduct(draw.h2[m]));
  }
  return gamma0 * std::norm(total);
}

double instantaneous_snr_by_element(const ChannelDraw& draw, const PhaseConfig& phases,
                                    double gamma0) {
  const int surfaces = phases.irs_count();
  const int order = phases.element_count();
  if (draw.h1.size() != static_cast<std::size_t>(surfaces) || draw.h2.size() != draw.h1.size()) {
    throw std::invalid_argument("instantaneous_snr_by_element: surface count mismatch");
  }
  std::complex<double> total = draw.hd;
  Eigen::VectorXcd g1(surfaces), g2(surfaces);
  for (int n = 0; n < order; ++n) {
    for (int m = 0; m < surfaces; ++m) {
      g1(m) = draw.h1[m](n);
      g2(m) = draw.h2[m](n);
    }
    total += g1.dot(phases.element_group(n).cwiseProduct(g2));
  }
  return gamma0 * std::norm(total);
}

McEstimate binomial_estimate(std::uint64_t hits, std::uint64_t trials, std::uint64_t seed,
                             CiMethod method) {
  if (trials == 0) throw std::invalid_argument("binomial_estimate: zero trials");
  McEstimate e;
  e.hits = hits;
  e.trials = trials;
  e.seed = seed;
  const double n = static_cast<double>(trials);
  e.coverage_hat = static_cast<double>(hits) / n;
  if (method == CiMethod::kNormal) {
    const double half = kZ95 * std::sqrt(e.coverage_hat * (1.0 - e.coverage_hat) / n);
    e.ci_low = std::clamp(e.coverage_hat - half, 0.0, 1.0);
    e.ci_high = std::clamp(e.coverage_hat + half, 0.0, 1.0);
  } else {
    const double alpha = 0.05;
    const double k = static_cast<double>(hits);
    e.ci_low = hits == 0 ? 0.0 : boost::math::ibeta_inv(k, n - k + 1.0, alpha / 2.0);
    e.ci_high = hits == trials ? 1.0 : boost::math::ibeta_inv(k + 1.0, n - k, 1.0 - alpha / 2.0);
  }
  return e;
}

std::vector<McEstimate> estimate_coverage_grid(const LinkModel& model, const PhaseConfig& phases,
                                               const std::vector<double>& t_thresholds,
                                               std::uint64_t trials, std::uint64_t seed,
                                               const McOptions& options) {
  if (trials == 0) throw std::invalid_argument("estimate_coverage: zero trials");
  const TrialKernel kernel = make_kernel(model, phases);
  const double gamma0 = model.gamma0;
  const std::vector<std::uint64_t> zero(t_thresholds.size(), 0);
  const auto blocks = run_blocks(kernel, trials, seed, options.workers, zero,
                                 [&](std::vector<std::uint64_t>& hits, const TrialSample& s) {
                                   const double snr = gamma0 * std::norm(s.cascaded + s.hd);
                                   for (std::size_t i = 0; i < t_thresholds.size(); ++i) {
                                     if (snr > t_thresholds[i]) ++hits[i];
                                   }
                                 });
  std::vector<McEstimate> out;
  for (std::size_t i = 0; i < t_thresholds.size(); ++i) {
    std::uint64_t hits = 0;
    for (const auto& b : blocks) hits += b[i];
    out.push_back(binomial_estimate(hits, trials, seed, options.ci));
  }
  return out;
}

McEstimate estimate_coverage(const LinkModel& model, const PhaseConfig& phases,
                             double t_threshold, std::uint64_t trials, std::uint64_t seed,
                             const McOptions& options) {
  return estimate_coverage_grid(model, phases, {t_threshold}, trials, seed, options).front();
}

MomentEstimate second_moment(const LinkModel& model, const PhaseConfig& phases,
                             std::uint64_t trials, std::uint64_t seed, const McOptions& options) {
  if (trials == 0) throw std::invalid_argument("second_moment: zero trials");
  const TrialKernel kernel = make_kernel(model, phases);
  const auto blocks = run_blocks(kernel, trials, seed, options.workers, Moments{},
                                 [](Moments& acc, const TrialSample& s) { acc.add(s.surface_power); });
  return finish(blocks, seed);
}

MomentEstimate snr_mean(const LinkModel& model, const PhaseConfig& phases, std::uint64_t trials,
                        std::uint64_t seed, const McOptions& options) {
  if (trials == 0) throw std::invalid_argument("snr_mean: zero trials");
  const TrialKernel kernel = make_kernel(model, phases);
  const double gamma0 = model.gamma0;
  const auto blocks = run_blocks(kernel, trials, seed, options.workers, Moments{},
                                 [gamma0](Moments& acc, const TrialSample& s) {
                                   acc.add(gamma0 * std::norm(s.cascaded + s.hd));
                                 });
  return finish(blocks, seed);
}

}  // namespace irscov
