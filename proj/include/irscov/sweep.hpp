#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "irscov/config.hpp"
#include "irscov/dequiv.hpp"
#include "irscov/optimizer.hpp"

namespace irscov {

// T = 2^rate - 1 for a spectral efficiency in b/s/Hz.
double convert_rate_to_threshold(double rate_bps_hz);

double db_to_linear(double db);
double linear_to_db(double linear);

enum class PhaseSource { kInitial, kOptimized, kRandom, kFile };

const char* phase_source_name(PhaseSource source);

enum class ThresholdUnit { kDb, kLinear, kRate };

struct SweepSpec {
  std::vector<double> t_grid;  // in `unit`
  ThresholdUnit unit = ThresholdUnit::kDb;
  Regime regime = Regime::kFiniteMLargeN;
  PhaseSource phase_source = PhaseSource::kOptimized;
  std::uint64_t phase_seed = 1;
  std::filesystem::path phase_file;
  std::uint64_t mc_trials = 0;
  std::uint64_t seed = 1;
  OptimizerConfig optimizer;

  void validate() const;
};

// `points` values from `lo` to `hi` inclusive.
std::vector<double> linear_grid(double lo, double hi, int points);

struct ResultRow {
  double t_db = 0.0;
  double t_linear = 0.0;
  double b_value = 0.0;
  double pc_closed_form = 0.0;
  std::optional<double> pc_mc;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  int m_count = 0;
  int n_count = 0;
  Regime regime = Regime::kFiniteMLargeN;
  bool correlated = true;
  std::uint64_t seed = 0;
};

struct SweepResult {
  std::vector<ResultRow> rows;
  ExperimentConfig config;
  SweepSpec spec;
};

// One row per threshold, in grid order. Closed form always; Monte-Carlo
// when spec.mc_trials > 0. Optimized phases are computed per threshold.
SweepResult run_sweep(const ExperimentConfig& config, const SweepSpec& spec,
                      std::size_t workers = 0);

// Metadata lines ('#' prefixed) followed by an RFC-4180 table.
std::string sweep_csv(const SweepResult& result);
// Whitespace-separated columns for gnuplot.
std::string sweep_dat(const SweepResult& result);

// Phase file: CSV "irs,element,theta_rad" with 0-based indices.
PhaseConfig load_phase_file(const std::filesystem::path& path, int irs_count, int element_count);
std::string phase_file_csv(const PhaseConfig& phases);

enum class Figure { kFig1, kFig2 };

struct Curve {
  std::string label;
  SweepResult sweep;
};

struct FigureBundle {
  Figure figure = Figure::kFig1;
  std::vector<Curve> curves;
};

struct ReproduceOptions {
  std::vector<double> t_grid_db = linear_grid(-60.0, 20.0, 81);
  std::uint64_t mc_trials = 0;
  std::uint64_t seed = 1;
  double direct_scale = 1.0;
};

// fig1: regime 1, N in {100, 225} x {correlated, uncorrelated} x M in {15, 34}
// fig2: regime 2, M in {15, 34} x N in {100, 225}
// Correlated curves use optimized phases; uncorrelated ones the initialization.
FigureBundle reproduce_figure(Figure figure, const ReproduceOptions& options = {},
                              std::size_t workers = 0);

// Wide CSV: t_db followed by b / pc_closed_form / pc_mc / ci columns per curve.
std::string figure_csv(const FigureBundle& bundle);

// Metadata header shared by every CSV output.
std::string metadata_header(const ExperimentConfig& config, const std::string& extra = {});

const char* build_id();

}  // namespace irscov
