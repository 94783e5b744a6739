#pragma once

#include <cstdint>
#include <vector>

namespace irscov {

inline constexpr double kSpeedOfLight = 299792458.0;

struct Position {
  double x = 0.0;  // meters
  double y = 0.0;  // meters

  friend bool operator==(const Position&, const Position&) = default;
};

double distance(const Position& a, const Position& b);

// Rectangular grid of N = n_h * n_v passive elements of size d_h x d_v.
struct PanelGeometry {
  int n_h = 1;
  int n_v = 1;
  double d_h = 0.0;  // element width, meters
  double d_v = 0.0;  // element height, meters

  int element_count() const { return n_h * n_v; }
  void validate() const;
};

struct RadioConfig {
  double tx_power_dbm = 10.0;
  double noise_floor_dbm = -94.0;
  double noise_figure_db = 10.0;
  // When false the noise floor is taken to already include the noise figure.
  bool add_noise_figure = true;
  double carrier_hz = 3e9;
  double bandwidth_hz = 10e6;
  double gain_tx_dbi = 3.2;
  double gain_rx_dbi = 1.3;

  double wavelength() const { return kSpeedOfLight / carrier_hz; }
  double effective_noise_dbm() const;
  void validate() const;
};

enum class PathLossSign {
  kAttenuation,  // G_t + G_r + intercept - 10 nu log10(d)
  kAsWritten,    // G_t + G_r + intercept + 10 nu log10(d)
};

struct PathLossModel {
  double exponent_link1 = 2.0;
  double exponent_link2 = 2.0;
  double exponent_direct = 3.5;
  double intercept_db = -27.5;
  PathLossSign sign = PathLossSign::kAttenuation;
  // Linear multiplier on beta_d; values near zero emulate a blocked direct path.
  double direct_scale = 1.0;

  void validate() const;
};

struct Scenario {
  Position tx;
  Position rx{60.0, 0.0};
  std::vector<Position> irs_positions;
  PanelGeometry panel;
  RadioConfig radio;
  PathLossModel path_loss;

  int irs_count() const { return static_cast<int>(irs_positions.size()); }
  void validate() const;
};

// Even spacing at fractions k/(m_count+1) of the open TX-RX segment.
std::vector<Position> place_irs_uniform(int m_count, const Position& tx, const Position& rx);

// Independent uniform fractions in (0,1) along the segment, sorted by distance from tx.
std::vector<Position> place_irs_random(int m_count, const Position& tx, const Position& rx,
                                       std::uint64_t seed);

// Large-scale gain (linear) at `distance` meters for a given exponent.
double path_loss_linear(double distance, double exponent, const RadioConfig& radio,
                        const PathLossModel& model);

// gamma0 = P / N0, linear.
double transmit_snr(const RadioConfig& radio);

struct LinkGains {
  std::vector<double> link1;      // beta_{m,1}, TX -> IRS m
  std::vector<double> link2;      // beta_{m,2}, IRS m -> RX
  std::vector<double> cascaded;   // beta_m = beta_{m,1} beta_{m,2}
  double direct = 0.0;            // beta_d
};

LinkGains cascaded_gains(const Scenario& scenario);

// TX at the origin, RX at (60, 0), `irs_count` evenly spaced surfaces of
// side x side elements of size lambda/32 at 3 GHz, and the default radio and
// path-loss parameters.
Scenario reference_scenario(int irs_count = 15, int side = 15);

// The reduced M = 8, N = 64 configuration used for quick validation runs.
Scenario desk_scenario();

}  // namespace irscov
