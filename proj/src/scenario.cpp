#include "irscov/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <utility>

#include "irscov/errors.hpp"

namespace irscov {

double distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

void PanelGeometry::validate() const {
  if (n_h < 1 || n_v < 1) {
    throw ConfigError("/panel", "n_h and n_v must be at least 1");
  }
  if (!(d_h > 0.0) || !(d_v > 0.0) || !std::isfinite(d_h) || !std::isfinite(d_v)) {
    throw ConfigError("/panel", "element dimensions must be positive and finite");
  }
}

double RadioConfig::effective_noise_dbm() const {
  return add_noise_figure ? noise_floor_dbm + noise_figure_db : noise_floor_dbm;
}

void RadioConfig::validate() const {
  if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz)) {
    throw ConfigError("/radio/carrier_hz", "must be positive");
  }
  if (!(bandwidth_hz > 0.0)) {
    throw ConfigError("/radio/bandwidth_hz", "must be positive");
  }
  for (double v : {tx_power_dbm, noise_floor_dbm, noise_figure_db, gain_tx_dbi, gain_rx_dbi}) {
    if (!std::isfinite(v)) throw ConfigError("/radio", "non-finite dB value");
  }
}

void PathLossModel::validate() const {
  if (!(exponent_link1 > 0.0)) throw ConfigError("/path_loss/exponent_link1", "must be positive");
  if (!(exponent_link2 > 0.0)) throw ConfigError("/path_loss/exponent_link2", "must be positive");
  if (!(exponent_direct > 0.0)) throw ConfigError("/path_loss/exponent_direct", "must be positive");
  if (!std::isfinite(intercept_db)) throw ConfigError("/path_loss/intercept_db", "must be finite");
  if (!(direct_scale >= 0.0) || !std::isfinite(direct_scale)) {
    throw ConfigError("/path_loss/direct_link_scale", "must be non-negative");
  }
}

void Scenario::validate() const {
  auto finite = [](const Position& p) { return std::isfinite(p.x) && std::isfinite(p.y); };
  if (!finite(tx)) throw ConfigError("/tx", "non-finite coordinate");
  if (!finite(rx)) throw ConfigError("/rx", "non-finite coordinate");
  if (irs_positions.empty()) throw ConfigError("/irs", "at least one IRS is required");
  std::set<std::pair<double, double>> seen;
  for (std::size_t i = 0; i < irs_positions.size(); ++i) {
    const auto& p = irs_positions[i];
    const std::string path = "/irs/positions/" + std::to_string(i);
    if (!finite(p)) throw ConfigError(path, "non-finite coordinate");
    if (p == tx || p == rx) throw ConfigError(path, "IRS coincides with TX or RX");
    if (!seen.emplace(p.x, p.y).second) throw ConfigError(path, "duplicate IRS position");
  }
  panel.validate();
  radio.validate();
  path_loss.validate();
}

std::vector<Position> place_irs_uniform(int m_count, const Position& tx, const Position& rx) {
  if (m_count < 1) throw std::invalid_argument("place_irs_uniform: m_count must be >= 1");
  if (tx == rx) throw std::invalid_argument("place_irs_uniform: coincident endpoints");
  std::vector<Position> out;
  out.reserve(m_count);
  const double denom = m_count + 1;
  for (int k = 1; k <= m_count; ++k) {
    const double f = k / denom;
    out.push_back({tx.x + f * (rx.x - tx.x), tx.y + f * (rx.y - tx.y)});
  }
  return out;
}

std::vector<Position> place_irs_random(int m_count, const Position& tx, const Position& rx,
                                       std::uint64_t seed) {
  if (m_count < 1) throw std::invalid_argument("place_irs_random: m_count must be >= 1");
  if (tx == rx) throw std::invalid_argument("place_irs_random: coincident endpoints");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> fractions;
  while (static_cast<int>(fractions.size()) < m_count) {
    const double f = u(rng);
    if (f > 0.0 && std::find(fractions.begin(), fractions.end(), f) == fractions.end()) {
      fractions.push_back(f);
    }
  }
  std::sort(fractions.begin(), fractions.end());
  std::vector<Position> out;
  out.reserve(m_count);
  for (double f : fractions) {
    out.push_back({tx.x + f * (rx.x - tx.x), tx.y + f * (rx.y - tx.y)});
  }
  return out;
}

double path_loss_linear(double distance, double exponent, const RadioConfig& radio,
                        const PathLossModel& model) {
  if (!(distance > 0.0)) throw std::invalid_argument("path_loss_linear: distance must be > 0");
  const double distance_term = 10.0 * exponent * std::log10(distance);
  const double signed_term =
      model.sign == PathLossSign::kAttenuation ? -distance_term : distance_term;
  const double db = radio.gain_tx_dbi + radio.gain_rx_dbi + model.intercept_db + signed_term;
  return std::pow(10.0, db / 10.0);
}

double transmit_snr(const RadioConfig& radio) {
  return std::pow(10.0, (radio.tx_power_dbm - radio.effective_noise_dbm()) / 10.0);
}

LinkGains cascaded_gains(const Scenario& scenario) {
  const auto& pl = scenario.path_loss;
  LinkGains gains;
  for (const auto& p : scenario.irs_positions) {
    const double d1 = distance(scenario.tx, p);
    const double d2 = distance(p, scenario.rx);
    if (d1 <= 0.0 || d2 <= 0.0) {
      throw ConfigError("/irs", "IRS coincides with TX or RX");
    }
    const double b1 = path_loss_linear(d1, pl.exponent_link1, scenario.radio, pl);
    const double b2 = path_loss_linear(d2, pl.exponent_link2, scenario.radio, pl);
    gains.link1.push_back(b1);
    gains.link2.push_back(b2);
    gains.cascaded.push_back(b1 * b2);
  }
  gains.direct = pl.direct_scale * path_loss_linear(distance(scenario.tx, scenario.rx),
                                                    pl.exponent_direct, scenario.radio, pl);
  return gains;
}

Scenario reference_scenario(int irs_count, int side) {
  Scenario s;
  s.tx = {0.0, 0.0};
  s.rx = {60.0, 0.0};
  s.irs_positions = place_irs_uniform(irs_count, s.tx, s.rx);
  const double element = s.radio.wavelength() / 32.0;
  s.panel = {side, side, element, element};
  return s;
}

Scenario desk_scenario() { return reference_scenario(8, 8); }

}  // namespace irscov
