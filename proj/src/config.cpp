#include "irscov/config.hpp"

#include <fstream>
#include <set>
#include <string>

#include "irscov/errors.hpp"

namespace irscov {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) { return path + "/" + key; }

const json& require_object(const json& node, const std::string& path) {
  if (!node.is_object()) throw ConfigError(path.empty() ? "/" : path, "expected an object");
  return node;
}

void reject_unknown(const json& node, const std::string& path, const std::set<std::string>& known) {
  for (const auto& [key, value] : node.items()) {
    if (!known.contains(key)) throw ConfigError(join(path, key), "unknown key");
  }
}

double number(const json& node, const std::string& key, const std::string& path, double fallback) {
  if (!node.contains(key)) return fallback;
  const json& v = node.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
  return v.get<double>();
}

int integer(const json& node, const std::string& key, const std::string& path, int fallback) {
  if (!node.contains(key)) return fallback;
  const json& v = node.at(key);
  if (!v.is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
  return v.get<int>();
}

bool boolean(const json& node, const std::string& key, const std::string& path, bool fallback) {
  if (!node.contains(key)) return fallback;
  const json& v = node.at(key);
  if (!v.is_boolean()) throw ConfigError(join(path, key), "expected true or false");
  return v.get<bool>();
}

std::string text(const json& node, const std::string& key, const std::string& path,
                 const std::string& fallback) {
  if (!node.contains(key)) return fallback;
  const json& v = node.at(key);
  if (!v.is_string()) throw ConfigError(join(path, key), "expected a string");
  return v.get<std::string>();
}

Position position(const json& node, const std::string& path) {
  require_object(node, path);
  reject_unknown(node, path, {"x", "y"});
  if (!node.contains("x") || !node.contains("y")) throw ConfigError(path, "x and y are required");
  return {number(node, "x", path, 0.0), number(node, "y", path, 0.0)};
}

}  // namespace

const char* sign_convention_name(PathLossSign sign) {
  return sign == PathLossSign::kAttenuation ? "attenuation" : "as-written";
}

const char* normalization_name(DiagonalNormalization normalization) {
  return normalization == DiagonalNormalization::kElementArea ? "element-area" : "unit";
}

ExperimentConfig parse_config(const json& doc) {
  require_object(doc, "");
  reject_unknown(doc, "", {"schema_version", "tx", "rx", "irs", "panel", "radio", "path_loss",
                           "correlation", "description"});
  if (!doc.contains("schema_version")) throw ConfigError("/schema_version", "required");
  const int version = integer(doc, "schema_version", "", 0);
  if (version != kConfigSchemaVersion) {
    throw ConfigError("/schema_version", "unsupported version " + std::to_string(version));
  }

  ExperimentConfig cfg;
  Scenario& s = cfg.scenario;
  if (doc.contains("tx")) s.tx = position(doc["tx"], "/tx");
  if (doc.contains("rx")) s.rx = position(doc["rx"], "/rx");
  if (s.tx == s.rx) throw ConfigError("/rx", "TX and RX coincide");

  {
    const json& radio = doc.contains("radio") ? require_object(doc["radio"], "/radio") : json::object();
    const std::string p = "/radio";
    reject_unknown(radio, p, {"tx_power_dbm", "noise_floor_dbm", "noise_figure_db", "add_noise_figure",
                              "carrier_hz", "bandwidth_hz", "gain_tx_dbi", "gain_rx_dbi"});
    RadioConfig& r = s.radio;
    r.tx_power_dbm = number(radio, "tx_power_dbm", p, r.tx_power_dbm);
    r.noise_floor_dbm = number(radio, "noise_floor_dbm", p, r.noise_floor_dbm);
    r.noise_figure_db = number(radio, "noise_figure_db", p, r.noise_figure_db);
    r.add_noise_figure = boolean(radio, "add_noise_figure", p, r.add_noise_figure);
    r.carrier_hz = number(radio, "carrier_hz", p, r.carrier_hz);
    r.bandwidth_hz = number(radio, "bandwidth_hz", p, r.bandwidth_hz);
    r.gain_tx_dbi = number(radio, "gain_tx_dbi", p, r.gain_tx_dbi);
    r.gain_rx_dbi = number(radio, "gain_rx_dbi", p, r.gain_rx_dbi);
    r.validate();
  }

  {
    const json& panel = doc.contains("panel") ? require_object(doc["panel"], "/panel") : json::object();
    const std::string p = "/panel";
    reject_unknown(panel, p, {"n_h", "n_v", "d_h", "d_v", "element_size_wavelengths"});
    PanelGeometry& g = s.panel;
    g.n_h = integer(panel, "n_h", p, 15);
    g.n_v = integer(panel, "n_v", p, 15);
    const double fraction = number(panel, "element_size_wavelengths", p, 1.0 / 32.0);
    if (!(fraction > 0.0)) throw ConfigError(join(p, "element_size_wavelengths"), "must be positive");
    const double element = fraction * s.radio.wavelength();
    g.d_h = number(panel, "d_h", p, element);
    g.d_v = number(panel, "d_v", p, element);
    if (g.n_h < 1) throw ConfigError(join(p, "n_h"), "must be >= 1");
    if (g.n_v < 1) throw ConfigError(join(p, "n_v"), "must be >= 1");
    if (!(g.d_h > 0.0)) throw ConfigError(join(p, "d_h"), "must be positive");
    if (!(g.d_v > 0.0)) throw ConfigError(join(p, "d_v"), "must be positive");
  }

  {
    const json& pl = doc.contains("path_loss") ? require_object(doc["path_loss"], "/path_loss") : json::object();
    const std::string p = "/path_loss";
    reject_unknown(pl, p, {"exponent_link1", "exponent_link2", "exponent_direct", "intercept_db",
                           "sign_convention", "direct_link_scale"});
    PathLossModel& m = s.path_loss;
    m.exponent_link1 = number(pl, "exponent_link1", p, m.exponent_link1);
    m.exponent_link2 = number(pl, "exponent_link2", p, m.exponent_link2);
    m.exponent_direct = number(pl, "exponent_direct", p, m.exponent_direct);
    m.intercept_db = number(pl, "intercept_db", p, m.intercept_db);
    m.direct_scale = number(pl, "direct_link_scale", p, m.direct_scale);
    const std::string sign = text(pl, "sign_convention", p, "attenuation");
    if (sign == "attenuation") {
      m.sign = PathLossSign::kAttenuation;
    } else if (sign == "as-written") {
      m.sign = PathLossSign::kAsWritten;
    } else {
      throw ConfigError(join(p, "sign_convention"), "expected \"attenuation\" or \"as-written\"");
    }
    m.validate();
  }

  {
    const std::string p = "/irs";
    const json& irs = doc.contains("irs") ? require_object(doc["irs"], p) : json::object();
    reject_unknown(irs, p, {"count", "placement", "seed", "positions"});
    if (irs.contains("positions")) {
      if (irs.contains("count") || irs.contains("placement")) {
        throw ConfigError(join(p, "positions"), "explicit positions exclude count/placement");
      }
      const json& list = irs["positions"];
      if (!list.is_array() || list.empty()) {
        throw ConfigError(join(p, "positions"), "expected a non-empty array");
      }
      for (std::size_t i = 0; i < list.size(); ++i) {
        s.irs_positions.push_back(position(list[i], join(join(p, "positions"), std::to_string(i))));
      }
    } else {
      const int count = integer(irs, "count", p, 15);
      if (count < 1) throw ConfigError(join(p, "count"), "must be >= 1");
      const std::string placement = text(irs, "placement", p, "even");
      if (placement == "even") {
        s.irs_positions = place_irs_uniform(count, s.tx, s.rx);
      } else if (placement == "random") {
        if (irs.contains("seed") && !(irs["seed"].is_number_integer() && irs["seed"].get<std::int64_t>() >= 0)) {
          throw ConfigError(join(p, "seed"), "expected a non-negative integer");
        }
        const std::uint64_t seed = irs.value("seed", std::uint64_t{1});
        s.irs_positions = place_irs_random(count, s.tx, s.rx, seed);
      } else {
        throw ConfigError(join(p, "placement"), "expected \"even\" or \"random\"");
      }
    }
  }

  {
    const std::string p = "/correlation";
    const json& c = doc.contains("correlation") ? require_object(doc["correlation"], p) : json::object();
    reject_unknown(c, p, {"model", "normalization"});
    const std::string model = text(c, "model", p, "sinc");
    if (model == "sinc") {
      cfg.correlation.model = CorrelationModel::kSinc;
    } else if (model == "uncorrelated") {
      cfg.correlation.model = CorrelationModel::kUncorrelated;
    } else {
      throw ConfigError(join(p, "model"), "expected \"sinc\" or \"uncorrelated\"");
    }
    const std::string norm = text(c, "normalization", p, "element-area");
    if (norm == "element-area") {
      cfg.correlation.normalization = DiagonalNormalization::kElementArea;
    } else if (norm == "unit") {
      cfg.correlation.normalization = DiagonalNormalization::kUnit;
    } else {
      throw ConfigError(join(p, "normalization"), "expected \"element-area\" or \"unit\"");
    }
  }

  s.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON in ") + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& config) {
  const Scenario& s = config.scenario;
  json positions = json::array();
  for (const auto& p : s.irs_positions) positions.push_back({{"x", p.x}, {"y", p.y}});
  return {
      {"schema_version", kConfigSchemaVersion},
      {"tx", {{"x", s.tx.x}, {"y", s.tx.y}}},
      {"rx", {{"x", s.rx.x}, {"y", s.rx.y}}},
      {"irs", {{"positions", positions}}},
      {"panel", {{"n_h", s.panel.n_h}, {"n_v", s.panel.n_v}, {"d_h", s.panel.d_h}, {"d_v", s.panel.d_v}}},
      {"radio",
       {{"tx_power_dbm", s.radio.tx_power_dbm},
        {"noise_floor_dbm", s.radio.noise_floor_dbm},
        {"noise_figure_db", s.radio.noise_figure_db},
        {"add_noise_figure", s.radio.add_noise_figure},
        {"carrier_hz", s.radio.carrier_hz},
        {"bandwidth_hz", s.radio.bandwidth_hz},
        {"gain_tx_dbi", s.radio.gain_tx_dbi},
        {"gain_rx_dbi", s.radio.gain_rx_dbi}}},
      {"path_loss",
       {{"exponent_link1", s.path_loss.exponent_link1},
        {"exponent_link2", s.path_loss.exponent_link2},
        {"exponent_direct", s.path_loss.exponent_direct},
        {"intercept_db", s.path_loss.intercept_db},
        {"sign_convention", sign_convention_name(s.path_loss.sign)},
        {"direct_link_scale", s.path_loss.direct_scale}}},
      {"correlation",
       {{"model", config.correlation.model == CorrelationModel::kSinc ? "sinc" : "uncorrelated"},
        {"normalization", normalization_name(config.correlation.normalization)}}},
  };
}

}  // namespace irscov
