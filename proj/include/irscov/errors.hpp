#pragma once

#include <stdexcept>
#include <string>

namespace irscov {

// Malformed or inconsistent experiment configuration. `key_path` is a
// JSON-pointer style location ("/radio/carrier_hz") when the error came
// from a config file, empty otherwise.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key_path, const std::string& message)
      : std::runtime_error(key_path.empty() ? message : key_path + ": " + message),
        key_path_(std::move(key_path)) {}

  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

// Non-finite intermediate values, failed decompositions and similar.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace irscov
