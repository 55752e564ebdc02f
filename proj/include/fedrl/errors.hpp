#pragma once

#include <stdexcept>
#include <string>

namespace fedrl {

// Invalid user-facing configuration. `key` names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, std::string reason)
      : std::invalid_argument(key + ": " + reason), key_(std::move(key)), reason_(std::move(reason)) {}
  const std::string& key() const noexcept { return key_; }
  const std::string& reason() const noexcept { return reason_; }

  // Same error with `prefix.` prepended to the key.
  ConfigError nested(const std::string& prefix) const { return {prefix + "." + key_, reason_}; }

 private:
  std::string key_;
  std::string reason_;
};

// A caller broke an API precondition (stepping a finished episode,
// averaging mismatched layouts, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace fedrl
