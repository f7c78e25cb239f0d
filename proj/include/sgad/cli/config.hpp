#pragma once

// Run configuration for the sgad command-line tool.
//
// Configs are line-oriented "key = value" text ('#' starts a comment). The
// manifest written by every run uses the same dialect and can be replayed.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sgad::cli {

enum class Command { RunGad, RunMsGad, RunAc, Classify, VerifyTheorem1, SweepGamma };

std::string_view to_string(Command c) noexcept;
Command parse_command(std::string_view name);
const std::vector<Command>& all_commands();

enum class Provenance { Default, File, Flag };
std::string_view to_string(Provenance p) noexcept;

/// Raised for configuration problems; `key()` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message);
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

struct KeyInfo {
  std::string name;
  std::string help;
};

/// Keys accepted by a command, in manifest order.
std::vector<KeyInfo> keys_for(Command c);

struct ConfigValue {
  std::string text;
  Provenance provenance = Provenance::Default;
};

class RunConfig {
 public:
  RunConfig() = default;
  explicit RunConfig(Command c);

  Command command() const noexcept { return command_; }

  /// Validates and stores a value. Throws ConfigError on an unknown key or a
  /// value that does not parse for that key.
  void set(const std::string& key, const std::string& value, Provenance from);

  const ConfigValue& at(const std::string& key) const;
  bool is_auto(const std::string& key) const;

  std::string text(const std::string& key) const;
  double real(const std::string& key) const;
  std::optional<double> optional_real(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  std::uint64_t seed(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<std::string> words(const std::string& key) const;

  /// Keys in manifest order.
  const std::vector<std::string>& order() const noexcept { return order_; }

  /// "key = value  # provenance" lines preceded by "command = ...".
  std::string to_manifest(const std::vector<std::string>& outputs = {}) const;

 private:
  Command command_ = Command::RunGad;
  std::vector<std::string> order_;
  std::map<std::string, ConfigValue> values_;
};

/// key/value pairs from "key = value" text. Throws ConfigError on malformed lines
/// (key "line N") and on duplicate keys.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text);

/// Resolves defaults, then file pairs, then flag pairs. A "command" entry in the
/// file must match `c`.
RunConfig resolve_config(Command c, const std::vector<std::pair<std::string, std::string>>& file_pairs,
                         const std::vector<std::pair<std::string, std::string>>& flag_pairs);

/// Reads a config or manifest file. `command` is taken from the file when the
/// caller does not fix it.
RunConfig load_config(const std::filesystem::path& path, std::optional<Command> command,
                      const std::vector<std::pair<std::string, std::string>>& flag_pairs);

}  // namespace sgad::cli
