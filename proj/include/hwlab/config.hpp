#pragma once

// Plain-text run configuration: `key = value` lines, `#` comments, lists as
// comma-separated values.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hwlab {

enum class ValueType { integer, real, boolean, string, real_list };

struct KeySpec {
  std::string key;
  ValueType type;
  std::string doc;
};

using Schema = std::vector<KeySpec>;

struct ConfigValue {
  ValueType type = ValueType::string;
  std::variant<long long, double, bool, std::string, std::vector<double>> value;
  int line = 0;
};

struct RunConfig {
  std::string command;
  std::map<std::string, ConfigValue> values;
  std::string input_path;
  std::string output_dir;
  std::uint64_t seed = 0;
  int threads = 1;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  long long integer(const std::string& key, long long fallback) const;
  double real(const std::string& key, double fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::string string(const std::string& key, const std::string& fallback) const;
  std::vector<double> reals(const std::string& key, const std::vector<double>& fallback) const;

  /// Stores `text` for `key` as if it had appeared in a config file (used for
  /// command-line overrides).
  void set(const KeySpec& spec, const std::string& text);
};

/// Every key understood by some command.
const Schema& known_keys();

/// Throws Error naming the line for duplicates, type mismatches and unknown
/// keys (with the closest known key as a suggestion).
RunConfig parse_config(std::string_view text, const Schema& schema = known_keys());

std::string to_string(ValueType t);

/// Closest schema key by edit distance ("" for an empty schema).
std::string nearest_key(std::string_view key, const Schema& schema);

/// Levenshtein distance, used for suggestions.
std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace hwlab
