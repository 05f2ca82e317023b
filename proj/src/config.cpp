#include "hwlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "hwlab/grid.hpp"

namespace hwlab {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool parse_real(const std::string& text, double& out) {
  if (text.empty()) return false;
  std::size_t used = 0;
  try {
    out = std::stod(text, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == text.size() && std::isfinite(out);
}

[[noreturn]] void fail_at(int line, const std::string& what) {
  throw Error("config line " + std::to_string(line) + ": " + what);
}

ConfigValue convert(const KeySpec& spec, const std::string& text, int line) {
  ConfigValue v;
  v.type = spec.type;
  v.line = line;
  auto mismatch = [&] {
    fail_at(line, "type mismatch for '" + spec.key + "': expected " + to_string(spec.type) + ", got '" +
                      text + "'");
  };
  switch (spec.type) {
    case ValueType::integer: {
      double d = 0.0;
      if (!parse_real(text, d) || d != std::floor(d) || std::abs(d) > 9.0e15) mismatch();
      v.value = static_cast<long long>(d);
      break;
    }
    case ValueType::real: {
      double d = 0.0;
      if (!parse_real(text, d)) mismatch();
      v.value = d;
      break;
    }
    case ValueType::boolean: {
      std::string lower = text;
      std::transform(lower.begin(), lower.end(), lower.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      if (lower == "true" || lower == "yes" || lower == "on" || lower == "1") {
        v.value = true;
      } else if (lower == "false" || lower == "no" || lower == "off" || lower == "0") {
        v.value = false;
      } else {
        mismatch();
      }
      break;
    }
    case ValueType::string:
      if (text.empty()) mismatch();
      v.value = text;
      break;
    case ValueType::real_list: {
      std::vector<double> list;
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) {
        double d = 0.0;
        if (!parse_real(trim(item), d)) mismatch();
        list.push_back(d);
      }
      if (list.empty()) mismatch();
      v.value = std::move(list);
      break;
    }
  }
  return v;
}

const ConfigValue* lookup(const RunConfig& c, const std::string& key, ValueType type) {
  auto it = c.values.find(key);
  if (it == c.values.end()) return nullptr;
  if (it->second.type != type) throw Error("config key '" + key + "' is not of type " + to_string(type));
  return &it->second;
}

}  // namespace

std::string to_string(ValueType t) {
  switch (t) {
    case ValueType::integer: return "integer";
    case ValueType::real: return "real";
    case ValueType::boolean: return "boolean";
    case ValueType::string: return "string";
    case ValueType::real_list: return "list of reals";
  }
  return "?";
}

std::string nearest_key(std::string_view key, const Schema& schema) {
  std::string best;
  std::size_t best_d = static_cast<std::size_t>(-1);
  for (const auto& s : schema) {
    const std::size_t d = edit_distance(key, s.key);
    if (d < best_d) {
      best_d = d;
      best = s.key;
    }
  }
  return best;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

long long RunConfig::integer(const std::string& key, long long fallback) const {
  auto v = lookup(*this, key, ValueType::integer);
  return v ? std::get<long long>(v->value) : fallback;
}

double RunConfig::real(const std::string& key, double fallback) const {
  auto it = values.find(key);
  if (it != values.end() && it->second.type == ValueType::integer) {
    return static_cast<double>(std::get<long long>(it->second.value));
  }
  auto v = lookup(*this, key, ValueType::real);
  return v ? std::get<double>(v->value) : fallback;
}

bool RunConfig::boolean(const std::string& key, bool fallback) const {
  auto v = lookup(*this, key, ValueType::boolean);
  return v ? std::get<bool>(v->value) : fallback;
}

std::string RunConfig::string(const std::string& key, const std::string& fallback) const {
  auto v = lookup(*this, key, ValueType::string);
  return v ? std::get<std::string>(v->value) : fallback;
}

std::vector<double> RunConfig::reals(const std::string& key, const std::vector<double>& fallback) const {
  auto v = lookup(*this, key, ValueType::real_list);
  return v ? std::get<std::vector<double>>(v->value) : fallback;
}

void RunConfig::set(const KeySpec& spec, const std::string& text) {
  values[spec.key] = convert(spec, trim(text), 0);
}

const Schema& known_keys() {
  static const Schema schema = {
      {"d", ValueType::integer, "spatial dimension (1, 2 or 3)"},
      {"n", ValueType::integer, "grid points per axis (power of two)"},
      {"L", ValueType::real, "box length"},
      {"nu", ValueType::real, "nonlinearity power"},
      {"mu", ValueType::integer, "sign of the nonlinearity (+1 or -1)"},
      {"delta", ValueType::real, "dispersion coefficient"},
      {"gamma", ValueType::real, "regularity index"},
      {"T", ValueType::real, "final time"},
      {"dt", ValueType::real, "time step"},
      {"stride", ValueType::integer, "monitor stride in steps"},
      {"gammas", ValueType::real_list, "monitored H^gamma indices"},
      {"ceiling", ValueType::real, "norm ceiling factor"},
      {"sigma", ValueType::real, "gaussian width of the initial profile"},
      {"amplitude", ValueType::real, "amplitude of the initial profile"},
      {"linear", ValueType::boolean, "drop the power nonlinearity"},
      {"snapshots", ValueType::boolean, "write HWF1 snapshots at every monitor sample"},
      {"q", ValueType::string, "Lebesgue exponent (number or inf)"},
      {"homogeneous", ValueType::boolean, "homogeneous norm"},
      {"besov", ValueType::boolean, "Besov rather than Sobolev norm"},
      {"k", ValueType::integer, "Sobolev order of the error norm"},
      {"t_eval", ValueType::real, "evaluation time"},
      {"delta_list", ValueType::real_list, "strictly decreasing dispersion values"},
      {"weighted", ValueType::boolean, "measure the error in the weighted H^{k,k} norm"},
      {"decay_guard", ValueType::real, "boundary/peak limit for weighted norms"},
      {"refine", ValueType::integer, "grid refinement factor for the resolution check"},
      {"moment_order", ValueType::integer, "order m of the moment gaussian"},
      {"t_list", ValueType::real_list, "evaluation times of the zero-dispersion leg"},
      {"n_fine", ValueType::integer, "grid points for the zero-dispersion leg"},
      {"t_inner_list", ValueType::real_list, "inner times of the rescaled leg"},
      {"a", ValueType::real, "first amplitude"},
      {"a_prime", ValueType::real, "second amplitude"},
      {"log2_s_list", ValueType::real_list, "log2 of the dilation ratios delta/lambda"},
      {"eps0", ValueType::real, "homogeneous critical norm of the data"},
      {"ladder", ValueType::real_list, "geometric time ladder"},
      {"p", ValueType::string, "time Lebesgue exponent"},
      {"samples", ValueType::integer, "number of random fields"},
      {"nodes", ValueType::integer, "time quadrature nodes"},
      {"eta_list", ValueType::real_list, "perturbation sizes"},
      {"eps", ValueType::real, "regularity loss for the weaker norm"},
      {"fit_min", ValueType::real, "lower end of the fit window"},
      {"fit_max", ValueType::real, "upper end of the fit window"},
  };
  return schema;
}

RunConfig parse_config(std::string_view text, const Schema& schema) {
  RunConfig out;
  std::stringstream ss{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(ss, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail_at(line, "expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) fail_at(line, "missing key");
    auto spec = std::find_if(schema.begin(), schema.end(), [&](const KeySpec& s) { return s.key == key; });
    if (spec == schema.end()) {
      const std::string best = nearest_key(key, schema);
      fail_at(line, "unknown key '" + key + "'" + (best.empty() ? "" : " (did you mean '" + best + "'?)"));
    }
    if (out.values.count(key)) {
      fail_at(line, "duplicate key '" + key + "' (first set on line " +
                        std::to_string(out.values[key].line) + ")");
    }
    out.values[key] = convert(*spec, value, line);
  }
  return out;
}

}  // namespace hwlab
