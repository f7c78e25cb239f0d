#include "sgad/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace sgad::cli {

namespace {

enum class Kind {
  Real,          // any finite real
  Positive,      // > 0
  NonNegative,   // >= 0
  AutoPositive,  // "auto" or > 0
  AutoReal,      // "auto" or finite real
  Count,         // integer >= 1
  Index,         // integer >= 0
  Seed,          // unsigned 64-bit
  Bool,
  Choice,
  Point,    // named point or real list
  Reals,    // non-empty real list
  Words,    // non-empty comma-separated names
  Text,     // non-empty
};

struct KeySpec {
  std::string name;
  Kind kind;
  std::string help;
  std::vector<std::pair<Command, std::string>> defaults;  // presence = key applies
  std::vector<std::string> choices = {};
};

constexpr Command kGad = Command::RunGad;
constexpr Command kMs = Command::RunMsGad;
constexpr Command kAc = Command::RunAc;
constexpr Command kCl = Command::Classify;
constexpr Command kTh = Command::VerifyTheorem1;
constexpr Command kSw = Command::SweepGamma;

const std::vector<KeySpec>& registry() {
  static const std::vector<KeySpec> specs = {
      {"model", Kind::Choice, "model name",
       {{kGad, "example1"}, {kMs, "example2-slowfast"}, {kCl, "example1"}, {kTh, "example1"}},
       {"example1", "example2-effective", "example2-slowfast"}},
      {"dynamics", Kind::Choice, "simplified-v | simplified-w | original | hamilton",
       {{kGad, "simplified-v"}},
       {"simplified-v", "simplified-w", "original", "hamilton"}},
      {"variant", Kind::Choice, "MsGAD direction form", {{kMs, "v-form"}}, {"v-form", "w-form"}},
      {"form", Kind::Choice, "direction form: v (J v) or w (J^T w)", {{kAc, "v"}, {kSw, "v"}, {kTh, "v"}},
       {"v", "w"}},
      {"x0", Kind::Point, "start: m1, m2, m3, s, s1, s2 or a list", {{kGad, "m1"}, {kMs, "m2"}}},
      {"v0", Kind::Reals, "initial direction", {{kGad, "1, 0"}, {kMs, "1, 0"}}},
      {"x", Kind::Point, "point to classify", {{kCl, "s"}}},
      {"points", Kind::Words, "fixed points to verify, or 'saddles'", {{kTh, "saddles"}}},
      {"refine", Kind::Bool, "Newton-refine the point first", {{kCl, "true"}, {kTh, "true"}}},
      {"tol", Kind::Positive, "fixed-point residual tolerance", {{kCl, "1e-8"}}},
      {"dt", Kind::AutoPositive, "time step",
       {{kGad, "1e-3"}, {kMs, "5e-3"}, {kAc, "auto"}, {kSw, "auto"}}},
      {"max_steps", Kind::Count, "step budget",
       {{kGad, "1000000"}, {kMs, "40000"}, {kAc, "2000000"}, {kSw, "2000000"}}},
      {"residual_tol", Kind::Positive, "convergence threshold",
       {{kGad, "1e-8"}, {kMs, "1e-2"}, {kAc, "1e-6"}, {kSw, "1e-6"}}},
      {"relaxation", Kind::Positive, "direction time-scale factor",
       {{kGad, "1"}, {kMs, "1"}, {kAc, "1"}, {kSw, "1"}}},
      {"kick", Kind::AutoReal, "signed start displacement along v0", {{kGad, "auto"}, {kMs, "auto"}}},
      {"record_every", Kind::Index, "trajectory sampling (0 = off)",
       {{kGad, "100"}, {kMs, "10"}, {kAc, "1000"}, {kSw, "0"}}},
      {"window", Kind::Count, "trailing window in macro steps", {{kMs, "2000"}}},
      {"epsilon", Kind::Positive, "scale separation", {{kMs, "1e-3"}}},
      {"dt_micro", Kind::AutoPositive, "micro step (auto = 0.003 epsilon)", {{kMs, "auto"}}},
      {"n_burnin", Kind::Index, "discarded micro steps", {{kMs, "200"}}},
      {"n_average", Kind::Count, "averaged micro steps per replica", {{kMs, "22500"}}},
      {"n_replicas", Kind::Count, "micro chains", {{kMs, "4"}}},
      {"n_batches", Kind::Count, "batches for the standard error", {{kMs, "8"}}},
      {"seed", Kind::Seed, "RNG seed", {{kMs, "20170101"}}},
      {"n", Kind::Count, "grid points per side", {{kAc, "128"}, {kSw, "128"}}},
      {"shear_variant", Kind::Choice, "none | x-shear | xy-shear", {{kAc, "x-shear"}, {kSw, "x-shear"}},
       {"none", "x-shear", "xy-shear"}},
      {"gamma_shear", Kind::NonNegative, "shear rate", {{kAc, "0"}}},
      {"gammas", Kind::Reals, "ascending shear rates",
       {{kSw, "0.005, 0.02, 0.035, 0.05, 0.065, 0.08"}}},
      {"kappa", Kind::Positive, "interface parameter", {{kAc, "0.01"}, {kSw, "0.01"}}},
      {"phi0", Kind::Text, "droplet | stripe-horizontal | stripe-vertical | field file",
       {{kAc, "droplet"}, {kSw, "stripe-vertical"}}},
      {"dir0", Kind::Text, "auto (1 - phi0^2) or field file", {{kAc, "auto"}, {kSw, "auto"}}},
      {"output_dir", Kind::Text, "output directory",
       {{kGad, "out"}, {kMs, "out"}, {kAc, "out"}, {kCl, "out"}, {kTh, "out"}, {kSw, "out"}}},
  };
  return specs;
}

const KeySpec* find_spec(const std::string& key) {
  for (const auto& s : registry())
    if (s.name == key) return &s;
  return nullptr;
}

const std::string* default_for(const KeySpec& spec, Command c) {
  for (const auto& [cmd, value] : spec.defaults)
    if (cmd == c) return &value;
  return nullptr;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> to_real(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> to_unsigned(const std::string& s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::vector<std::string> split_list(const std::string& s) {
  std::string body = trim(s);
  if (!body.empty() && body.front() == '[' && body.back() == ']') body = body.substr(1, body.size() - 2);
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : body) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  return parts;
}

std::optional<std::vector<double>> to_reals(const std::string& s) {
  std::vector<double> out;
  for (const auto& p : split_list(s)) {
    auto v = to_real(p);
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  if (out.empty()) return std::nullopt;
  return out;
}

std::optional<bool> to_bool(const std::string& s) {
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  return std::nullopt;
}

bool is_point_name(const std::string& s) {
  static const std::vector<std::string> names = {"m1", "m2", "m3", "s", "s1", "s2"};
  return std::find(names.begin(), names.end(), s) != names.end();
}

void check_value(const KeySpec& spec, const std::string& v) {
  auto fail = [&](const std::string& what) { throw ConfigError(spec.name, "'" + v + "' is not " + what); };
  switch (spec.kind) {
    case Kind::Real:
      if (!to_real(v)) fail("a finite number");
      break;
    case Kind::Positive: {
      auto r = to_real(v);
      if (!r || !(*r > 0.0)) fail("a positive number");
      break;
    }
    case Kind::NonNegative: {
      auto r = to_real(v);
      if (!r || !(*r >= 0.0)) fail("a non-negative number");
      break;
    }
    case Kind::AutoPositive: {
      if (v == "auto") break;
      auto r = to_real(v);
      if (!r || !(*r > 0.0)) fail("'auto' or a positive number");
      break;
    }
    case Kind::AutoReal:
      if (v != "auto" && !to_real(v)) fail("'auto' or a finite number");
      break;
    case Kind::Count: {
      auto u = to_unsigned(v);
      if (!u || *u == 0) fail("a positive integer");
      break;
    }
    case Kind::Index:
      if (!to_unsigned(v)) fail("a non-negative integer");
      break;
    case Kind::Seed:
      if (!to_unsigned(v)) fail("an unsigned 64-bit integer");
      break;
    case Kind::Bool:
      if (!to_bool(v)) fail("true or false");
      break;
    case Kind::Choice:
      if (std::find(spec.choices.begin(), spec.choices.end(), v) == spec.choices.end()) {
        std::string list;
        for (const auto& c : spec.choices) list += (list.empty() ? "" : ", ") + c;
        fail("one of " + list);
      }
      break;
    case Kind::Point:
      if (!is_point_name(v) && !to_reals(v)) fail("a point name (m1, m2, m3, s, s1, s2) or a list of numbers");
      break;
    case Kind::Reals:
      if (!to_reals(v)) fail("a list of numbers");
      break;
    case Kind::Words:
    case Kind::Text:
      if (v.empty()) fail("a non-empty value");
      break;
  }
}

}  // namespace

std::string_view to_string(Command c) noexcept {
  switch (c) {
    case Command::RunGad: return "run-gad";
    case Command::RunMsGad: return "run-msgad";
    case Command::RunAc: return "run-ac";
    case Command::Classify: return "classify";
    case Command::VerifyTheorem1: return "verify-theorem1";
    case Command::SweepGamma: return "sweep-gamma";
  }
  return "?";
}

const std::vector<Command>& all_commands() {
  static const std::vector<Command> cmds = {kGad, kMs, kAc, kCl, kTh, kSw};
  return cmds;
}

Command parse_command(std::string_view name) {
  for (Command c : all_commands())
    if (to_string(c) == name) return c;
  throw ConfigError("command", "unknown command '" + std::string(name) + "'");
}

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::Default: return "default";
    case Provenance::File: return "file";
    case Provenance::Flag: return "flag";
  }
  return "?";
}

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::runtime_error(key + ": " + message), key_(std::move(key)) {}

std::vector<KeyInfo> keys_for(Command c) {
  std::vector<KeyInfo> out;
  for (const auto& s : registry())
    if (default_for(s, c)) out.push_back({s.name, s.help});
  return out;
}

RunConfig::RunConfig(Command c) : command_(c) {
  for (const auto& s : registry()) {
    if (const std::string* d = default_for(s, c)) {
      order_.push_back(s.name);
      values_[s.name] = {*d, Provenance::Default};
    }
  }
}

void RunConfig::set(const std::string& key, const std::string& value, Provenance from) {
  const KeySpec* spec = find_spec(key);
  if (spec == nullptr) throw ConfigError(key, "unknown key");
  if (!default_for(*spec, command_))
    throw ConfigError(key, "not accepted by " + std::string(to_string(command_)));
  const std::string v = trim(value);
  check_value(*spec, v);
  values_[key] = {v, from};
}

const ConfigValue& RunConfig::at(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(key, "not set for " + std::string(to_string(command_)));
  return it->second;
}

bool RunConfig::is_auto(const std::string& key) const { return at(key).text == "auto"; }

std::string RunConfig::text(const std::string& key) const { return at(key).text; }

double RunConfig::real(const std::string& key) const {
  auto r = to_real(at(key).text);
  if (!r) throw ConfigError(key, "'" + at(key).text + "' is not a number");
  return *r;
}

std::optional<double> RunConfig::optional_real(const std::string& key) const {
  if (is_auto(key)) return std::nullopt;
  return real(key);
}

std::size_t RunConfig::count(const std::string& key) const {
  auto u = to_unsigned(at(key).text);
  if (!u) throw ConfigError(key, "'" + at(key).text + "' is not an integer");
  return static_cast<std::size_t>(*u);
}

std::uint64_t RunConfig::seed(const std::string& key) const {
  auto u = to_unsigned(at(key).text);
  if (!u) throw ConfigError(key, "'" + at(key).text + "' is not an integer");
  return *u;
}

bool RunConfig::flag(const std::string& key) const {
  auto b = to_bool(at(key).text);
  if (!b) throw ConfigError(key, "'" + at(key).text + "' is not a boolean");
  return *b;
}

std::vector<double> RunConfig::reals(const std::string& key) const {
  auto r = to_reals(at(key).text);
  if (!r) throw ConfigError(key, "'" + at(key).text + "' is not a list of numbers");
  return *r;
}

std::vector<std::string> RunConfig::words(const std::string& key) const { return split_list(at(key).text); }

std::string RunConfig::to_manifest(const std::vector<std::string>& outputs) const {
  std::ostringstream os;
  os << "# sgad run manifest; replay with: sgad replay <this file>\n";
  os << "command = " << to_string(command_) << "\n";
  for (const auto& k : order_) {
    const auto& v = values_.at(k);
    os << k << " = " << v.text << "  # " << to_string(v.provenance) << "\n";
  }
  for (const auto& f : outputs) os << "# output " << f << "\n";
  return os.str();
}

std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream is{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected 'key = value', got '" + t + "'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "missing key");
    for (const auto& [k, v] : out)
      if (k == key) throw ConfigError(key, "given twice");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

RunConfig resolve_config(Command c, const std::vector<std::pair<std::string, std::string>>& file_pairs,
                         const std::vector<std::pair<std::string, std::string>>& flag_pairs) {
  RunConfig cfg(c);
  for (const auto& [k, v] : file_pairs) {
    if (k == "command") {
      if (parse_command(v) != c)
        throw ConfigError("command", "file says '" + v + "' but '" + std::string(to_string(c)) + "' was requested");
      continue;
    }
    cfg.set(k, v, Provenance::File);
  }
  for (const auto& [k, v] : flag_pairs) cfg.set(k, v, Provenance::Flag);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, std::optional<Command> command,
                      const std::vector<std::pair<std::string, std::string>>& flag_pairs) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto pairs = parse_key_values(buf.str());
  if (!command) {
    auto it = std::find_if(pairs.begin(), pairs.end(), [](const auto& p) { return p.first == "command"; });
    if (it == pairs.end()) throw ConfigError("command", "missing in '" + path.string() + "'");
    command = parse_command(it->second);
  }
  return resolve_config(*command, pairs, flag_pairs);
}

}  // namespace sgad::cli
