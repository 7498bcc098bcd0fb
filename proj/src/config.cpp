#include "dcqd/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dcqd/dynamics.hpp"

namespace dcqd {

namespace {

std::string trimmed(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
      return false;
  return true;
}

}  // namespace

void ConfigMap::fail_at(int line, const std::string& what) const {
  fail(ErrorCategory::config, origin_ + ":" + std::to_string(line) + ": " + what);
}

ConfigMap ConfigMap::parse(const std::string& text, const std::string& origin) {
  ConfigMap cm;
  cm.origin_ = origin;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const size_t cut = raw.find_first_of("#;");
    std::string line = trimmed(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        cm.fail_at(line_no, "unterminated section header");
      section = trimmed(line.substr(1, line.size() - 2));
      if (!valid_name(section))
        cm.fail_at(line_no, "invalid section name '" + section + "'");
      cm.sections_[section];
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      cm.fail_at(line_no, "expected 'key = value', got '" + line + "'");
    const std::string key = trimmed(line.substr(0, eq));
    const std::string value = trimmed(line.substr(eq + 1));
    if (!valid_name(key)) cm.fail_at(line_no, "invalid key name '" + key + "'");
    if (section.empty())
      cm.fail_at(line_no, "key '" + key + "' appears before any [section]");
    if (value.empty()) cm.fail_at(line_no, "key '" + key + "' has no value");
    auto& sec = cm.sections_[section];
    if (sec.count(key))
      cm.fail_at(line_no, "duplicate key '" + key + "' in [" + section + "]");
    sec[key] = Entry{value, line_no, false};
  }
  return cm;
}

ConfigMap ConfigMap::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    fail(ErrorCategory::config, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

bool ConfigMap::has_section(const std::string& section) const {
  return sections_.count(section) != 0;
}

bool ConfigMap::has(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) != 0;
}

const ConfigMap::Entry& ConfigMap::entry(const std::string& section,
                                         const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end())
    fail(ErrorCategory::config,
         origin_ + ": missing required section [" + section + "]");
  const auto k = s->second.find(key);
  if (k == s->second.end())
    fail(ErrorCategory::config,
         origin_ + ": missing required key '" + key + "' in [" + section + "]");
  k->second.consumed = true;
  return k->second;
}

std::string ConfigMap::get_string(const std::string& section,
                                  const std::string& key) const {
  return entry(section, key).value;
}

double ConfigMap::get_double(const std::string& section,
                             const std::string& key) const {
  const Entry& e = entry(section, key);
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(e.value, &pos);
  } catch (const std::exception&) {
    fail_at(e.line, "key '" + key + "': '" + e.value + "' is not a number");
  }
  if (pos != e.value.size())
    fail_at(e.line, "key '" + key + "': trailing characters after number");
  if (!std::isfinite(v))
    fail_at(e.line, "key '" + key + "': value must be finite");
  return v;
}

double ConfigMap::get_double_or(const std::string& section,
                                const std::string& key, double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

std::int64_t ConfigMap::get_int(const std::string& section,
                                const std::string& key) const {
  const Entry& e = entry(section, key);
  size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(e.value, &pos);
  } catch (const std::exception&) {
    fail_at(e.line, "key '" + key + "': '" + e.value + "' is not an integer");
  }
  // Accept scientific shorthand like 1e4 for shot counts.
  if (pos != e.value.size()) {
    const double d = get_double(section, key);
    if (std::abs(d - std::round(d)) > 0.0 || std::abs(d) > 9e15)
      fail_at(e.line, "key '" + key + "': '" + e.value + "' is not an integer");
    return static_cast<std::int64_t>(std::llround(d));
  }
  return v;
}

std::int64_t ConfigMap::get_int_or(const std::string& section,
                                   const std::string& key,
                                   std::int64_t fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

std::uint64_t ConfigMap::get_seed_or(const std::string& section,
                                     const std::string& key,
                                     std::uint64_t fallback) const {
  if (!has(section, key)) return fallback;
  const Entry& e = entry(section, key);
  size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(e.value, &pos);
  } catch (const std::exception&) {
    fail_at(e.line, "key '" + key + "': '" + e.value + "' is not an unsigned integer");
  }
  if (pos != e.value.size() || e.value.front() == '-')
    fail_at(e.line, "key '" + key + "': '" + e.value + "' is not an unsigned integer");
  return v;
}

std::vector<std::int64_t> ConfigMap::get_int_list(const std::string& section,
                                                  const std::string& key) const {
  const Entry& e = entry(section, key);
  std::vector<std::int64_t> out;
  std::string item;
  std::istringstream in(e.value);
  while (std::getline(in, item, ',')) {
    item = trimmed(item);
    if (item.empty()) fail_at(e.line, "key '" + key + "': empty list entry");
    size_t pos = 0;
    double d = 0.0;
    try {
      d = std::stod(item, &pos);
    } catch (const std::exception&) {
      fail_at(e.line, "key '" + key + "': '" + item + "' is not an integer");
    }
    if (pos != item.size() || std::abs(d - std::round(d)) > 0.0 || std::abs(d) > 9e15)
      fail_at(e.line, "key '" + key + "': '" + item + "' is not an integer");
    out.push_back(static_cast<std::int64_t>(std::llround(d)));
  }
  if (out.empty()) fail_at(e.line, "key '" + key + "': list is empty");
  return out;
}

void ConfigMap::reject_unconsumed() const {
  for (const auto& [section, keys] : sections_)
    for (const auto& [key, e] : keys)
      if (!e.consumed)
        fail_at(e.line, "unknown key '" + key + "' in [" + section +
                            "] for this experiment");
}

std::string ConfigMap::canonical_text() const {
  std::ostringstream out;
  for (const auto& [section, keys] : sections_) {
    out << '[' << section << "]\n";
    for (const auto& [key, e] : keys) out << key << " = " << e.value << '\n';
  }
  return out.str();
}

std::uint64_t ConfigMap::hash() const {
  const std::string text = canonical_text();
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// ---------------------------------------------------------------------------

const char* experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::single_qubit: return "single-qubit";
    case ExperimentKind::relaxation: return "relaxation";
    case ExperimentKind::exchange_iso: return "exchange-iso";
    case ExperimentKind::exchange_aniso: return "exchange-aniso";
    case ExperimentKind::scaling: return "scaling";
  }
  return "single-qubit";
}

namespace {

ExperimentKind kind_from_string(const std::string& s) {
  for (ExperimentKind k :
       {ExperimentKind::single_qubit, ExperimentKind::relaxation,
        ExperimentKind::exchange_iso, ExperimentKind::exchange_aniso,
        ExperimentKind::scaling})
    if (s == experiment_kind_name(k)) return k;
  fail(ErrorCategory::config,
       "unknown experiment kind '" + s +
           "' (expected single-qubit, relaxation, exchange-iso, "
           "exchange-aniso or scaling)");
}

void read_mode(const ConfigMap& cm, ExperimentConfig& cfg) {
  const std::string mode = cm.has("experiment", "mode")
                               ? cm.get_string("experiment", "mode")
                               : std::string("exact");
  if (mode == "exact") {
    cfg.sampled = false;
  } else if (mode == "sampled") {
    cfg.sampled = true;
    cfg.n_shots = cm.get_int("experiment", "n_shots");
    if (cfg.n_shots < 1)
      fail(ErrorCategory::config, "n_shots must be a positive shot count");
  } else {
    fail(ErrorCategory::config,
         "mode must be 'exact' or 'sampled', got '" + mode + "'");
  }
}

void read_hamiltonian(const ConfigMap& cm, ExperimentConfig& cfg) {
  cfg.jx = cm.get_double("hamiltonian", "jx");
  cfg.jy = cm.get_double("hamiltonian", "jy");
  cfg.jz = cm.get_double("hamiltonian", "jz");
  cfg.t = cm.get_double("hamiltonian", "t");
  if (!(cfg.t > 0.0))
    fail(ErrorCategory::config, "evolution time t must be positive");
  if (cm.has("hamiltonian", "j_max")) {
    cfg.j_max = cm.get_double("hamiltonian", "j_max");
    if (!(*cfg.j_max > 0.0))
      fail(ErrorCategory::config, "declared bound j_max must be positive");
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from(
    const ConfigMap& cm, std::optional<std::uint64_t> seed_override) {
  ExperimentConfig cfg;
  cfg.kind = kind_from_string(cm.get_string("experiment", "kind"));
  cfg.seed = cm.get_seed_or("experiment", "seed", 1);
  if (seed_override) cfg.seed = *seed_override;

  switch (cfg.kind) {
    case ExperimentKind::single_qubit: {
      read_mode(cm, cfg);
      read_hamiltonian(cm, cfg);
      const SingleQubitHamiltonian h{cfg.jx, cfg.jy, cfg.jz};
      if (!(h.magnitude() > 0.0))
        fail(ErrorCategory::config, "the coupling vector must not vanish");
      if (cfg.j_max && *cfg.j_max < h.magnitude())
        fail(ErrorCategory::config,
             "declared bound j_max is below the configured coupling magnitude");
      break;
    }
    case ExperimentKind::relaxation: {
      read_mode(cm, cfg);
      cfg.t1 = cm.get_double("relaxation", "t1");
      cfg.t2 = cm.get_double("relaxation", "t2");
      cfg.a_inf = cm.get_double_or("relaxation", "a_inf", 0.0);
      cfg.t = cm.get_double("relaxation", "t");
      if (!(cfg.t > 0.0))
        fail(ErrorCategory::config, "evolution time t must be positive");
      RelaxationParams::make(cfg.t1, cfg.t2, cfg.a_inf);  // physicality checks
      break;
    }
    case ExperimentKind::exchange_iso:
    case ExperimentKind::exchange_aniso: {
      read_mode(cm, cfg);
      read_hamiltonian(cm, cfg);
      const ExchangeHamiltonian h{cfg.jx, cfg.jy, cfg.jz};
      const ExchangeClass cls = h.classify();
      if (cfg.kind == ExperimentKind::exchange_iso &&
          cls != ExchangeClass::isotropic)
        fail(ErrorCategory::config,
             "exchange-iso requires jx = jy = jz; use exchange-aniso for "
             "an axially symmetric coupling");
      if (cfg.kind == ExperimentKind::exchange_aniso &&
          cls == ExchangeClass::xyz)
        fail(ErrorCategory::config,
             "exchange-aniso requires jx = jy (axially symmetric coupling)");
      const double mag =
          std::max({std::abs(cfg.jx), std::abs(cfg.jy), std::abs(cfg.jz)});
      if (!(mag > 0.0))
        fail(ErrorCategory::config, "the coupling vector must not vanish");
      if (cfg.j_max && *cfg.j_max < mag)
        fail(ErrorCategory::config,
             "declared bound j_max is below the configured coupling magnitude");
      break;
    }
    case ExperimentKind::scaling: {
      if (cm.has("experiment", "mode") &&
          cm.get_string("experiment", "mode") != "sampled")
        fail(ErrorCategory::config,
             "the scaling study is always sampled; drop the mode key or set "
             "it to 'sampled'");
      cfg.sampled = true;
      ScalingStudyConfig& sc = cfg.scaling;
      sc.seed = cfg.seed;
      sc.j_max = cm.get_double_or("schedule", "j_max", sc.j_max);
      sc.oversample = cm.get_double_or("schedule", "oversample", sc.oversample);
      const auto ns = cm.get_int_list("scaling", "n_samples_grid");
      for (std::int64_t v : ns) {
        if (v < 4)
          fail(ErrorCategory::config, "n_samples_grid entries must be >= 4");
        sc.n_samples_grid.push_back(static_cast<int>(v));
      }
      sc.n_shots_grid = cm.get_int_list("scaling", "n_shots_grid");
      for (std::int64_t v : sc.n_shots_grid)
        if (v < 1)
          fail(ErrorCategory::config, "n_shots_grid entries must be positive");
      const std::int64_t reps = cm.get_int_or("scaling", "repeats", 50);
      if (reps < 1 || reps > 100000)
        fail(ErrorCategory::config, "repeats must lie in [1, 100000]");
      sc.repeats = static_cast<int>(reps);
      if (cm.has("hamiltonian", "jx") || cm.has("hamiltonian", "jy") ||
          cm.has("hamiltonian", "jz")) {
        sc.h = SingleQubitHamiltonian{cm.get_double("hamiltonian", "jx"),
                                      cm.get_double("hamiltonian", "jy"),
                                      cm.get_double("hamiltonian", "jz")};
        if (!(sc.h.magnitude() > 0.0))
          fail(ErrorCategory::config, "the coupling vector must not vanish");
      }
      if (!(sc.j_max > 0.0))
        fail(ErrorCategory::config, "declared bound j_max must be positive");
      if (sc.h.magnitude() > sc.j_max)
        fail(ErrorCategory::config,
             "declared bound j_max is below the configured coupling magnitude");
      if (!(sc.oversample >= 2.0))
        fail(ErrorCategory::config, "oversample must be at least 2");
      break;
    }
  }

  cm.reject_unconsumed();
  cfg.config_hash = cm.hash();
  cfg.canonical = cm.canonical_text();
  return cfg;
}

}  // namespace dcqd
