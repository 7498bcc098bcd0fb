#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dcqd/error.hpp"
#include "dcqd/spectral.hpp"

namespace dcqd {

// Flat key-value configuration text with one level of [section] headers.
// Lines are `key = value`; `#` and `;` start comments; blank lines ignored.
// Parse and lookup failures carry the origin (file name) and line number so
// a bad field is reported exactly where it sits.
class ConfigMap {
 public:
  static ConfigMap parse(const std::string& text, const std::string& origin);
  static ConfigMap load(const std::string& path);

  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;

  // Getters mark the key consumed; reject_unconsumed() then flags typos and
  // keys that do not belong to the configured experiment.
  std::string get_string(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key,
                       double fallback) const;
  std::int64_t get_int(const std::string& section, const std::string& key) const;
  std::int64_t get_int_or(const std::string& section, const std::string& key,
                          std::int64_t fallback) const;
  std::uint64_t get_seed_or(const std::string& section, const std::string& key,
                            std::uint64_t fallback) const;
  std::vector<std::int64_t> get_int_list(const std::string& section,
                                         const std::string& key) const;

  void reject_unconsumed() const;

  // Deterministic re-serialization (sections and keys sorted) and an FNV-1a
  // hash of it; together they make every output row traceable to its config.
  std::string canonical_text() const;
  std::uint64_t hash() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool consumed = false;
  };
  const Entry& entry(const std::string& section, const std::string& key) const;
  [[noreturn]] void fail_at(int line, const std::string& what) const;

  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::string origin_ = "<config>";
};

enum class ExperimentKind {
  single_qubit,
  relaxation,
  exchange_iso,
  exchange_aniso,
  scaling,
};

const char* experiment_kind_name(ExperimentKind k);

// Fully validated run description. Parsing enforces every module-level
// precondition it can see (positive times, physical relaxation constants,
// coupling class consistent with the experiment kind, declared bound not
// below the configured coupling) so `validate` needs no simulation.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::single_qubit;
  bool sampled = false;
  std::int64_t n_shots = 0;  // shots per record when sampled
  std::uint64_t seed = 1;

  // single-qubit and both exchange kinds
  double jx = 0.0, jy = 0.0, jz = 0.0;
  double t = 0.0;
  std::optional<double> j_max;  // declared coupling bound for alias resolution

  // relaxation
  double t1 = 0.0, t2 = 0.0, a_inf = 0.0;

  // scaling
  ScalingStudyConfig scaling;

  std::uint64_t config_hash = 0;
  std::string canonical;

  static ExperimentConfig from(const ConfigMap& cm,
                               std::optional<std::uint64_t> seed_override);
};

}  // namespace dcqd
