#pragma once

#include <stdexcept>
#include <string>

namespace dcqd {

// Failure categories surfaced by the CLI as exit codes and errors.csv rows.
enum class ErrorCategory {
  config,           // bad parameters, malformed config, broken preconditions
  degenerate_time,  // evolution time leaves the statistic uninformative
  model_violation,  // data inconsistent with the assumed dynamical class
  conditioning,     // linear solve or denominator too ill-conditioned to trust
  no_signal,        // spectral content indistinguishable from a flat series
  structural,       // matrix fails a structural invariant (hermiticity, trace, PSD)
  internal,         // should-not-happen
};

const char* error_category_name(ErrorCategory c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory c, const std::string& msg) {
  throw Error(c, msg);
}

}  // namespace dcqd
