#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "dcqd/config.hpp"

namespace dcqd {

// Process exit code reported for a failure category.
int exit_code_for(ErrorCategory c);

// Executes one subcommand end to end: loads and validates the config, runs
// the configured experiment, and writes the result CSVs plus a canonical
// config echo under out_dir. On failure an errors.csv is written, the
// message is mirrored to `err`, and the category's exit code is returned.
// `validate` stops after the checks and writes nothing.
int run_subcommand(const std::string& subcommand, const std::string& config_path,
                   std::optional<std::uint64_t> seed_override,
                   const std::string& out_dir, std::ostream& out,
                   std::ostream& err);

}  // namespace dcqd
