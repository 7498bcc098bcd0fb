#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dcqd {

// Floating point rendered with 9 significant digits; integers verbatim.
std::string csv_num(double v);
std::string csv_int(std::int64_t v);
std::string csv_uint(std::uint64_t v);

// One table written in a single pass: header row then data rows, RFC-style
// quoting only where a field needs it. Overwrites the target file.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace dcqd
