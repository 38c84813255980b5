#pragma once

#include <string>
#include <vector>

namespace cellmetrics {

/// Shortest round-trip decimal form of a double (to_chars).
std::string format_double(double v);

/// Quotes a CSV field only when it contains a comma, quote or newline.
std::string csv_escape(const std::string& field);

/// RFC-4180-ish parse of one CSV record per input line; handles quoted
/// fields with embedded commas and doubled quotes (no multi-line fields).
std::vector<std::string> parse_csv_line(const std::string& line);

}  // namespace cellmetrics
