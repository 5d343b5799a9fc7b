#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace sphtrunc {

/// Shortest round-trip decimal form of x.
std::string format_double(double x);

/// Parses a full string as a double; throws std::invalid_argument otherwise.
double parse_double(std::string_view text);

/// Splits one CSV line on commas (no quoting).
std::vector<std::string> split_csv_line(std::string_view line);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Indices are handed out
/// dynamically; the first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace sphtrunc
