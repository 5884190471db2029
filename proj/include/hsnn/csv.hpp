#pragma once

#include <string>
#include <vector>

namespace hsnn {

/// Shortest round-trippable decimal rendering ("%.17g").
std::string g17(double x);

/// Write-temp-then-rename so readers never observe a partial file.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

/// Minimal CSV reading for our own outputs: comma-separated, no quoting,
/// blank lines skipped. Returns rows of fields.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

/// Strict double parse; diagnostics carry the 1-based line number.
double parse_double(const std::string& field, int line_no);

}  // namespace hsnn
