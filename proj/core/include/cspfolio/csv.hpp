#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cspfolio {

// Minimal CSV: comma-separated, no quoting (ids and paths must not contain
// commas), one record per line, UNIX newlines.
std::vector<std::string> split_csv_line(std::string_view line);
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

} // namespace cspfolio
