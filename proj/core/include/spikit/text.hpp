#pragma once

// Small string helpers shared by the line-based file formats.

#include <string>
#include <string_view>
#include <vector>

namespace spikit::text {

std::string_view trim(std::string_view s);
// Splits on any of the separator characters, trimming pieces and dropping empty ones.
std::vector<std::string> split(std::string_view s, std::string_view seps);
// Splits text into lines with '#' comments removed; blank lines are kept as "".
std::vector<std::string> lines(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);
// "key: value" -> (key, value); key empty when there is no colon.
std::pair<std::string, std::string> key_value(std::string_view line);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string read_file(const std::string& path);

} // namespace spikit::text
