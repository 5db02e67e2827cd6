#pragma once

#include <filesystem>
#include <functional>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace crowdrank {

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer);

/// Opens for reading or throws Error naming the path.
std::ifstream open_input(const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

/// Strict full-string parse; throws InvalidArgument on trailing junk.
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

std::vector<std::string_view> split(std::string_view text, char sep);
std::vector<std::string_view> split_whitespace(std::string_view text);
std::string_view trim(std::string_view text);

}  // namespace crowdrank
