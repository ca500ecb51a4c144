#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vocablab::io {

namespace fs = std::filesystem;

// Reads an LF-separated UTF-8 file. A missing final LF is tolerated; CR is
// kept as content.
std::vector<std::string> read_lines(const fs::path& path);
std::vector<std::string> split_lines(std::string_view text);

std::string read_file(const fs::path& path);

// Writes each line followed by LF. Refuses to replace an existing file
// unless `overwrite` is set.
void write_lines(const fs::path& path, const std::vector<std::string>& lines, bool overwrite);
void write_file(const fs::path& path, std::string_view content, bool overwrite);

void ensure_writable(const fs::path& path, bool overwrite);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const fs::path& path);

// Backslash escaping for tab-separated fields: \\ \t \n \r.
std::string escape_field(std::string_view s);
std::string unescape_field(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);

}  // namespace vocablab::io
