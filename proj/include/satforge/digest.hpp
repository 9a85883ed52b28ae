#pragma once

#include <string>
#include <string_view>

namespace satforge {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
/// SHA-256 of a file's contents. Throws DataError if unreadable.
std::string sha256_file(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace satforge
