#pragma once

#include <string>

namespace mfgnet {

/// 12 significant digits, the fixed precision of every exported number.
std::string format_number(double x);

/// x rounded to 12 significant digits, for JSON emission.
double round_sig12(double x);

/// Writes `content` to `path`, creating parent directories. Throws
/// Error(io) on failure.
void write_text_file(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace mfgnet
