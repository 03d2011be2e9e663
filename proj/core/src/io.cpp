#include "mfgnet/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/core.h>
#include <openssl/evp.h>

#include "mfgnet/error.hpp"

namespace mfgnet {

std::string format_number(double x) {
  if (x == 0.0) return "0";  // avoid "-0"
  return fmt::format("{:.12g}", x);
}

double round_sig12(double x) {
  return std::strtod(format_number(x).c_str(), nullptr);
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) {
      throw Error(ErrorCode::io, fmt::format("cannot create {}: {}",
                                             p.parent_path().string(),
                                             ec.message()));
    }
  }
  std::ofstream out(p, std::ios::binary);
  if (!out || !(out << content)) {
    throw Error(ErrorCode::io, fmt::format("cannot write {}", path));
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, fmt::format("cannot open {}", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error(ErrorCode::io, "sha256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

}  // namespace mfgnet
