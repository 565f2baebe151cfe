#include "skillroute/json_io.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "skillroute/error.hpp"

namespace skillroute {

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::validation, fmt::format("cannot open {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::validation, fmt::format("{}: invalid JSON: {}", path.string(), e.what()));
  }
}

std::string canonical_dump(const Json& doc) { return doc.dump(2) + "\n"; }

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::config, fmt::format("cannot write {}", path.string()));
  out << text;
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
  write_text_file(path, canonical_dump(doc));
}

const Json& unwrap_array(const Json& doc, std::string_view key, std::string_view what) {
  if (doc.is_array()) return doc;
  if (doc.is_object()) {
    auto it = doc.find(std::string(key));
    if (it != doc.end() && it->is_array()) return *it;
  }
  throw Error(ErrorKind::validation,
              fmt::format("{}: expected an array or an object with an array field '{}'", what, key));
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::integrity, "SHA-256 computation failed");
  }
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

}  // namespace skillroute
