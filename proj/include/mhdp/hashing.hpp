#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace mhdp {

/// Streaming 64-bit FNV-1a, used for in-memory identities (grids, bases).
class Fnv64 {
 public:
  Fnv64& bytes(const void* data, std::size_t n);
  Fnv64& f64(double v) { return bytes(&v, sizeof v); }
  Fnv64& i64(std::int64_t v) { return bytes(&v, sizeof v); }
  Fnv64& str(std::string_view s) { return bytes(s.data(), s.size()); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view data);
/// Lowercase hex SHA-256 of a file's contents.
std::string sha256_file(const std::string& path);

std::string hex64(std::uint64_t v);

}  // namespace mhdp
