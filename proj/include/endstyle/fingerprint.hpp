#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace endstyle {

// FNV-1a, used for dataset and model fingerprints embedded in reports.
// Not cryptographic; only needs to be stable across platforms.
inline std::uint64_t fnv1a64(std::string_view data,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
  std::uint64_t h = seed;
  for (const char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string to_hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

inline std::string fingerprint_hex(std::string_view data) {
  return to_hex64(fnv1a64(data));
}

}  // namespace endstyle
