#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>

#include "cityometrics/errors.hpp"

namespace cityom {

// FNV-1a 64-bit. Used for corpus/config/input content hashes stamped into
// report headers; not cryptographic, stable across platforms.
struct Fnv1a64 {
  uint64_t state = 0xcbf29ce484222325ull;

  void update(std::string_view bytes) {
    uint64_t h = state;
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    state = h;
  }

  void update_u64(uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    update(std::string_view(buf, 8));
  }

  std::string hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    uint64_t h = state;
    for (int i = 15; i >= 0; --i) {
      out[i] = digits[h & 0xF];
      h >>= 4;
    }
    return out;
  }
};

inline std::string hash_bytes(std::string_view bytes) {
  Fnv1a64 h;
  h.update(bytes);
  return h.hex();
}

inline std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file for hashing: " + path);
  Fnv1a64 h;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
    h.update(std::string_view(buf, static_cast<size_t>(in.gcount())));
  return h.hex();
}

}  // namespace cityom
