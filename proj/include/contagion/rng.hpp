#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace contagion {

// Counter-based random streams in the splitmix64 family.  A stream is
// identified by a 64-bit key; the i-th output is a pure function of
// (key, i), so any position can be read without generating its
// predecessors and streams can be handed to concurrent replicas without
// shared state.

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Key derivation: fold labels (integers or short strings) into a parent
// key. Distinct label paths give independent streams for all practical
// purposes; the documented fingerprint test pins the exact scheme.
inline std::uint64_t derive_key(std::uint64_t parent, std::uint64_t label) {
  return mix64(parent ^ (mix64(label + kGolden) + kGolden));
}

inline std::uint64_t derive_key(std::uint64_t parent, std::string_view label) {
  // FNV-1a over the bytes, then the integer rule; the length is folded in
  // so that ("ab","c") and ("a","bc") cannot collide through equal hashes.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  h ^= static_cast<std::uint64_t>(label.size()) << 56;
  return derive_key(parent, h);
}

template <typename... Rest>
std::uint64_t derive_key(std::uint64_t parent, std::uint64_t label, Rest... rest) {
  return derive_key(derive_key(parent, label), rest...);
}

template <typename... Rest>
std::uint64_t derive_key(std::uint64_t parent, std::string_view label, Rest... rest) {
  return derive_key(derive_key(parent, label), rest...);
}

// i-th raw draw of stream `key`.
inline std::uint64_t stream_u64(std::uint64_t key, std::uint64_t i) {
  return mix64(key + (i + 1) * kGolden);
}

// Uniform on (0,1); never returns 0 so that log() below is safe.
inline double stream_unit(std::uint64_t key, std::uint64_t i) {
  return (static_cast<double>(stream_u64(key, i) >> 11) + 0.5) * 0x1.0p-53;
}

// Sequential view over one stream; cheap to copy.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return stream_u64(key_, pos_++); }
  double next_unit() { return stream_unit(key_, pos_++); }
  double next_exp(double rate) { return -std::log(next_unit()) / rate; }

  std::uint64_t pos() const { return pos_; }

 private:
  std::uint64_t key_;
  std::uint64_t pos_ = 0;
};

}  // namespace contagion
