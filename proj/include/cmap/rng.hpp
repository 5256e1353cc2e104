#ifndef CMAP_RNG_HPP
#define CMAP_RNG_HPP

#include <cstdint>
#include <random>
#include <string>

namespace cmap {

// uniform in [0,1) from one 64-bit draw, identical across standard libraries
inline double unit_double(std::uint64_t bits) { return double(bits >> 11) * 0x1.0p-53; }

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * unit_double(rng());
}

inline long long uniform_int(std::mt19937_64& rng, long long lo, long long hi) {
  return lo + (long long)(rng() % (std::uint64_t)(hi - lo + 1));
}

// FNV-1a, for deriving stable seeds from names
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace cmap

#endif  // CMAP_RNG_HPP
