#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace gff {

/// 64-bit FNV-1a, used to turn purpose tags into stream key words.
std::uint64_t tag_hash(std::string_view tag);

/// Standard normal quantile (Wichura AS241, relative accuracy ~1e-16).
double normal_quantile(double p);

/// Standard normal cdf.
double normal_cdf(double x);

/// Random stream keyed by a tuple of 64-bit words, e.g.
/// (master seed, tag_hash("dense"), replica). Equal keys give equal streams;
/// distinct keys give statistically independent streams.
class Stream {
public:
  explicit Stream(std::initializer_list<std::uint64_t> key);

  std::uint64_t bits() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal by inversion.
  double normal() { return normal_quantile(uniform()); }

  std::uint64_t below(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
  }

private:
  std::mt19937_64 engine_;
};

} // namespace gff
