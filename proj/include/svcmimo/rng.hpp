#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace svcmimo {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
// Output depends only on (counter, key), so every packet / trial / grid point
// gets its own substream and results do not depend on evaluation order or
// thread count.
struct Philox4x32 {
  static constexpr std::uint32_t kMulA = 0xD2511F53u;
  static constexpr std::uint32_t kMulB = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeylA = 0x9E3779B9u;
  static constexpr std::uint32_t kWeylB = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t(kMulA) * ctr[0];
      const std::uint64_t p1 = std::uint64_t(kMulB) * ctr[2];
      ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
             std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
      key[0] += kWeylA;
      key[1] += kWeylB;
    }
    return ctr;
  }
};

namespace detail {
inline std::array<std::uint32_t, 4> philox_at(std::uint64_t seed, std::uint64_t stream,
                                              std::uint64_t index) {
  return Philox4x32::block(
      {std::uint32_t(index), std::uint32_t(index >> 32), std::uint32_t(stream),
       std::uint32_t(stream >> 32)},
      {std::uint32_t(seed), std::uint32_t(seed >> 32)});
}

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (std::uint64_t(hi) << 32) | lo;
  return double(bits >> 11) * 0x1.0p-53;  // 53-bit mantissa, in [0, 1)
}
}  // namespace detail

/// One uniform double in [0, 1) for the given (seed, stream, index).
inline double uniform_u01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  const auto out = detail::philox_at(seed, stream, index);
  return detail::to_unit(out[0], out[1]);
}

/// Two independent uniforms in [0, 1) from a single Philox block.
inline std::pair<double, double> uniform2_u01(std::uint64_t seed, std::uint64_t stream,
                                              std::uint64_t index) {
  const auto out = detail::philox_at(seed, stream, index);
  return {detail::to_unit(out[0], out[1]), detail::to_unit(out[2], out[3])};
}

/// Collapse (seed, a, b) into a derived 64-bit seed for a nested substream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  const auto out = Philox4x32::block(
      {std::uint32_t(a), std::uint32_t(a >> 32), std::uint32_t(b), std::uint32_t(b >> 32)},
      {std::uint32_t(seed), std::uint32_t(seed >> 32)});
  return (std::uint64_t(out[2]) << 32) | out[3];
}

/// Standard normal draw (Box-Muller over one Philox block).
double normal_01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

}  // namespace svcmimo
