#include "svcmimo/rng.hpp"

#include <cmath>
#include <numbers>

namespace svcmimo {

double normal_01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  const auto [u1, u2] = uniform2_u01(seed, stream, index);
  // 1 - u1 is in (0, 1], so the log stays finite.
  return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace svcmimo
