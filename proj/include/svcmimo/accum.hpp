#pragma once

#include <cmath>

namespace svcmimo {

// Neumaier-compensated accumulator. All aggregations run in a fixed index
// order with compensation so results are reproducible bit-for-bit across
// runs and thread counts.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      carry += (sum - t) + v;
    else
      carry += (v - t) + sum;
    sum = t;
  }

  double value() const { return sum + carry; }
};

}  // namespace svcmimo
