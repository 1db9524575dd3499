#pragma once

#include <numbers>
#include <ratio>

namespace hsaw {

/// Exponents of the SAW / SLE(8/3) correspondence, kept as exact rationals.
struct SleConstants {
  using boundary_exponent = std::ratio<5, 8>;     // b
  using restriction_exponent = std::ratio<5, 8>;  // alpha
  using stability_exponent = std::ratio<4, 3>;    // sigma

  static constexpr double b = double(boundary_exponent::num) / boundary_exponent::den;
  static constexpr double alpha = double(restriction_exponent::num) / restriction_exponent::den;
  static constexpr double sigma = double(stability_exponent::num) / stability_exponent::den;
};

inline constexpr double kPi = std::numbers::pi;

}  // namespace hsaw
