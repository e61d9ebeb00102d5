#pragma once

// Shared constants for the sine kernels. Both the scalar and the vector
// paths evaluate exactly this sequence:
//
//   c = (n * f) / rate                       cycles
//   r = c - nearbyint(c)                     r in [-0.5, 0.5]
//   r = r >  0.25 ?  0.5 - r : r             fold to [-0.25, 0.25]
//   r = r < -0.25 ? -0.5 - r : r
//   t = r * 2pi,  z = t * t
//   sin = t * (c1 + z * (c3 + z * (... + z * c21)))
//
// The Taylor series truncated after t^21 is accurate to ~1e-18 on
// |t| <= pi/2, well below double rounding.

namespace hapticaffect::kernels::detail {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

inline constexpr double kSinCoeff[11] = {
    1.0,
    -1.0 / 6.0,
    1.0 / 120.0,
    -1.0 / 5040.0,
    1.0 / 362880.0,
    -1.0 / 39916800.0,
    1.0 / 6227020800.0,
    -1.0 / 1307674368000.0,
    1.0 / 355687428096000.0,
    -1.0 / 121645100408832000.0,
    1.0 / 51090942171709440000.0,
};

inline constexpr double kInt16Min = -32768.0;
inline constexpr double kInt16Max = 32767.0;

}  // namespace hapticaffect::kernels::detail
