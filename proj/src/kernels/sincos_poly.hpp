#pragma once

// Coefficients shared by the scalar and AVX2 sin/cos evaluation. Taylor series
// on [-pi/2, pi/2]; the truncation error there is below 1e-18.

namespace hierent::kernels::detail {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// sin(x) = x * (1 + x^2 (s1 + x^2 (s2 + ...)))
inline constexpr double kSin[] = {
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
inline constexpr int kSinTerms = 10;

// cos(x) = 1 + x^2 (c1 + x^2 (c2 + ...))
inline constexpr double kCos[] = {
    -1.0 / 2.0,
    1.0 / 24.0,
    -1.0 / 720.0,
    1.0 / 40320.0,
    -1.0 / 3628800.0,
    1.0 / 479001600.0,
    -1.0 / 87178291200.0,
    1.0 / 20922789888000.0,
    -1.0 / 6402373705728000.0,
    1.0 / 2432902008176640000.0,
    -1.0 / 1124000727777607680000.0,
};
inline constexpr int kCosTerms = 11;

}  // namespace hierent::kernels::detail
