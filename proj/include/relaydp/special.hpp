#pragma once

namespace relaydp {

// Exponential integral E1(x) = int_x^inf exp(-t)/t dt, x > 0.
//
// Power series below x = 1, continued fraction above.  Relative error
// is below 1e-10 on [1e-12, 700].  Throws std::domain_error for x <= 0.
double exp_integral_e1(double x);

// Euler-Mascheroni constant.
inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

} // namespace relaydp
