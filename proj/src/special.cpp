#include "relaydp/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "relaydp/errors.hpp"

namespace relaydp {

namespace {

// Alternating series E1(x) = -gamma - log x + sum_{n>=1} (-1)^{n+1} x^n / (n n!).
// Terms decay factorially for x <= 1.
double e1_series(double x) {
    double sum = -euler_gamma - std::log(x);
    double p = 1.0; // (-x)^n / n!
    for (int n = 1; n <= 64; ++n) {
        p *= -x / n;
        const double term = -p / n;
        sum += term;
        if (std::fabs(term) < 1e-18 * std::fabs(sum)) return sum;
    }
    return sum;
}

// Modified Lentz evaluation of the continued fraction
//   E1(x) = exp(-x) / (x + 1 - 1/(x + 3 - 4/(x + 5 - 9/(...)))).
double e1_continued_fraction(double x) {
    const double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 400; ++i) {
        const double a = -static_cast<double>(i) * static_cast<double>(i);
        b += 2.0;
        d = a * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= 1e-15) return h * std::exp(-x);
    }
    throw NumericalError("exp_integral_e1: continued fraction failed to converge");
}

} // namespace

double exp_integral_e1(double x) {
    if (!(x > 0.0)) throw std::domain_error("exp_integral_e1: requires x > 0");
    if (x > 740.0) return 0.0; // exp(-x) underflows; true value < 1e-322
    return x <= 1.0 ? e1_series(x) : e1_continued_fraction(x);
}

} // namespace relaydp
