// Independent oracles used by the tests: adaptive quadrature for the
// exponential integral, brute-force minimizers, and simple statistics.
// Nothing here shares code with the implementation paths it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// Adaptive Simpson on [a, b].
inline double adaptive_simpson_(const std::function<double(double)>& f, double a, double b,
                                double fa, double fm, double fb, double whole, double tol,
                                int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_(f, a, b, fa, fm, fb, whole, tol, 48);
}

// E1(x) for x >= 1 from the defining integral, t = x + s:
// exp(-x) * int_0^75 exp(-s)/(x+s) ds (the tail beyond 75 is below
// 1e-31 of the value).
inline double quad_e1_large(double x) {
    const auto f = [x](double s) { return std::exp(-s) / (x + s); };
    return std::exp(-x) * integrate(f, 0.0, 75.0, 1e-15);
}

// E1(x) for 0 < x < 1: int_x^1 exp(-t)/t dt via t = exp(s), which makes
// the integrand exp(-exp(s)) smooth and bounded, plus E1(1).
inline double quad_e1(double x) {
    if (x >= 1.0) return quad_e1_large(x);
    const auto g = [](double s) { return std::exp(-std::exp(s)); };
    return integrate(g, std::log(x), 0.0, 1e-14) + quad_e1_large(1.0);
}

// One-sample Kolmogorov-Smirnov statistic against a CDF.
inline double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double c = cdf(samples[i]);
        d = std::max(d, std::fabs(c - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - c));
    }
    return d;
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        const double fa = static_cast<double>(i) / static_cast<double>(a.size());
        const double fb = static_cast<double>(j) / static_cast<double>(b.size());
        d = std::max(d, std::fabs(fa - fb));
    }
    return d;
}

// Dense scan of a 1-D function on [lo, hi].
inline std::pair<double, double> scan_min(const std::function<double(double)>& f, double lo,
                                          double hi, int n) {
    double bx = lo, bv = f(lo);
    for (int i = 1; i <= n; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / n;
        const double v = f(x);
        if (v < bv) {
            bv = v;
            bx = x;
        }
    }
    return {bx, bv};
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

inline MeanStderr mean_stderr(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    const double m = s / static_cast<double>(v.size());
    double q = 0.0;
    for (double x : v) q += (x - m) * (x - m);
    MeanStderr out;
    out.mean = m;
    out.stderr_ = std::sqrt(q / static_cast<double>(v.size()) / static_cast<double>(v.size()));
    return out;
}

} // namespace oracle
