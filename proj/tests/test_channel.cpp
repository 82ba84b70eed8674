#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "relaydp/channel.hpp"
#include "relaydp/errors.hpp"
#include "relaydp/special.hpp"

using namespace relaydp;

namespace {

std::vector<double> draw(const DistributionSpec& d, long n, std::uint64_t seed) {
    RngStream rng = RngStream::seeded(seed);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = sample(d, rng);
    return v;
}

} // namespace

TEST_CASE("DistributionSpec validation") {
    CHECK_THROWS_AS(DistributionSpec::truncated_exponential(0.0, 0.1), ConfigError);
    CHECK_THROWS_AS(DistributionSpec::truncated_exponential(1.0, -0.1), ConfigError);
    CHECK_THROWS_AS(DistributionSpec::chi_squared(1.0, 3), ConfigError);
    CHECK_THROWS_AS(DistributionSpec::chi_squared(1.0, 0), ConfigError);
    CHECK_THROWS_AS(DistributionSpec::rician(1.0, 0.0), ConfigError);
    CHECK_NOTHROW(DistributionSpec::chi_squared(2.0, 6, 1.5));
}

TEST_CASE("truncated exponential sampler: support and mean") {
    const auto d = DistributionSpec::truncated_exponential(1.0, 1e-3);
    const auto v = draw(d, 100000, 21);
    const double lo = *std::min_element(v.begin(), v.end());
    CHECK(lo >= d.trunc); // inversion returns the threshold at U = 1
    const auto ms = oracle::mean_stderr(v);
    // Analytic mean of the shifted exponential is trunc + mean.
    CHECK(ms.mean == doctest::Approx(1.001).epsilon(0.02));
}

TEST_CASE("truncated exponential sampler: KS against the inversion CDF") {
    const double mean = 0.7, trunc = 0.05;
    const auto d = DistributionSpec::truncated_exponential(mean, trunc);
    const auto v = draw(d, 100000, 22);
    const double ks = oracle::ks_statistic(v, [&](double g) {
        return g < trunc ? 0.0 : 1.0 - std::exp(-(g - trunc) / mean);
    });
    CHECK(ks < 1.62762 / std::sqrt(1e5)); // 1% critical value
}

TEST_CASE("central chi-squared with four degrees of freedom: E[1/snr]") {
    // Raw mean v = 4: E[1/snr] = 1/(2(s-1)) = 0.5; scaled to mean 1 it
    // becomes 2.0.
    {
        const auto d = DistributionSpec::chi_squared(4.0, 4);
        const auto v = draw(d, 1000000, 23);
        std::vector<double> inv(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) inv[i] = 1.0 / v[i];
        const auto ms = oracle::mean_stderr(inv);
        CHECK(std::fabs(ms.mean - 0.5) <= 3.0 * ms.stderr_ + 1e-3);
    }
    {
        const auto d = DistributionSpec::chi_squared(1.0, 4);
        const auto v = draw(d, 1000000, 24);
        std::vector<double> inv(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) inv[i] = 1.0 / v[i];
        const auto ms = oracle::mean_stderr(inv);
        CHECK(std::fabs(ms.mean - 2.0) <= 3.0 * ms.stderr_ + 4e-3);
    }
}

TEST_CASE("all kinds honor the mean normalization") {
    for (const auto& d :
         {DistributionSpec::rayleigh(1.7), DistributionSpec::rician(0.9, 2.5),
          DistributionSpec::chi_squared(2.4, 6, 1.0)}) {
        const auto v = draw(d, 200000, 25);
        const auto ms = oracle::mean_stderr(v);
        CHECK(std::fabs(ms.mean - d.mean_snr) <= 4.0 * ms.stderr_);
    }
}

TEST_CASE("Rayleigh and chi-squared(v=2, lambda=0) agree in distribution") {
    const auto a = draw(DistributionSpec::rayleigh(1.3), 20000, 26);
    const auto b = draw(DistributionSpec::chi_squared(1.3, 2, 0.0), 20000, 27);
    const double ks = oracle::ks_two_sample(a, b);
    CHECK(ks < 1.62762 * std::sqrt(2.0 / 20000.0));
}

TEST_CASE("phi1 closed forms and divergence flags") {
    const auto te = phi1(DistributionSpec::truncated_exponential(1.0, 1e-3));
    CHECK(te.bounded);
    CHECK(te.closed_form);
    // e^{0.001} E1(0.001); frozen from the E1 oracle.
    CHECK(te.value == doctest::Approx(6.3378742).epsilon(1e-6));
    CHECK(te.value == doctest::Approx(std::exp(1e-3) * oracle::quad_e1(1e-3)).epsilon(1e-10));

    CHECK_FALSE(phi1(DistributionSpec::rayleigh(1.0)).bounded);
    CHECK_FALSE(phi1(DistributionSpec::rician(1.0, 3.0)).bounded);
    CHECK_FALSE(phi1(DistributionSpec::truncated_exponential(1.0, 0.0)).bounded);
    CHECK_FALSE(phi1(DistributionSpec::chi_squared(1.0, 2, 0.0)).bounded);

    CHECK(phi1(DistributionSpec::chi_squared(4.0, 4)).value == doctest::Approx(0.5));
    CHECK(phi1(DistributionSpec::chi_squared(1.0, 4)).value == doctest::Approx(2.0));

    // Noncentral, v >= 4: bounded, Monte Carlo, below the central value.
    const auto nc = phi1(DistributionSpec::chi_squared(4.0, 4, 2.0), 200000);
    CHECK(nc.bounded);
    CHECK_FALSE(nc.closed_form);
    CHECK(nc.value < 0.5);
}

TEST_CASE("phi1 is strictly decreasing in the truncation threshold") {
    double prev = phi1(DistributionSpec::truncated_exponential(1.0, 1e-6)).value;
    for (double tr : {1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.5, 1.0}) {
        const double cur = phi1(DistributionSpec::truncated_exponential(1.0, tr)).value;
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("phi1 divergence rate follows -log(trunc)/mean") {
    for (double mean : {1.0, 2.0}) {
        const double a = phi1(DistributionSpec::truncated_exponential(mean, 1e-6)).value;
        const double b = phi1(DistributionSpec::truncated_exponential(mean, 1e-3)).value;
        CHECK(std::fabs((a - b) - std::log(1e3) / mean) <= 0.01 * std::log(1e3) / mean);
    }
}

TEST_CASE("phi2 closed form, asymptote and Monte Carlo agreement") {
    const auto sd = DistributionSpec::truncated_exponential(1.0, 1e-10);
    const auto rd = DistributionSpec::truncated_exponential(1.0, 1e-10);
    const auto p = phi2(sd, rd);
    CHECK(p.closed_form);
    CHECK(p.value == doctest::Approx(1.38630).epsilon(1e-3 / 1.3863));
    CHECK(p.value == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-3));

    // Closed form vs Monte Carlo at a desk scale (full 20-set version in
    // the acceptance suite).
    RngStream cfg = RngStream::seeded(31);
    for (int i = 0; i < 6; ++i) {
        const double msd = 0.3 + 2.0 * cfg.uniform01();
        const double mrd = 0.3 + 2.0 * cfg.uniform01();
        const double tr = std::pow(10.0, -1.0 - 4.0 * cfg.uniform01());
        const auto a = DistributionSpec::truncated_exponential(msd, tr);
        const auto b = DistributionSpec::truncated_exponential(mrd, tr);
        const auto closed = phi2(a, b);
        RngStream rng = RngStream::seeded(100 + static_cast<std::uint64_t>(i));
        std::vector<double> inv(200000);
        for (auto& x : inv) x = 1.0 / std::max(sample(a, rng), sample(b, rng));
        const auto ms = oracle::mean_stderr(inv);
        CHECK(std::fabs(closed.value - ms.mean) <= 3.0 * ms.stderr_);
    }
}

TEST_CASE("phi2 never exceeds phi1 of the same sd link") {
    for (double tr : {1e-4, 1e-2, 0.3}) {
        const auto sd = DistributionSpec::truncated_exponential(0.8, tr);
        const auto rd = DistributionSpec::truncated_exponential(1.9, tr);
        CHECK(phi2(sd, rd).value <= phi1(sd).value);
    }
}

TEST_CASE("phi2 falls back to Monte Carlo on mismatched thresholds") {
    const auto a = DistributionSpec::truncated_exponential(1.0, 1e-2);
    const auto b = DistributionSpec::truncated_exponential(1.0, 1e-3);
    const auto p = phi2(a, b, 200000);
    CHECK_FALSE(p.closed_form);
    CHECK(p.mc_fallback);
    CHECK(p.std_error > 0.0);
}

TEST_CASE("phi2_asymptote values and symmetry") {
    CHECK(phi2_asymptote(1.0, 1.0) == doctest::Approx(1.3862943611198906).epsilon(1e-12));
    // log(1.25) + 0.25 log(5), evaluated in high precision.
    CHECK(phi2_asymptote(1.0, 4.0) == doctest::Approx(0.6255030294227348).epsilon(1e-12));
    RngStream rng = RngStream::seeded(33);
    for (int i = 0; i < 20; ++i) {
        const double x = 0.1 + 3.0 * rng.uniform01();
        const double y = 0.1 + 3.0 * rng.uniform01();
        CHECK(phi2_asymptote(x, y) == doctest::Approx(phi2_asymptote(y, x)).epsilon(1e-14));
    }
}

TEST_CASE("phi2 approaches its asymptote monotonically for small thresholds") {
    double prev_gap = -1.0;
    const double asym = phi2_asymptote(1.0, 1.0);
    bool past_threshold = false;
    for (double tr : {1e-2, 1e-4, 1e-6, 1e-8, 1e-10}) {
        const auto p = phi2(DistributionSpec::truncated_exponential(1.0, tr),
                            DistributionSpec::truncated_exponential(1.0, tr));
        const double gap = std::fabs(p.value - asym);
        if (past_threshold) CHECK(gap < prev_gap);
        if (tr <= 1e-4) past_threshold = true;
        prev_gap = gap;
    }
}

TEST_CASE("boundedness verdicts match the fading-class results") {
    const auto ray = DistributionSpec::rayleigh(1.0);
    auto rep = boundedness_report(ray, ray, ray);
    CHECK(rep.no_relay == Verdict::Unbounded);
    CHECK(rep.relay == Verdict::Bounded);

    const auto ric = DistributionSpec::rician(1.0, 2.0);
    rep = boundedness_report(ric, ric, ric);
    CHECK(rep.no_relay == Verdict::Unbounded);
    CHECK(rep.relay == Verdict::Bounded);

    const auto chi = DistributionSpec::chi_squared(1.0, 4);
    rep = boundedness_report(chi, chi, chi);
    CHECK(rep.no_relay == Verdict::Bounded);
    CHECK(rep.relay == Verdict::Bounded);
}

TEST_CASE("scenario sets are deterministic and respect shape") {
    ChannelModel ch;
    ch.sr = DistributionSpec::truncated_exponential(1.0, 1e-3);
    ch.sd = DistributionSpec::truncated_exponential(1.0, 1e-3);
    ch.rd = DistributionSpec::truncated_exponential(1.0, 1e-3);
    const auto a = make_scenarios(ch, 3, 50, 77);
    const auto b = make_scenarios(ch, 3, 50, 77);
    REQUIRE(a.draws.size() == 3);
    REQUIRE(a.draws[0].size() == 50);
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 50; ++i) {
            CHECK(a.draws[k][i].sd == b.draws[k][i].sd);
            CHECK(a.draws[k][i].sr >= 1e-3);
        }
    ch.sr.reset();
    const auto c = make_scenarios(ch, 2, 10, 5);
    for (const auto& t : c.draws[0]) CHECK(t.sr == 0.0); // no relay present
    CHECK(c.draws[0][0].strongest_to_dest() == std::max(c.draws[0][0].sd, c.draws[0][0].rd));
}
