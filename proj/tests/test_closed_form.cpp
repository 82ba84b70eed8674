#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "relaydp/channel.hpp"
#include "relaydp/closed_form.hpp"
#include "relaydp/info.hpp"

using namespace relaydp;

namespace {

// Brute-force scan of the piecewise objective
// g(R) = g1(R) for R < B', g2(R) for R >= B'.
double brute_force_k2(const K2Instance& inst, int n) {
    const double bd = inst.target;
    double bprime = bd;
    if (inst.snr1.sr > 0.0)
        bprime = std::min(bd, std::log1p(std::expm1(bd) * inst.snr1.sd / inst.snr1.sr));
    double best = 1e300;
    for (int i = 0; i <= n; ++i) {
        const double r = bd * i / n;
        const int branch = r < bprime ? 1 : 2;
        best = std::min(best, k2_branch_objective(inst, branch, r));
    }
    return best;
}

K2Instance random_instance(RngStream& rng) {
    K2Instance inst;
    inst.snr1.sd = 0.05 + 3.0 * rng.uniform01();
    inst.snr1.sr = 0.05 + 3.0 * rng.uniform01();
    inst.target = 0.1 + 2.5 * rng.uniform01();
    inst.phi1 = 1.0 + 20.0 * rng.uniform01();
    inst.phi2 = inst.phi1 * (0.05 + 0.9 * rng.uniform01());
    return inst;
}

} // namespace

TEST_CASE("clamp and positive part") {
    CHECK(clamp_to(5.0, 0.0, 1.0) == 1.0);
    CHECK(clamp_to(0.3, 0.0, 1.0) == 0.3);
    CHECK(clamp_to(-2.0, 0.0, 1.0) == 0.0);
    CHECK(pos_part(-2.0) == 0.0);
    CHECK(pos_part(0.7) == 0.7);
    CHECK_THROWS_AS(clamp_to(0.5, 1.0, 0.0), std::domain_error);
}

TEST_CASE("k2_value input validation") {
    K2Instance inst;
    inst.snr1 = {1.0, 0.0, 0.0};
    inst.target = 1.0;
    inst.phi1 = inst.phi2 = 1.0;
    CHECK_THROWS_AS(k2_value(inst), std::domain_error); // sd = 0
    inst.snr1.sd = 1.0;
    inst.phi2 = 0.0;
    CHECK_THROWS_AS(k2_value(inst), std::domain_error); // nonpositive phi
}

TEST_CASE("k2_value: zero target costs nothing") {
    K2Instance inst;
    inst.snr1 = {1.0, 1.0, 0.0};
    inst.target = 0.0;
    inst.phi1 = 2.0;
    inst.phi2 = 1.0;
    const auto sol = k2_value(inst);
    CHECK(sol.value == 0.0);
    CHECK(sol.rate == 0.0);
}

TEST_CASE("k2_value: the worked instance matches a dense scan") {
    K2Instance inst;
    inst.snr1 = {4.0, 1.0, 0.0};
    inst.target = 2.0;
    inst.phi1 = 6.34;
    inst.phi2 = 1.39;
    const auto sol = k2_value(inst);
    const double ref = brute_force_k2(inst, 200000);
    CHECK(sol.value == doctest::Approx(ref).epsilon(1e-6));
}

TEST_CASE("k2_value: no source-relay link degenerates to the no-relay form") {
    K2Instance inst;
    inst.snr1 = {0.0, 0.8, 0.0};
    inst.target = 1.4;
    inst.phi1 = 5.0;
    inst.phi2 = 1.2;
    const auto sol = k2_value(inst);
    // Same instance where both continuations carry phi1 (the relay can
    // never decode, so phi2 only enters at R = Bd where it vanishes).
    K2Instance norelay = inst;
    norelay.phi2 = inst.phi1;
    CHECK(sol.value == doctest::Approx(brute_force_k2(norelay, 200000)).epsilon(1e-6));
}

TEST_CASE("k2_value agrees with brute force across random instances") {
    RngStream rng = RngStream::seeded(50);
    for (int t = 0; t < 100; ++t) {
        K2Instance inst = random_instance(rng);
        if (t % 7 == 0) inst.snr1.sr = 0.0;
        const auto sol = k2_value(inst);
        const double ref = brute_force_k2(inst, 100000);
        CHECK(sol.value == doctest::Approx(ref).epsilon(2e-5));
        CHECK(sol.value <= ref + 1e-12);
    }
}

TEST_CASE("branch objectives are convex and dominated at the split") {
    RngStream rng = RngStream::seeded(51);
    for (int t = 0; t < 40; ++t) {
        const K2Instance inst = random_instance(rng);
        const double bd = inst.target;
        for (int branch : {1, 2}) {
            double prev2 = 0.0;
            for (int i = 0; i <= 1000; ++i) {
                const double r = bd * i / 1000.0;
                const double v = k2_branch_objective(inst, branch, r);
                if (i >= 2) {
                    const double second =
                        v - 2.0 * k2_branch_objective(inst, branch, bd * (i - 1) / 1000.0) + prev2;
                    CHECK(second >= -1e-9);
                }
                if (i >= 1) prev2 = k2_branch_objective(inst, branch, bd * (i - 1) / 1000.0);
            }
        }
        const double bprime =
            std::min(bd, std::log1p(std::expm1(bd) * inst.snr1.sd / inst.snr1.sr));
        CHECK(k2_branch_objective(inst, 2, bprime) <= k2_branch_objective(inst, 1, bprime) + 1e-12);
    }
}

TEST_CASE("interior stationary points satisfy the first-order condition") {
    RngStream rng = RngStream::seeded(52);
    for (int t = 0; t < 60; ++t) {
        const K2Instance inst = random_instance(rng);
        for (const double phi : {inst.phi1, inst.phi2}) {
            const double r0 = 0.5 * (std::log(inst.snr1.sd * phi) + inst.target);
            if (r0 <= 0.0 || r0 >= inst.target) continue;
            const double lhs = std::exp(r0) / inst.snr1.sd;
            const double rhs = phi * std::exp(inst.target - r0);
            CHECK(std::fabs(lhs - rhs) <= 1e-9 * std::max(lhs, rhs));
        }
    }
}

TEST_CASE("k2_value is a global minimum against random probes") {
    RngStream rng = RngStream::seeded(53);
    for (int t = 0; t < 50; ++t) {
        const K2Instance inst = random_instance(rng);
        const double sol = k2_value(inst).value;
        const double bprime =
            std::min(inst.target, std::log1p(std::expm1(inst.target) * inst.snr1.sd / inst.snr1.sr));
        for (int probe = 0; probe < 40; ++probe) {
            const double r = inst.target * rng.uniform01();
            const int branch = r < bprime ? 1 : 2;
            CHECK(sol <= k2_branch_objective(inst, branch, r) + 1e-10);
        }
    }
}

TEST_CASE("k2_nmese: small targets cost almost nothing") {
    ChannelModel ch;
    ch.sr = DistributionSpec::truncated_exponential(1.0, 1e-3);
    ch.sd = DistributionSpec::truncated_exponential(1.0, 1e-3);
    ch.rd = DistributionSpec::truncated_exponential(1.0, 1e-3);
    const auto tiny = k2_nmese(ch, 1e-4, 20000, 7);
    CHECK(tiny.nmese < 1e-3);
}

TEST_CASE("k2_nmese sits below the one-slot cost") {
    ChannelModel ch;
    ch.sr = DistributionSpec::truncated_exponential(1.0, 1e-3);
    ch.sd = DistributionSpec::truncated_exponential(1.0, 1e-3);
    ch.rd = DistributionSpec::truncated_exponential(1.0, 1e-3);
    const auto est = k2_nmese(ch, 1.0, 50000, 8);
    const double k1 = phi1(ch.sd).value * mutual_info_inv(1.0); // 6.338 * 1.718
    CHECK(k1 == doctest::Approx(10.89).epsilon(0.001));
    CHECK(est.nmese < k1);
    CHECK(est.phi1 == doctest::Approx(6.33787).epsilon(1e-4));
}
