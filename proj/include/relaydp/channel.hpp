#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relaydp/rng.hpp"

namespace relaydp {

enum class FadingKind { TruncatedExponential, Rayleigh, Rician, NoncentralChiSquared };

const char* to_string(FadingKind k);
FadingKind fading_kind_from_string(const std::string& name);

// Per-link SNR distribution.  All kinds are normalized so that the
// sample mean equals mean_snr; for the truncated exponential the
// conventional name "average SNR" is kept for mean_snr even though the
// true expectation is trunc + mean_snr.
struct DistributionSpec {
    FadingKind kind = FadingKind::TruncatedExponential;
    double mean_snr = 1.0;      // linear scale, > 0
    double trunc = 0.0;         // SNR truncation threshold, >= 0 (TruncatedExponential)
    int dof = 2;                // v = 2s, positive even (chi-squared kinds)
    double noncentrality = 0.0; // lambda >= 0 (Rician / chi-squared)

    void validate() const; // throws ConfigError on bad parameters

    static DistributionSpec truncated_exponential(double mean, double trunc);
    static DistributionSpec rayleigh(double mean);
    static DistributionSpec rician(double mean, double lambda);
    static DistributionSpec chi_squared(double mean, int dof, double lambda = 0.0);
};

// Draw one SNR.  Truncated exponential by CDF inversion; chi-squared
// family constructively from complex Gaussians carrying the
// noncentrality, rescaled to mean_snr.  No Marcum-Q evaluation anywhere.
double sample(const DistributionSpec& dist, RngStream& rng);

// The per-slot SNR triple (gamma_sr, gamma_sd, gamma_rd).
// sr == 0 encodes "no relay present".
struct LinkSnrTriple {
    double sr = 0.0;
    double sd = 0.0;
    double rd = 0.0;

    // gamma_tilde: SNR of the stronger node towards the destination.
    double strongest_to_dest() const { return std::max(sd, rd); }
};

// The three links of the fading environment.  A disengaged sr
// distribution means the source-relay SNR is identically zero, which
// degenerates every recursion to the no-relay case.
struct ChannelModel {
    std::optional<DistributionSpec> sr;
    DistributionSpec sd;
    DistributionSpec rd;

    bool relay_present() const { return sr.has_value(); }
    void validate() const;
    LinkSnrTriple sample_triple(RngStream& rng) const;
};

// Per-slot Monte Carlo SNR realizations used by the solver.  Draws are
// mutually independent across links and slots (Markov order 0); the
// order field is an interface hook only.
struct ScenarioSet {
    int slots = 0;
    int markov_order = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<LinkSnrTriple>> draws; // [slot-1][i]
};

ScenarioSet make_scenarios(const ChannelModel& channel, int slots, int n_per_slot,
                           std::uint64_t seed);

// Interface hook for order-m conditional samplers (not consumed by the
// solver, which requires order 0).
using ConditionalSnrSampler = LinkSnrTriple (*)(RngStream&, const std::vector<LinkSnrTriple>& history);

// Result of a phi diagnostic.  Unboundedness is an explicit state, not
// a floating-point infinity.
struct PhiEstimate {
    bool bounded = true;
    double value = 0.0;     // meaningful only when bounded
    double std_error = 0.0; // 0 for closed forms
    bool closed_form = true;
    bool mc_fallback = false; // closed form requested but unavailable

    double value_or(double if_unbounded) const { return bounded ? value : if_unbounded; }
};

// phi1 = E[1/gamma] for one link.  Closed form for the truncated
// exponential (c E1(trunc/mean)) and the central chi-squared
// (1/(2(s-1)) at raw mean v, rescaled); Monte Carlo otherwise.
PhiEstimate phi1(const DistributionSpec& dist, long mc_draws = 1000000,
                 std::uint64_t mc_seed = 0x7068a1ULL);

// phi2 = E[1/max(gamma_sd, gamma_rd)].  Closed form when both links are
// truncated exponential with a common threshold (three-E1-term formula
// over the harmonic mean); Monte Carlo with reported standard error
// otherwise.  Mismatched thresholds fall back to Monte Carlo.
PhiEstimate phi2(const DistributionSpec& dist_sd, const DistributionSpec& dist_rd,
                 long mc_draws = 1000000, std::uint64_t mc_seed = 0x7068a2ULL);

// Limit of phi2 as the truncation threshold vanishes:
//   (1/x) log(1 + x/y) + (1/y) log(1 + y/x).
double phi2_asymptote(double mean_sd, double mean_rd);

// xi_1(x, eps) = exp(eps/x) E1(eps/x) / x; phi1 of a truncated
// exponential with average SNR x and threshold eps.
double xi1(double mean, double trunc);

enum class Verdict { Bounded, Unbounded, Inconclusive };
const char* to_string(Verdict v);

// Bounded-energy diagnosis.  Without relaying the verdict is exact
// (bounded iff phi1 bounded); with relaying, finite phi2 is sufficient
// only, so the alternative is "inconclusive" rather than "unbounded".
struct BoundednessReport {
    PhiEstimate phi1_sd;
    PhiEstimate phi2_sd_rd;
    Verdict no_relay = Verdict::Inconclusive;
    Verdict relay = Verdict::Inconclusive;
};

BoundednessReport boundedness_report(const DistributionSpec& sr, const DistributionSpec& sd,
                                     const DistributionSpec& rd);

} // namespace relaydp
