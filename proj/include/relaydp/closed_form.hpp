#pragma once

#include <cstdint>
#include <optional>

#include "relaydp/channel.hpp"

namespace relaydp {

// [x]_a^b and [x]^+ of the two-slot analysis.
double clamp_to(double x, double lo, double hi); // throws std::domain_error if lo > hi
double pos_part(double x);

// One two-slot instance: slot-1 SNRs, total destination target
// B^d = 2 R_eff (nats), and the second-slot statistics
// phi1 = E[1/gamma_sd_2], phi2 = E[1/max(gamma_sd_2, gamma_rd_2)].
struct K2Instance {
    LinkSnrTriple snr1;
    double target = 0.0;
    double phi1 = 0.0;
    double phi2 = 0.0;
};

enum class K2Branch { Stay, Switch };

struct K2Solution {
    double value = 0.0; // minimum expected sum energy over both slots
    double rate = 0.0;  // minimizing slot-1 rate R*
    K2Branch branch = K2Branch::Switch;
};

// Exact two-slot solution: J = min{g1(R1*), g2(R2*)} with
// g_i(R) = I^-1(R)/gamma_sd_1 + phi_i I^-1(B^d - R),
// R_i = (log(gamma_sd_1 phi_i) + B^d)/2 clamped into the branch
// interval split at B' = min{R^th, B^d}.  gamma_sr_1 = 0 degenerates to
// the no-relay form (R^th treated as +inf).
K2Solution k2_value(const K2Instance& inst);

// The branch objectives themselves, for probing and convexity checks.
double k2_branch_objective(const K2Instance& inst, int branch_index, double rate);

struct NmeseEstimate {
    double nmese = 0.0;
    double std_error = 0.0;
    long trials = 0;
    double phi1 = 0.0;
    double phi2 = 0.0;
};

// Monte Carlo average of k2_value over slot-1 draws, halved (per-slot
// normalization).  phi1/phi2 default to the channel module's values;
// overrides admit conditional second-slot statistics for non-i.i.d.
// experiments.
NmeseEstimate k2_nmese(const ChannelModel& channel, double rate_per_slot, long n_trials,
                       std::uint64_t seed, std::optional<double> phi1_override = {},
                       std::optional<double> phi2_override = {});

} // namespace relaydp
