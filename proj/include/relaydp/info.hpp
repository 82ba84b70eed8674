#pragma once

#include <cmath>

#include "relaydp/channel.hpp"

namespace relaydp {

// Mutual information of a point-to-point Gaussian channel at received
// SNR x, in nats: I(x) = log(1 + x).  Strictly increasing, concave.
double mutual_info(double x);

// Inverse: I^-1(r) = exp(r) - 1.
double mutual_info_inv(double r);

namespace detail {
// Unchecked fast paths for hot loops.
inline double mi(double x) { return std::log1p(x); }
inline double mi_inv(double r) { return std::expm1(r); }
} // namespace detail

enum class Phase { Phase1, Phase2, Terminated };
const char* to_string(Phase p);

// Mutual information still needed by relay (B^R) and destination (B^D),
// in nats.  Values may go negative (overshoot) rather than clamping, so
// diagnostics can see wasted energy.
struct ResidualInfo {
    double relay_needed = 0.0;
    double dest_needed = 0.0;
};

// The phase is fully determined by the residuals: terminated once the
// destination needs nothing, else phase 2 once the relay has decoded.
inline Phase phase_of(const ResidualInfo& b) {
    if (b.dest_needed <= 0.0) return Phase::Terminated;
    return b.relay_needed <= 0.0 ? Phase::Phase2 : Phase::Phase1;
}

// Causal-CSI state for one slot: (k, phase, current SNRs, residuals).
struct SystemState {
    int slot = 1;
    Phase phase = Phase::Phase1;
    LinkSnrTriple snr;
    ResidualInfo residual;
};

// Slot-1 state with total_info nats still needed by both receivers.
SystemState make_initial_state(double total_info, const LinkSnrTriple& snr1);

// One-slot state transition under transmit power `power`.
//  phase 1: relay gains I(p*gamma_sr), destination gains I(p*gamma_sd);
//  phase 2: destination gains I(p*gamma_tilde), relay unchanged
// (the stronger-node reduction is already applied).  The slot
// increments and the phase is recomputed from the new residuals.
// Transitioning from a terminated state is a logic error.
SystemState transition(const SystemState& state, double power, const LinkSnrTriple& next_snr);

struct Phase2Split {
    double power = 0.0;
    bool on_source = true;
};

// Collapse a joint phase-2 allocation (p_s, p_r) onto the stronger node
// while preserving the combined received SNR p_s*sd + p_r*rd.  Total
// power never increases; ties go to the source.
Phase2Split reduce_phase2_power(double p_source, double p_relay, const LinkSnrTriple& snr);

} // namespace relaydp
