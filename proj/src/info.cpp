#include "relaydp/info.hpp"

#include <cmath>
#include <stdexcept>

#include "relaydp/errors.hpp"

namespace relaydp {

double mutual_info(double x) {
    if (!(x >= 0.0)) throw std::domain_error("mutual_info: requires x >= 0");
    return std::log1p(x);
}

double mutual_info_inv(double r) {
    if (!(r >= 0.0)) throw std::domain_error("mutual_info_inv: requires r >= 0");
    return std::expm1(r);
}

const char* to_string(Phase p) {
    switch (p) {
        case Phase::Phase1: return "1";
        case Phase::Phase2: return "2";
        case Phase::Terminated: return "T";
    }
    return "?";
}

SystemState make_initial_state(double total_info, const LinkSnrTriple& snr1) {
    SystemState s;
    s.slot = 1;
    s.snr = snr1;
    s.residual = ResidualInfo{total_info, total_info};
    s.phase = phase_of(s.residual);
    return s;
}

SystemState transition(const SystemState& state, double power, const LinkSnrTriple& next_snr) {
    if (state.phase == Phase::Terminated)
        throw std::logic_error("transition: state already terminated");
    if (!(power >= 0.0)) throw std::domain_error("transition: power must be >= 0");

    SystemState next = state;
    if (state.phase == Phase::Phase1) {
        next.residual.relay_needed -= detail::mi(power * state.snr.sr);
        next.residual.dest_needed -= detail::mi(power * state.snr.sd);
    } else {
        next.residual.dest_needed -= detail::mi(power * state.snr.strongest_to_dest());
    }
    next.slot = state.slot + 1;
    next.snr = next_snr;
    next.phase = phase_of(next.residual);
    return next;
}

Phase2Split reduce_phase2_power(double p_source, double p_relay, const LinkSnrTriple& snr) {
    if (!(p_source >= 0.0) || !(p_relay >= 0.0))
        throw std::domain_error("reduce_phase2_power: powers must be >= 0");
    Phase2Split out;
    if (snr.sd <= 0.0 && snr.rd <= 0.0) {
        if (p_source + p_relay > 0.0)
            throw std::invalid_argument("reduce_phase2_power: both SNRs zero with positive power");
        return out; // nothing to carry
    }
    if (snr.sd >= snr.rd) {
        out.on_source = true;
        out.power = p_source + p_relay * snr.rd / snr.sd;
    } else {
        out.on_source = false;
        out.power = p_relay + p_source * snr.sd / snr.rd;
    }
    return out;
}

} // namespace relaydp
