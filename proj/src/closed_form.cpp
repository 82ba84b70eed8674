#include "relaydp/closed_form.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "relaydp/errors.hpp"
#include "relaydp/info.hpp"

namespace relaydp {

double clamp_to(double x, double lo, double hi) {
    if (lo > hi) throw std::domain_error("clamp_to: lo > hi");
    return x < lo ? lo : (x > hi ? hi : x);
}

double pos_part(double x) { return x > 0.0 ? x : 0.0; }

namespace {

double g_objective(double rate, double target, double snr_sd, double phi) {
    return detail::mi_inv(rate) / snr_sd + phi * detail::mi_inv(target - rate);
}

} // namespace

double k2_branch_objective(const K2Instance& inst, int branch_index, double rate) {
    const double phi = branch_index == 1 ? inst.phi1 : inst.phi2;
    return g_objective(rate, inst.target, inst.snr1.sd, phi);
}

K2Solution k2_value(const K2Instance& inst) {
    if (!(inst.snr1.sd > 0.0)) throw std::domain_error("k2_value: requires gamma_sd_1 > 0");
    if (!(inst.phi1 > 0.0) || !(inst.phi2 > 0.0))
        throw std::domain_error("k2_value: phi values must be positive");

    const double bd = inst.target;
    if (bd <= 0.0) return K2Solution{0.0, 0.0, K2Branch::Switch};

    // B' = min{R^th, B^d}; gamma_sr_1 = 0 means the relay can never
    // decode, so the switch interval collapses to the forced endpoint.
    double bprime = bd;
    if (inst.snr1.sr > 0.0) {
        const double rth = detail::mi(detail::mi_inv(bd) * inst.snr1.sd / inst.snr1.sr);
        bprime = std::min(rth, bd);
    }

    // Unconstrained stationary points, clamped into the branch domains.
    // Clamping the stay candidate at B' is safe: there g1 >= g2(B') >=
    // the switch value, so an out-of-domain stay stationary point never
    // wins the min.
    const double r1_free = 0.5 * (std::log(inst.snr1.sd * inst.phi1) + bd);
    const double r2_free = 0.5 * (std::log(inst.snr1.sd * inst.phi2) + bd);
    const double r1 = clamp_to(pos_part(r1_free), 0.0, bprime);
    const double r2 = clamp_to(r2_free, bprime, bd);

    const double v1 = g_objective(r1, bd, inst.snr1.sd, inst.phi1);
    const double v2 = g_objective(r2, bd, inst.snr1.sd, inst.phi2);

    if (v2 <= v1) return K2Solution{v2, r2, K2Branch::Switch};
    return K2Solution{v1, r1, K2Branch::Stay};
}

NmeseEstimate k2_nmese(const ChannelModel& channel, double rate_per_slot, long n_trials,
                       std::uint64_t seed, std::optional<double> phi1_override,
                       std::optional<double> phi2_override) {
    channel.validate();
    if (!(rate_per_slot >= 0.0)) throw ConfigError("k2_nmese: rate must be >= 0");
    if (n_trials < 1) throw ConfigError("k2_nmese: n_trials must be >= 1");

    NmeseEstimate out;
    out.trials = n_trials;
    if (phi1_override) {
        out.phi1 = *phi1_override;
    } else {
        const PhiEstimate p = phi1(channel.sd);
        if (!p.bounded) throw NumericalError("k2_nmese: phi1 unbounded for this channel");
        out.phi1 = p.value;
    }
    if (phi2_override) {
        out.phi2 = *phi2_override;
    } else {
        const PhiEstimate p = phi2(channel.sd, channel.rd);
        if (!p.bounded) throw NumericalError("k2_nmese: phi2 unbounded for this channel");
        out.phi2 = p.value;
    }

    const double target = 2.0 * rate_per_slot;
    const RngStream base = RngStream::seeded(seed).sub(stream_label::closed_form);
    double sum = 0.0, sumsq = 0.0;
    for (long i = 0; i < n_trials; ++i) {
        RngStream r = base.sub(static_cast<std::uint64_t>(i) + 1);
        K2Instance inst;
        inst.snr1 = channel.sample_triple(r);
        inst.target = target;
        inst.phi1 = out.phi1;
        inst.phi2 = out.phi2;
        const double half = 0.5 * k2_value(inst).value;
        sum += half;
        sumsq += half * half;
    }
    out.nmese = sum / static_cast<double>(n_trials);
    const double var = std::max(0.0, sumsq / static_cast<double>(n_trials) - out.nmese * out.nmese);
    out.std_error = std::sqrt(var / static_cast<double>(n_trials));
    return out;
}

} // namespace relaydp
