#include "relaydp/policies.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "relaydp/errors.hpp"

namespace relaydp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Exact-finish powers land the residual on the phase/termination
// boundary, where a one-ulp rounding can leave a receiver formally
// undecoded.  Every policy therefore transmits with a vanishing
// relative margin; the energy effect is far below any tolerance used
// anywhere.
constexpr double kCompletionMargin = 1.0 + 1e-12;

double finish_on(double needed, double gain) {
    if (needed <= 0.0) return 0.0;
    if (!(gain > 0.0)) return kInf;
    return kCompletionMargin * detail::mi_inv(needed) / gain;
}
} // namespace

const char* to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::DpTable: return "dp";
        case PolicyKind::Heuristic2Slot: return "heuristic";
        case PolicyKind::HeuristicGeneralK: return "heuristic_k";
        case PolicyKind::NaiveRelayFirst: return "naive";
        case PolicyKind::NoRelayDpTable: return "norelay_dp";
        case PolicyKind::FixedPower: return "fixed";
    }
    return "?";
}

PolicyKind policy_kind_from_string(const std::string& name) {
    if (name == "dp") return PolicyKind::DpTable;
    if (name == "heuristic") return PolicyKind::Heuristic2Slot;
    if (name == "heuristic_k") return PolicyKind::HeuristicGeneralK;
    if (name == "naive") return PolicyKind::NaiveRelayFirst;
    if (name == "norelay_dp") return PolicyKind::NoRelayDpTable;
    if (name == "fixed") return PolicyKind::FixedPower;
    throw ConfigError("unknown policy: " + name);
}

double heuristic_power(const SystemState& state, int total_slots) {
    if (state.phase == Phase::Terminated) return 0.0;
    const double dest = state.residual.dest_needed;
    if (state.phase == Phase::Phase2) return finish_on(dest, state.snr.strongest_to_dest());
    if (state.slot < total_slots - 1) return 0.0; // bounded filler: stay silent
    if (state.slot >= total_slots) return finish_on(dest, state.snr.sd);
    // Next-to-last slot, relay still decoding: serve whichever of
    // relay/destination is cheaper to finish outright.
    return finish_on(dest, std::max(state.snr.sd, state.snr.sr));
}

double heuristic_energy_bound(double rate, double phi2) {
    return 2.0 * detail::mi_inv(rate) * phi2;
}

double naive_relay_first_power(const SystemState& state, int total_slots) {
    if (state.phase == Phase::Terminated) return 0.0;
    const double dest = state.residual.dest_needed;
    if (state.phase == Phase::Phase2) return finish_on(dest, state.snr.rd); // relay transmits
    if (state.slot >= total_slots) return finish_on(dest, state.snr.sd);
    // Make the relay decode everything it still needs, now.
    const double relay = state.residual.relay_needed;
    if (relay <= 0.0) return 0.0;
    if (!(state.snr.sr > 0.0)) return kInf;
    return kCompletionMargin * detail::mi_inv(relay) / state.snr.sr;
}

HeuristicPolicy::HeuristicPolicy(int slots, bool general) : slots_(slots), general_(general) {
    if (slots < 2) throw ConfigError("HeuristicPolicy: needs at least 2 slots");
    if (!general && slots != 2) throw ConfigError("Heuristic2Slot: requires exactly 2 slots");
}

double HeuristicPolicy::power(const SystemState& state) const {
    return heuristic_power(state, slots_);
}

NaiveRelayFirstPolicy::NaiveRelayFirstPolicy(int slots) : slots_(slots) {
    if (slots != 2) throw ConfigError("NaiveRelayFirstPolicy: requires exactly 2 slots");
}

double NaiveRelayFirstPolicy::power(const SystemState& state) const {
    return naive_relay_first_power(state, slots_);
}

FixedPowerPolicy::FixedPowerPolicy(int slots, double level) : slots_(slots), level_(level) {
    if (slots < 1) throw ConfigError("FixedPowerPolicy: slots must be >= 1");
    if (!(level >= 0.0)) throw ConfigError("FixedPowerPolicy: level must be >= 0");
}

double FixedPowerPolicy::power(const SystemState& state) const {
    if (state.phase == Phase::Terminated) return 0.0;
    if (state.slot >= slots_)
        return kCompletionMargin * terminal_power(state.phase, state.residual.dest_needed, state.snr);
    return level_;
}

DpTablePolicy::DpTablePolicy(std::shared_ptr<const ValueTable> table) : table_(std::move(table)) {
    if (!table_) throw ConfigError("DpTablePolicy: null table");
}

PolicyKind DpTablePolicy::kind() const {
    return table_->config.channel.relay_present() ? PolicyKind::DpTable : PolicyKind::NoRelayDpTable;
}

double DpTablePolicy::power(const SystemState& state) const {
    if (state.phase == Phase::Terminated || state.residual.dest_needed <= 0.0) return 0.0;
    const int slots = table_->config.slots;
    if (state.slot > slots) throw std::logic_error("DpTablePolicy: slot past the horizon");
    if (state.slot == slots)
        return kCompletionMargin *
               terminal_power(state.phase, state.residual.dest_needed, state.snr);

    const auto k = static_cast<std::size_t>(state.slot);
    if (state.phase == Phase::Phase2) {
        return kCompletionMargin *
               decide_phase2(state.residual.dest_needed, state.snr, table_->grid,
                             table_->jbar2[k + 1], table_->config.interp, table_->config.inner)
                   .power;
    }
    return kCompletionMargin *
           decide_phase1(state.residual, state.snr, table_->grid, table_->jbar1[k + 1],
                         table_->jbar2[k + 1], table_->config.interp, table_->config.inner)
               .power;
}

} // namespace relaydp
