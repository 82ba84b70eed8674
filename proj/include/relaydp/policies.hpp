#pragma once

#include <memory>
#include <string>

#include "relaydp/dp.hpp"
#include "relaydp/info.hpp"

namespace relaydp {

enum class PolicyKind {
    DpTable,
    Heuristic2Slot,
    HeuristicGeneralK,
    NaiveRelayFirst,
    NoRelayDpTable,
    FixedPower,
};

const char* to_string(PolicyKind k);
PolicyKind policy_kind_from_string(const std::string& name);

// A closed, evaluable mapping from system state to transmit power.
// Every policy sees the full state even if it ignores most of it.
// +inf is the infeasible-slot marker (a required SNR is zero).
class Policy {
  public:
    virtual ~Policy() = default;
    virtual double power(const SystemState& state) const = 0;
    virtual PolicyKind kind() const = 0;
    std::string name() const { return to_string(kind()); }
};

// Bounded-energy heuristic: idle until two slots remain, then transmit
// so the better of relay/destination decodes the whole residual, and
// finish on the stronger link towards the destination.
double heuristic_power(const SystemState& state, int total_slots);

// Analytic upper bound 2 I^-1(R) phi2 on the heuristic's expected sum
// energy for delivering R nats over its two active slots.
double heuristic_energy_bound(double rate, double phi2);

// Diagnostic baseline: slot 1 makes the relay decode the full message,
// slot 2 the relay delivers the remainder on gamma_rd.  Slot-1 energy
// scales with E[1/gamma_sr], so it diverges as trunc -> 0.
double naive_relay_first_power(const SystemState& state, int total_slots);

class HeuristicPolicy final : public Policy {
  public:
    HeuristicPolicy(int slots, bool general);
    double power(const SystemState& state) const override;
    PolicyKind kind() const override {
        return general_ ? PolicyKind::HeuristicGeneralK : PolicyKind::Heuristic2Slot;
    }

  private:
    int slots_;
    bool general_;
};

class NaiveRelayFirstPolicy final : public Policy {
  public:
    explicit NaiveRelayFirstPolicy(int slots);
    double power(const SystemState& state) const override;
    PolicyKind kind() const override { return PolicyKind::NaiveRelayFirst; }

  private:
    int slots_;
};

// Fixed power through slot K-1 with an exact terminal top-up, so the
// deadline guarantee survives arbitrary level choices.
class FixedPowerPolicy final : public Policy {
  public:
    FixedPowerPolicy(int slots, double level);
    double power(const SystemState& state) const override;
    PolicyKind kind() const override { return PolicyKind::FixedPower; }

  private:
    int slots_;
    double level_;
};

// Table-backed optimal policy: each decision re-runs the inner Bellman
// minimization of the solve against the stored continuation tables, so
// fresh (off-scenario, off-grid) states get the same treatment as the
// solver gave grid states.
class DpTablePolicy final : public Policy {
  public:
    explicit DpTablePolicy(std::shared_ptr<const ValueTable> table);
    double power(const SystemState& state) const override;
    PolicyKind kind() const override;
    const ValueTable& table() const { return *table_; }

  private:
    std::shared_ptr<const ValueTable> table_;
};

} // namespace relaydp
