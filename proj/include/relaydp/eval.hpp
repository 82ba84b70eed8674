#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "relaydp/dp.hpp"
#include "relaydp/policies.hpp"

namespace relaydp {

struct EvalConfig {
    int slots = 1;
    double rate_per_slot = 1.0;
    ChannelModel channel;
    double abort_fail_fraction = 0.001; // more aborted trajectories than this fails the run

    double total_info() const { return rate_per_slot * slots; }
    void validate() const;
};

struct SlotRecord {
    int slot = 0;
    Phase phase = Phase::Phase1;
    LinkSnrTriple snr;
    double power = 0.0;
    double dest_gain = 0.0;  // destination mutual-information increment
    double relay_gain = 0.0; // relay increment (phase 1 only)
};

struct TrajectoryRecord {
    std::vector<SlotRecord> steps;
    double sum_energy = 0.0;
    int switch_slot = -1;      // first phase-2 slot (the realized K-tilde + 1), -1 if none
    int termination_slot = -1; // slot after which dest_needed <= 0
    bool aborted = false;
};

struct SimResult {
    double nmese = 0.0;
    double nmese_db = 0.0;
    double std_error = 0.0;
    long trials = 0;
    long aborted = 0;
    long deadline_violations = 0; // finished slot K with dest_needed > 0 (not aborted)
    TrajectoryRecord sample;      // first trajectory
};

// Forward Monte Carlo over n_trials independent trajectories with fresh
// SNR draws per slot.  Draws depend only on (seed, trial, slot), never
// on the policy, so runs at the same seed share random numbers across
// policies.  Throws NumericalError when the aborted fraction exceeds
// the configured limit.
SimResult simulate(const Policy& policy, const EvalConfig& config, long n_trials,
                   std::uint64_t seed);

struct SweepRow {
    double rate = 0.0;
    int slots = 0;
    std::string policy;
    double trunc = 0.0;
    double nmese = 0.0;
    double nmese_db = 0.0;
    double std_error = 0.0;
    long trials = 0;
    std::uint64_t seed = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
};

struct SweepSpec {
    std::vector<double> rates;
    std::vector<int> slots_list;
    std::vector<PolicyKind> policies;
    SolverConfig solver; // channel + solver knobs; rate/slots overwritten per row
    long eval_trials = 100000;
    std::uint64_t eval_seed = 1;
    double fixed_power = 1.0;
};

// Cross-product evaluation with common random numbers across policies
// at fixed (rate, K).  DP tables are solved once per (rate, K); the
// no-relay baseline solves and evaluates on a channel with the
// source-relay link removed.
SweepResult sweep(const SweepSpec& spec);

// CSV with header rate,K,policy,trunc,nmese,nmese_db,stderr,trials,seed.
std::string to_csv(const SweepResult& result);

// Minimal line plot, one series per (K, policy), rate on x, dB on y.
void write_svg(const SweepResult& result, std::ostream& os);

} // namespace relaydp
