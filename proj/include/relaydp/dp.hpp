#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "relaydp/channel.hpp"
#include "relaydp/info.hpp"

namespace relaydp {

// Residual-information grid {0, step, 2*step, ..., cells*step}.  The
// span is rounded up to an exact multiple of step; the requested value
// is kept so the adjustment stays visible.
struct Grid {
    double step = 0.01;
    int cells = 0;
    double requested_max = 0.0;

    static Grid make(double step, double requested_max);

    int size() const { return cells + 1; }
    double max_info() const { return step * cells; }
    double adjustment() const { return max_info() - requested_max; }
    double point(int i) const { return step * i; }
};

enum class InterpKind { Linear, Nearest };

// Inner one-dimensional minimization: coarse scan over at most
// scan_cap grid-aligned candidates in the branch interval, then
// golden-section refinement inside the winning bracket.  The scan
// guards against piecewise non-convex objectives.
struct InnerSearch {
    int scan_cap = 48;
    int golden_iters = 18;
};

struct SolverConfig {
    int slots = 1;               // K
    double rate_per_slot = 1.0;  // R_eff, nats per channel use
    double grid_step = 0.01;     // Delta
    int n_scenarios = 5000;      // N_sim
    std::uint64_t seed = 0;
    ChannelModel channel;
    InterpKind interp = InterpKind::Linear;
    InnerSearch inner;
    double value_cap = 1e9; // values above are stored as the cap and flagged
    int threads = 0;        // 0 = hardware concurrency
    int markov_order = 0;   // only 0 is solvable

    double total_info() const { return rate_per_slot * slots; }
    void validate() const;
};

// Backward-recursion output: scenario-averaged cost-to-go tables per
// slot and phase, plus the slot-1 summary.  jbar1[k] is the phase-1
// table over (relay residual, dest residual), row-major; jbar2[k] is
// the phase-2 slice over dest residual.  Tables exist for k in [2, K];
// slot 1 is never a continuation target.
struct ValueTable {
    SolverConfig config;
    Grid grid;
    std::vector<std::vector<double>> jbar1; // indexed by slot, [0] and [1] empty
    std::vector<std::vector<double>> jbar2;
    bool cap_hit = false;

    double nmese = 0.0; // (1/K) average of J_{1,1} over slot-1 scenarios
    double nmese_std_error = 0.0;
    std::vector<double> slot1_values;   // J_{1,1} per slot-1 scenario
    std::vector<double> slot1_rates;    // minimizing slot-1 rate per scenario
    std::vector<std::uint8_t> slot1_switch; // 1 if the 1->2 branch won

    ScenarioSet scenarios; // regenerable from (channel, seed); not serialized
};

// Exact last-slot minimum power: I^-1(B^D)/gamma_sd in phase 1,
// I^-1(B^D)/gamma_tilde in phase 2.  Returns +inf as the
// infeasible-slot marker when the required SNR is zero with B^D > 0.
double terminal_power(Phase phase, double dest_needed, const LinkSnrTriple& snr);

// Single-state minimizations against the next slot's averaged tables.
// These are what the solver runs per grid cell and what the
// table-backed policy runs per decision.
struct RateDecision {
    double value = 0.0; // cost-to-go estimate at this state
    double rate = 0.0;  // minimizing rate R*
    double power = 0.0; // transmit power realizing R* on this slot's link
    bool switch_branch = false;
};

RateDecision decide_phase2(double dest_needed, const LinkSnrTriple& snr, const Grid& grid,
                           std::span<const double> jbar2_next, InterpKind interp,
                           const InnerSearch& inner);

RateDecision decide_phase1(const ResidualInfo& residual, const LinkSnrTriple& snr,
                           const Grid& grid, std::span<const double> jbar1_next,
                           std::span<const double> jbar2_next, InterpKind interp,
                           const InnerSearch& inner);

struct StepOptions {
    InterpKind interp = InterpKind::Linear;
    double value_cap = 1e9;
    InnerSearch inner;
    int threads = 1;
    bool keep_per_scenario = false;
};

struct Phase2Step {
    std::vector<double> jbar;                       // averaged slice, grid.size()
    std::vector<std::vector<double>> per_scenario;  // optional
    std::vector<std::vector<double>> rates;         // optional argmins
};

// One backward step of the phase-2 recursion for slot k:
// J_{k,2}(d) = min_{0<=R<=d} I^-1(R)/gamma_tilde_k + Jbar_{k+1,2}(d-R),
// evaluated per scenario and averaged.
Phase2Step bellman_step_phase2(const Grid& grid, std::span<const LinkSnrTriple> scenarios,
                               std::span<const double> jbar2_next, const StepOptions& opt);

struct Phase1Step {
    std::vector<double> jbar;                       // averaged table, grid.size()^2
    std::vector<std::vector<double>> per_scenario;  // optional
    std::vector<std::vector<double>> rates;         // optional argmins
    std::vector<std::vector<std::uint8_t>> switched; // optional branch choice
};

// One backward step of the phase-1 recursion for slot k: the stay
// branch continues into Jbar_{k+1,1} at (B^R - g(R), B^D - R), the
// switch branch into Jbar_{k+1,2} at B^D - R, split at
// R^th = I(I^-1(B^R) gamma_sd/gamma_sr); the smaller branch wins.
Phase1Step bellman_step_phase1(const Grid& grid, std::span<const LinkSnrTriple> scenarios,
                               std::span<const double> jbar1_next,
                               std::span<const double> jbar2_next, const StepOptions& opt);

// Terminal (slot K) averaged tables.
std::vector<double> terminal_phase2_table(const Grid& grid,
                                          std::span<const LinkSnrTriple> scenarios, double cap);
std::vector<double> terminal_phase1_table(const Grid& grid,
                                          std::span<const LinkSnrTriple> scenarios, double cap);

// Full backward recursion over fresh per-slot scenario sets.
ValueTable solve(const SolverConfig& config);

} // namespace relaydp
