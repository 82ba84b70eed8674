#include "relaydp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "relaydp/errors.hpp"

namespace relaydp {

namespace {

// Compensated accumulator; trials are summed in a fixed order so
// results are bit-reproducible for a given seed.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace

void EvalConfig::validate() const {
    if (slots < 1) throw ConfigError("EvalConfig: slots must be >= 1");
    if (!(rate_per_slot > 0.0)) throw ConfigError("EvalConfig: rate_per_slot must be > 0");
    if (!(abort_fail_fraction >= 0.0)) throw ConfigError("EvalConfig: bad abort_fail_fraction");
    channel.validate();
}

SimResult simulate(const Policy& policy, const EvalConfig& config, long n_trials,
                   std::uint64_t seed) {
    config.validate();
    if (n_trials < 1) throw ConfigError("simulate: n_trials must be >= 1");

    const int slots = config.slots;
    const double total = config.total_info();
    const RngStream base = RngStream::seeded(seed).sub(stream_label::eval);

    SimResult out;
    out.trials = n_trials;
    KahanSum sum, sumsq;

    for (long trial = 0; trial < n_trials; ++trial) {
        RngStream rng = base.sub(static_cast<std::uint64_t>(trial) + 1);
        TrajectoryRecord rec;
        const bool keep = trial == 0;

        SystemState state = make_initial_state(total, config.channel.sample_triple(rng));
        double energy = 0.0;
        bool aborted = false;
        for (int k = 1; k <= slots && state.phase != Phase::Terminated; ++k) {
            const double p = policy.power(state);
            if (!std::isfinite(p) || p < 0.0) {
                aborted = true;
                break;
            }
            energy += p;
            const LinkSnrTriple next_snr =
                k < slots ? config.channel.sample_triple(rng) : LinkSnrTriple{};
            const SystemState before = state;
            state = transition(state, p, next_snr);
            if (keep) {
                SlotRecord sr;
                sr.slot = before.slot;
                sr.phase = before.phase;
                sr.snr = before.snr;
                sr.power = p;
                sr.dest_gain = before.residual.dest_needed - state.residual.dest_needed;
                sr.relay_gain = before.residual.relay_needed - state.residual.relay_needed;
                rec.steps.push_back(sr);
            }
            if (rec.switch_slot < 0 && state.phase == Phase::Phase2) rec.switch_slot = state.slot;
            if (rec.termination_slot < 0 && state.phase == Phase::Terminated)
                rec.termination_slot = before.slot;
        }

        if (aborted) {
            ++out.aborted;
        } else {
            if (state.residual.dest_needed > 0.0) ++out.deadline_violations;
            const double per_slot = energy / static_cast<double>(slots);
            sum.add(per_slot);
            sumsq.add(per_slot * per_slot);
        }
        if (keep) {
            rec.sum_energy = energy;
            rec.aborted = aborted;
            out.sample = std::move(rec);
        }
    }

    const long used = n_trials - out.aborted;
    if (static_cast<double>(out.aborted) >
        config.abort_fail_fraction * static_cast<double>(n_trials))
        throw NumericalError("simulate: aborted trajectory fraction exceeds limit");
    if (used < 1) throw NumericalError("simulate: no usable trajectories");

    out.nmese = sum.sum / static_cast<double>(used);
    const double var =
        std::max(0.0, sumsq.sum / static_cast<double>(used) - out.nmese * out.nmese);
    out.std_error = std::sqrt(var / static_cast<double>(used));
    out.nmese_db = 10.0 * std::log10(out.nmese);
    return out;
}

SweepResult sweep(const SweepSpec& spec) {
    if (spec.rates.empty() || spec.slots_list.empty() || spec.policies.empty())
        throw ConfigError("sweep: rates, slots and policies must be nonempty");
    spec.solver.channel.validate();

    SweepResult result;
    for (const int slots : spec.slots_list) {
        for (const double rate : spec.rates) {
            // Tables are shared by every policy at this (rate, K).
            std::shared_ptr<const ValueTable> dp_table, norelay_table;
            auto solve_with = [&](bool relay) {
                SolverConfig cfg = spec.solver;
                cfg.slots = slots;
                cfg.rate_per_slot = rate;
                if (!relay) cfg.channel.sr.reset();
                return std::make_shared<const ValueTable>(solve(cfg));
            };

            for (const PolicyKind kind : spec.policies) {
                std::unique_ptr<Policy> policy;
                EvalConfig ec;
                ec.slots = slots;
                ec.rate_per_slot = rate;
                ec.channel = spec.solver.channel;
                switch (kind) {
                    case PolicyKind::DpTable:
                        if (!dp_table) dp_table = solve_with(true);
                        policy = std::make_unique<DpTablePolicy>(dp_table);
                        break;
                    case PolicyKind::NoRelayDpTable:
                        if (!norelay_table) norelay_table = solve_with(false);
                        policy = std::make_unique<DpTablePolicy>(norelay_table);
                        ec.channel.sr.reset();
                        break;
                    case PolicyKind::Heuristic2Slot:
                    case PolicyKind::HeuristicGeneralK:
                        policy = std::make_unique<HeuristicPolicy>(slots, slots != 2);
                        break;
                    case PolicyKind::NaiveRelayFirst:
                        policy = std::make_unique<NaiveRelayFirstPolicy>(slots);
                        break;
                    case PolicyKind::FixedPower:
                        policy = std::make_unique<FixedPowerPolicy>(slots, spec.fixed_power);
                        break;
                }
                const SimResult sim = simulate(*policy, ec, spec.eval_trials, spec.eval_seed);
                SweepRow row;
                row.rate = rate;
                row.slots = slots;
                row.policy = policy->name();
                row.trunc = spec.solver.channel.sd.trunc;
                row.nmese = sim.nmese;
                row.nmese_db = sim.nmese_db;
                row.std_error = sim.std_error;
                row.trials = sim.trials;
                row.seed = spec.eval_seed;
                result.rows.push_back(std::move(row));
            }
        }
    }
    return result;
}

std::string to_csv(const SweepResult& result) {
    std::ostringstream os;
    os << "rate,K,policy,trunc,nmese,nmese_db,stderr,trials,seed\n";
    for (const auto& r : result.rows) {
        os << format_double(r.rate) << ',' << r.slots << ',' << r.policy << ','
           << format_double(r.trunc) << ',' << format_double(r.nmese) << ','
           << format_double(r.nmese_db) << ',' << format_double(r.std_error) << ',' << r.trials
           << ',' << r.seed << '\n';
    }
    return os.str();
}

void write_svg(const SweepResult& result, std::ostream& os) {
    const int width = 720, height = 480;
    const int ml = 70, mr = 20, mt = 20, mb = 50;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& r : result.rows) {
        xmin = std::min(xmin, r.rate);
        xmax = std::max(xmax, r.rate);
        ymin = std::min(ymin, r.nmese_db);
        ymax = std::max(ymax, r.nmese_db);
    }
    if (!(xmax > xmin)) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (!(ymax > ymin)) {
        ymin -= 1.0;
        ymax += 1.0;
    }
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) {
        return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr);
    };
    auto py = [&](double y) {
        return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
    };

    std::map<std::pair<int, std::string>, std::vector<const SweepRow*>> series;
    for (const auto& r : result.rows) series[{r.slots, r.policy}].push_back(&r);

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
       << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
       << height - mb << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
       << "\" text-anchor=\"middle\" font-size=\"13\">rate (nats per slot)</text>\n";
    os << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
       << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
       << (mt + height - mb) / 2 << ")\">NMESE (dB)</text>\n";

    for (int t = 0; t <= 4; ++t) {
        const double y = ymin + t * (ymax - ymin) / 4;
        os << "<text x=\"" << ml - 6 << "\" y=\"" << py(y) + 4
           << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(y) << "</text>\n";
        const double x = xmin + t * (xmax - xmin) / 4;
        os << "<text x=\"" << px(x) << "\" y=\"" << height - mb + 16
           << "\" text-anchor=\"middle\" font-size=\"11\">" << format_double(x) << "</text>\n";
    }

    int idx = 0, legend_y = mt + 8;
    for (const auto& [key, rows] : series) {
        const char* color = palette[idx % 8];
        std::vector<const SweepRow*> sorted(rows);
        std::sort(sorted.begin(), sorted.end(),
                  [](const SweepRow* a, const SweepRow* b) { return a->rate < b->rate; });
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto* r : sorted) os << px(r->rate) << ',' << py(r->nmese_db) << ' ';
        os << "\"/>\n";
        for (const auto* r : sorted)
            os << "<circle cx=\"" << px(r->rate) << "\" cy=\"" << py(r->nmese_db)
               << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
        os << "<text x=\"" << width - mr - 150 << "\" y=\"" << legend_y
           << "\" font-size=\"12\" fill=\"" << color << "\">K=" << key.first << " " << key.second
           << "</text>\n";
        legend_y += 16;
        ++idx;
    }
    os << "</svg>\n";
}

} // namespace relaydp
