// relaydp command line: solve / evaluate / sweep / bounds.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "relaydp/channel.hpp"
#include "relaydp/closed_form.hpp"
#include "relaydp/dp.hpp"
#include "relaydp/errors.hpp"
#include "relaydp/eval.hpp"
#include "relaydp/policies.hpp"
#include "relaydp/serialize.hpp"

namespace {

using namespace relaydp;

constexpr double kLn2 = 0.6931471805599453;

struct ChannelFlags {
    double gsr = 1.0; // mean source-relay SNR; 0 switches the relay off
    double gsd = 1.0;
    double grd = 1.0;
    std::string dist = "truncexp";
    double trunc = 1e-3;
    int dof = 4;
    double lambda = 1.0;
};

void add_channel_flags(CLI::App* cmd, ChannelFlags& f) {
    cmd->add_option("--gsr", f.gsr, "mean source-relay SNR (0 = no relay)")->capture_default_str();
    cmd->add_option("--gsd", f.gsd, "mean source-destination SNR")->capture_default_str();
    cmd->add_option("--grd", f.grd, "mean relay-destination SNR")->capture_default_str();
    cmd->add_option("--dist", f.dist, "fading kind: truncexp|rayleigh|rician|chi2")
        ->capture_default_str();
    cmd->add_option("--trunc", f.trunc, "SNR truncation threshold (truncexp)")
        ->capture_default_str();
    cmd->add_option("--dof", f.dof, "chi-squared degrees of freedom (even)")->capture_default_str();
    cmd->add_option("--lambda", f.lambda, "noncentrality (rician/chi2)")->capture_default_str();
}

DistributionSpec make_dist(const ChannelFlags& f, double mean) {
    switch (fading_kind_from_string(f.dist)) {
        case FadingKind::TruncatedExponential:
            return DistributionSpec::truncated_exponential(mean, f.trunc);
        case FadingKind::Rayleigh: return DistributionSpec::rayleigh(mean);
        case FadingKind::Rician: return DistributionSpec::rician(mean, f.lambda);
        case FadingKind::NoncentralChiSquared:
            return DistributionSpec::chi_squared(mean, f.dof, f.lambda);
    }
    throw ConfigError("bad fading kind");
}

ChannelModel make_channel(const ChannelFlags& f) {
    ChannelModel c;
    c.sd = make_dist(f, f.gsd);
    c.rd = make_dist(f, f.grd);
    if (f.gsr > 0.0) c.sr = make_dist(f, f.gsr);
    return c;
}

int thread_default() {
    if (const char* env = std::getenv("RELAYDP_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 0; // auto
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << body;
    if (!os) throw IoError("write failure: " + path);
}

void echo_config(const std::string& out_path, const nlohmann::json& j) {
    write_text_file(out_path + ".config.json", j.dump(2) + "\n");
}

std::unique_ptr<Policy> build_policy(PolicyKind kind, int slots,
                                     std::shared_ptr<const ValueTable> table, double fixed_power) {
    switch (kind) {
        case PolicyKind::DpTable:
        case PolicyKind::NoRelayDpTable:
            if (!table) throw ConfigError("table-backed policy needs --table");
            return std::make_unique<DpTablePolicy>(std::move(table));
        case PolicyKind::Heuristic2Slot:
        case PolicyKind::HeuristicGeneralK:
            return std::make_unique<HeuristicPolicy>(slots, slots != 2);
        case PolicyKind::NaiveRelayFirst: return std::make_unique<NaiveRelayFirstPolicy>(slots);
        case PolicyKind::FixedPower: return std::make_unique<FixedPowerPolicy>(slots, fixed_power);
    }
    throw ConfigError("bad policy kind");
}

int run_cli(int argc, char** argv) {
    CLI::App app{"energy-optimal relay power allocation over a slotted deadline"};
    app.require_subcommand(1);
    app.fallthrough(); // lets --config appear after the subcommand name
    app.set_config("--config", "", "key=value config file; flags override file entries");

    // ---- solve ----
    auto* solve_cmd = app.add_subcommand("solve", "run the backward recursion, write a policy file");
    ChannelFlags solve_ch;
    int slots = 2;
    double rate = 0.0;
    double delta = 0.01;
    int nsim = 5000;
    std::uint64_t seed = 0;
    std::string out_path, json_out;
    bool bits = false;
    double cap = 1e9;
    int threads = thread_default();
    InnerSearch inner;
    std::string interp = "linear";
    solve_cmd->add_option("--slots,-K", slots, "deadline in slots")->capture_default_str();
    solve_cmd->add_option("--rate,-R", rate, "rate per slot (nats per channel use)")->required();
    solve_cmd->add_flag("--bits", bits, "rates are given in bits, convert on ingest");
    solve_cmd->add_option("--delta", delta, "residual grid step")->capture_default_str();
    solve_cmd->add_option("--nsim", nsim, "Monte Carlo scenarios per slot")->capture_default_str();
    solve_cmd->add_option("--seed", seed, "RNG seed (mandatory, no wall-clock seeding)")->required();
    solve_cmd->add_option("--out", out_path, "policy/value output file")->required();
    solve_cmd->add_option("--json-out", json_out, "also write a JSON mirror (with tables)");
    solve_cmd->add_option("--cap", cap, "value cap marking effectively unbounded entries")
        ->capture_default_str();
    solve_cmd->add_option("--threads", threads, "worker thread cap (env RELAYDP_THREADS)");
    solve_cmd->add_option("--scan-cap", inner.scan_cap, "inner-search coarse scan cap")
        ->capture_default_str();
    solve_cmd->add_option("--golden-iters", inner.golden_iters, "inner-search refinement iterations")
        ->capture_default_str();
    solve_cmd->add_option("--interp", interp, "continuation interpolation: linear|nearest")
        ->capture_default_str();
    add_channel_flags(solve_cmd, solve_ch);
    solve_cmd->callback([&] {
        SolverConfig cfg;
        cfg.slots = slots;
        cfg.rate_per_slot = bits ? rate * kLn2 : rate;
        cfg.grid_step = delta;
        cfg.n_scenarios = nsim;
        cfg.seed = seed;
        cfg.channel = make_channel(solve_ch);
        cfg.value_cap = cap;
        cfg.threads = threads;
        cfg.inner = inner;
        if (interp == "nearest")
            cfg.interp = InterpKind::Nearest;
        else if (interp != "linear")
            throw ConfigError("bad --interp: " + interp);
        const ValueTable table = solve(cfg);
        save_table(table, out_path);
        echo_config(out_path, solver_config_to_json(cfg));
        if (!json_out.empty()) write_text_file(json_out, table_to_json(table, true).dump() + "\n");
        std::printf("K=%d R=%.6g NMESE=%.6g dB=%.4f relay=%s cap_hit=%d seed=%llu out=%s\n",
                    cfg.slots, cfg.rate_per_slot, table.nmese, 10.0 * std::log10(table.nmese),
                    cfg.channel.relay_present() ? "on" : "off", table.cap_hit ? 1 : 0,
                    static_cast<unsigned long long>(cfg.seed), out_path.c_str());
    });

    // ---- evaluate ----
    auto* eval_cmd = app.add_subcommand("evaluate", "simulate a policy, report NMESE");
    ChannelFlags eval_ch;
    std::string table_path, policy_name = "dp", eval_out;
    long trials = 100000;
    std::uint64_t eval_seed = 0;
    double fixed_power = 1.0;
    int eval_slots = 2;
    double eval_rate = 0.0;
    bool eval_bits = false;
    eval_cmd->add_option("--table", table_path, "policy file from solve (required for dp)");
    eval_cmd->add_option("--policy", policy_name, "dp|heuristic|naive|fixed|norelay_dp")
        ->capture_default_str();
    eval_cmd->add_option("--trials", trials, "Monte Carlo trajectories")->capture_default_str();
    eval_cmd->add_option("--seed", eval_seed, "RNG seed")->required();
    eval_cmd->add_option("--fixed-power", fixed_power, "level for the fixed policy")
        ->capture_default_str();
    eval_cmd->add_option("--slots,-K", eval_slots, "slots (when no table is given)")
        ->capture_default_str();
    eval_cmd->add_option("--rate,-R", eval_rate, "rate per slot (when no table is given)");
    eval_cmd->add_flag("--bits", eval_bits, "rates are given in bits");
    eval_cmd->add_option("--out", eval_out, "write the result as JSON here");
    add_channel_flags(eval_cmd, eval_ch);
    eval_cmd->callback([&] {
        const PolicyKind kind = policy_kind_from_string(policy_name);
        std::shared_ptr<const ValueTable> table;
        EvalConfig ec;
        if (!table_path.empty()) {
            table = std::make_shared<const ValueTable>(load_table(table_path));
            ec.slots = table->config.slots;
            ec.rate_per_slot = table->config.rate_per_slot;
            ec.channel = table->config.channel;
        } else {
            if (!(eval_rate > 0.0)) throw ConfigError("evaluate: need --table or --rate");
            ec.slots = eval_slots;
            ec.rate_per_slot = eval_bits ? eval_rate * kLn2 : eval_rate;
            ec.channel = make_channel(eval_ch);
        }
        if (kind == PolicyKind::NoRelayDpTable || (table && !table->config.channel.relay_present()))
            ec.channel.sr.reset();
        auto policy = build_policy(kind, ec.slots, table, fixed_power);
        const SimResult res = simulate(*policy, ec, trials, eval_seed);
        if (!eval_out.empty()) {
            nlohmann::json j;
            j["policy"] = policy->name();
            j["slots"] = ec.slots;
            j["rate_per_slot"] = ec.rate_per_slot;
            j["nmese"] = res.nmese;
            j["nmese_db"] = res.nmese_db;
            j["std_error"] = res.std_error;
            j["trials"] = res.trials;
            j["aborted"] = res.aborted;
            j["deadline_violations"] = res.deadline_violations;
            j["seed"] = eval_seed;
            write_text_file(eval_out, j.dump(2) + "\n");
            nlohmann::json resolved;
            resolved["policy"] = policy->name();
            resolved["slots"] = ec.slots;
            resolved["rate_per_slot"] = ec.rate_per_slot;
            resolved["trials"] = trials;
            resolved["seed"] = eval_seed;
            resolved["table"] = table_path;
            resolved["fixed_power"] = fixed_power;
            resolved["channel"] = channel_to_json(ec.channel);
            echo_config(eval_out, resolved);
        }
        std::printf("policy=%s K=%d R=%.6g NMESE=%.6g dB=%.4f stderr=%.3g trials=%ld seed=%llu\n",
                    policy->name().c_str(), ec.slots, ec.rate_per_slot, res.nmese, res.nmese_db,
                    res.std_error, res.trials, static_cast<unsigned long long>(eval_seed));
    });

    // ---- sweep ----
    auto* sweep_cmd = app.add_subcommand("sweep", "cross-product experiment, CSV (and SVG) output");
    ChannelFlags sweep_ch;
    std::vector<double> rates;
    std::vector<int> slots_list;
    std::vector<std::string> policy_names{"dp"};
    std::string csv_out, svg_out;
    double sweep_delta = 0.01;
    int sweep_nsim = 5000;
    std::uint64_t solver_seed = 0, sweep_eval_seed = 1;
    long sweep_trials = 100000;
    double sweep_fixed = 1.0;
    bool sweep_bits = false;
    int sweep_threads = thread_default();
    sweep_cmd->add_option("--rates", rates, "rates per slot")->required()->delimiter(',');
    sweep_cmd->add_option("--slots-list", slots_list, "slot deadlines")->required()->delimiter(',');
    sweep_cmd->add_option("--policies", policy_names, "dp|norelay_dp|heuristic|naive|fixed")
        ->delimiter(',')
        ->capture_default_str();
    sweep_cmd->add_flag("--bits", sweep_bits, "rates are given in bits");
    sweep_cmd->add_option("--delta", sweep_delta, "residual grid step")->capture_default_str();
    sweep_cmd->add_option("--nsim", sweep_nsim, "solver scenarios per slot")->capture_default_str();
    sweep_cmd->add_option("--seed", solver_seed, "solver RNG seed")->required();
    sweep_cmd->add_option("--eval-seed", sweep_eval_seed, "evaluation RNG seed")
        ->capture_default_str();
    sweep_cmd->add_option("--trials", sweep_trials, "evaluation trajectories per row")
        ->capture_default_str();
    sweep_cmd->add_option("--fixed-power", sweep_fixed, "level for the fixed policy")
        ->capture_default_str();
    sweep_cmd->add_option("--threads", sweep_threads, "worker thread cap");
    sweep_cmd->add_option("--out", csv_out, "CSV output path")->required();
    sweep_cmd->add_option("--svg", svg_out, "optional SVG plot path");
    add_channel_flags(sweep_cmd, sweep_ch);
    sweep_cmd->callback([&] {
        SweepSpec spec;
        spec.rates = rates;
        if (sweep_bits)
            for (auto& r : spec.rates) r *= kLn2;
        spec.slots_list = slots_list;
        for (const auto& name : policy_names)
            spec.policies.push_back(policy_kind_from_string(name));
        spec.solver.grid_step = sweep_delta;
        spec.solver.n_scenarios = sweep_nsim;
        spec.solver.seed = solver_seed;
        spec.solver.threads = sweep_threads;
        spec.solver.channel = make_channel(sweep_ch);
        spec.eval_trials = sweep_trials;
        spec.eval_seed = sweep_eval_seed;
        spec.fixed_power = sweep_fixed;
        const SweepResult result = sweep(spec);
        write_text_file(csv_out, to_csv(result));
        nlohmann::json echo = solver_config_to_json(spec.solver);
        echo["rates"] = spec.rates;
        echo["slots_list"] = spec.slots_list;
        echo["policies"] = policy_names;
        echo["eval_trials"] = spec.eval_trials;
        echo["eval_seed"] = spec.eval_seed;
        echo_config(csv_out, echo);
        if (!svg_out.empty()) {
            std::ofstream os(svg_out);
            if (!os) throw IoError("cannot open for writing: " + svg_out);
            write_svg(result, os);
        }
        std::printf("sweep: %zu rows -> %s\n", result.rows.size(), csv_out.c_str());
    });

    // ---- bounds ----
    auto* bounds_cmd = app.add_subcommand("bounds", "bounded-energy diagnosis for a channel class");
    ChannelFlags bounds_ch;
    bounds_ch.dist = "rayleigh";
    bounds_ch.trunc = 0.0;
    double bounds_mean = 1.0;
    bool bounds_json = false;
    bounds_cmd->add_option("--dist", bounds_ch.dist, "truncexp|rayleigh|rician|chi2")
        ->capture_default_str();
    bounds_cmd->add_option("--mean", bounds_mean, "mean SNR for all links")->capture_default_str();
    bounds_cmd->add_option("--trunc", bounds_ch.trunc, "truncation threshold (truncexp)")
        ->capture_default_str();
    bounds_cmd->add_option("--dof", bounds_ch.dof, "chi-squared degrees of freedom")
        ->capture_default_str();
    bounds_cmd->add_option("--lambda", bounds_ch.lambda, "noncentrality")->capture_default_str();
    bounds_cmd->add_flag("--json", bounds_json, "machine-readable output");
    bounds_cmd->callback([&] {
        const DistributionSpec d = make_dist(bounds_ch, bounds_mean);
        const BoundednessReport rep = boundedness_report(d, d, d);
        if (bounds_json) {
            auto phi_json = [](const PhiEstimate& p) {
                nlohmann::json j;
                j["bounded"] = p.bounded;
                if (p.bounded) {
                    j["value"] = p.value;
                    j["std_error"] = p.std_error;
                    j["closed_form"] = p.closed_form;
                }
                return j;
            };
            nlohmann::json j;
            j["dist"] = dist_to_json(d);
            j["no_relay"] = to_string(rep.no_relay);
            j["relay"] = to_string(rep.relay);
            j["phi1"] = phi_json(rep.phi1_sd);
            j["phi2"] = phi_json(rep.phi2_sd_rd);
            std::printf("%s\n", j.dump(2).c_str());
            return;
        }
        auto phi_text = [](const PhiEstimate& p) {
            if (!p.bounded) return std::string("unbounded");
            char buf[64];
            if (p.closed_form)
                std::snprintf(buf, sizeof buf, "%.6f", p.value);
            else
                std::snprintf(buf, sizeof buf, "%.6f +- %.2g", p.value, p.std_error);
            return std::string(buf);
        };
        std::printf("no_relay: %s (phi1 = %s)\n", to_string(rep.no_relay),
                    phi_text(rep.phi1_sd).c_str());
        std::printf("relay:    %s (phi2 = %s)\n", to_string(rep.relay),
                    phi_text(rep.phi2_sd_rd).c_str());
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const relaydp::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 2;
    } catch (const relaydp::NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
