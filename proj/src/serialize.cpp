#include "relaydp/serialize.hpp"

#include <cstring>
#include <fstream>

#include "relaydp/errors.hpp"

namespace relaydp {

namespace {

constexpr char kMagic[4] = {'R', 'D', 'P', 'V'};
constexpr std::uint32_t kVersion = 1;

struct Writer {
    std::ofstream os;
    explicit Writer(const std::string& path) : os(path, std::ios::binary) {
        if (!os) throw IoError("cannot open for writing: " + path);
    }
    void bytes(const void* p, std::size_t n) {
        os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
        if (!os) throw IoError("write failure");
    }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u32(std::uint32_t v) { bytes(&v, 4); }
    void u64(std::uint64_t v) { bytes(&v, 8); }
    void f64(double v) { bytes(&v, 8); }
    void vec(const std::vector<double>& v) {
        u64(v.size());
        if (!v.empty()) bytes(v.data(), v.size() * sizeof(double));
    }
};

struct Reader {
    std::ifstream is;
    explicit Reader(const std::string& path) : is(path, std::ios::binary) {
        if (!is) throw IoError("cannot open for reading: " + path);
    }
    void bytes(void* p, std::size_t n) {
        is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (!is) throw IoError("truncated policy file");
    }
    std::uint8_t u8() {
        std::uint8_t v;
        bytes(&v, 1);
        return v;
    }
    std::uint32_t u32() {
        std::uint32_t v;
        bytes(&v, 4);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v;
        bytes(&v, 8);
        return v;
    }
    double f64() {
        double v;
        bytes(&v, 8);
        return v;
    }
    std::vector<double> vec() {
        const std::uint64_t n = u64();
        std::vector<double> v(n);
        if (n) bytes(v.data(), n * sizeof(double));
        return v;
    }
};

void write_dist(Writer& w, const DistributionSpec& d) {
    w.u8(static_cast<std::uint8_t>(d.kind));
    w.f64(d.mean_snr);
    w.f64(d.trunc);
    w.u32(static_cast<std::uint32_t>(d.dof));
    w.f64(d.noncentrality);
}

DistributionSpec read_dist(Reader& r) {
    DistributionSpec d;
    d.kind = static_cast<FadingKind>(r.u8());
    d.mean_snr = r.f64();
    d.trunc = r.f64();
    d.dof = static_cast<int>(r.u32());
    d.noncentrality = r.f64();
    return d;
}

} // namespace

void save_table(const ValueTable& t, const std::string& path) {
    Writer w(path);
    w.bytes(kMagic, 4);
    w.u32(kVersion);

    const SolverConfig& c = t.config;
    w.u32(static_cast<std::uint32_t>(c.slots));
    w.f64(c.rate_per_slot);
    w.f64(c.grid_step);
    w.u32(static_cast<std::uint32_t>(c.n_scenarios));
    w.u64(c.seed);
    w.u8(static_cast<std::uint8_t>(c.interp));
    w.u32(static_cast<std::uint32_t>(c.inner.scan_cap));
    w.u32(static_cast<std::uint32_t>(c.inner.golden_iters));
    w.f64(c.value_cap);
    w.u8(c.channel.relay_present() ? 1 : 0);
    if (c.channel.sr) write_dist(w, *c.channel.sr);
    write_dist(w, c.channel.sd);
    write_dist(w, c.channel.rd);

    w.f64(t.grid.step);
    w.u32(static_cast<std::uint32_t>(t.grid.cells));
    w.f64(t.grid.requested_max);
    w.u8(t.cap_hit ? 1 : 0);
    w.f64(t.nmese);
    w.f64(t.nmese_std_error);
    w.vec(t.slot1_values);
    w.vec(t.slot1_rates);
    w.u64(t.slot1_switch.size());
    if (!t.slot1_switch.empty()) w.bytes(t.slot1_switch.data(), t.slot1_switch.size());

    for (int k = 2; k <= c.slots; ++k) {
        w.vec(t.jbar1[static_cast<std::size_t>(k)]);
        w.vec(t.jbar2[static_cast<std::size_t>(k)]);
    }
}

ValueTable load_table(const std::string& path) {
    Reader r(path);
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw IoError("not a policy file: " + path);
    const std::uint32_t version = r.u32();
    if (version != kVersion) throw IoError("unsupported policy file version");

    ValueTable t;
    SolverConfig& c = t.config;
    c.slots = static_cast<int>(r.u32());
    c.rate_per_slot = r.f64();
    c.grid_step = r.f64();
    c.n_scenarios = static_cast<int>(r.u32());
    c.seed = r.u64();
    c.interp = static_cast<InterpKind>(r.u8());
    c.inner.scan_cap = static_cast<int>(r.u32());
    c.inner.golden_iters = static_cast<int>(r.u32());
    c.value_cap = r.f64();
    if (r.u8()) c.channel.sr = read_dist(r);
    c.channel.sd = read_dist(r);
    c.channel.rd = read_dist(r);

    t.grid.step = r.f64();
    t.grid.cells = static_cast<int>(r.u32());
    t.grid.requested_max = r.f64();
    t.cap_hit = r.u8() != 0;
    t.nmese = r.f64();
    t.nmese_std_error = r.f64();
    t.slot1_values = r.vec();
    t.slot1_rates = r.vec();
    t.slot1_switch.resize(r.u64());
    if (!t.slot1_switch.empty()) r.bytes(t.slot1_switch.data(), t.slot1_switch.size());

    t.jbar1.resize(static_cast<std::size_t>(c.slots) + 1);
    t.jbar2.resize(static_cast<std::size_t>(c.slots) + 1);
    for (int k = 2; k <= c.slots; ++k) {
        t.jbar1[static_cast<std::size_t>(k)] = r.vec();
        t.jbar2[static_cast<std::size_t>(k)] = r.vec();
    }
    c.validate();
    t.scenarios = make_scenarios(c.channel, c.slots, c.n_scenarios, c.seed);
    return t;
}

nlohmann::json dist_to_json(const DistributionSpec& d) {
    nlohmann::json j;
    j["kind"] = to_string(d.kind);
    j["mean_snr"] = d.mean_snr;
    j["trunc"] = d.trunc;
    j["dof"] = d.dof;
    j["noncentrality"] = d.noncentrality;
    return j;
}

DistributionSpec dist_from_json(const nlohmann::json& j) {
    DistributionSpec d;
    d.kind = fading_kind_from_string(j.at("kind").get<std::string>());
    d.mean_snr = j.at("mean_snr").get<double>();
    d.trunc = j.value("trunc", 0.0);
    d.dof = j.value("dof", 2);
    d.noncentrality = j.value("noncentrality", 0.0);
    d.validate();
    return d;
}

nlohmann::json channel_to_json(const ChannelModel& c) {
    nlohmann::json j;
    j["sr"] = c.sr ? dist_to_json(*c.sr) : nlohmann::json(nullptr);
    j["sd"] = dist_to_json(c.sd);
    j["rd"] = dist_to_json(c.rd);
    return j;
}

nlohmann::json solver_config_to_json(const SolverConfig& c) {
    nlohmann::json j;
    j["slots"] = c.slots;
    j["rate_per_slot"] = c.rate_per_slot;
    j["grid_step"] = c.grid_step;
    j["n_scenarios"] = c.n_scenarios;
    j["seed"] = c.seed;
    j["interp"] = c.interp == InterpKind::Linear ? "linear" : "nearest";
    j["scan_cap"] = c.inner.scan_cap;
    j["golden_iters"] = c.inner.golden_iters;
    j["value_cap"] = c.value_cap;
    j["threads"] = c.threads;
    j["markov_order"] = c.markov_order;
    j["channel"] = channel_to_json(c.channel);
    return j;
}

nlohmann::json table_to_json(const ValueTable& t, bool include_tables) {
    nlohmann::json j;
    j["config"] = solver_config_to_json(t.config);
    j["grid"] = {{"step", t.grid.step},
                 {"cells", t.grid.cells},
                 {"max_info", t.grid.max_info()},
                 {"requested_max", t.grid.requested_max}};
    j["cap_hit"] = t.cap_hit;
    j["nmese"] = t.nmese;
    j["nmese_std_error"] = t.nmese_std_error;
    j["slot1"] = {{"values", t.slot1_values},
                  {"rates", t.slot1_rates},
                  {"switched", t.slot1_switch}};
    if (include_tables) {
        nlohmann::json tables = nlohmann::json::array();
        for (int k = 2; k <= t.config.slots; ++k) {
            tables.push_back({{"slot", k},
                              {"jbar_phase1", t.jbar1[static_cast<std::size_t>(k)]},
                              {"jbar_phase2", t.jbar2[static_cast<std::size_t>(k)]}});
        }
        j["tables"] = std::move(tables);
    }
    return j;
}

} // namespace relaydp
