#include "relaydp/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "relaydp/errors.hpp"
#include "relaydp/special.hpp"

namespace relaydp {

const char* to_string(FadingKind k) {
    switch (k) {
        case FadingKind::TruncatedExponential: return "truncexp";
        case FadingKind::Rayleigh: return "rayleigh";
        case FadingKind::Rician: return "rician";
        case FadingKind::NoncentralChiSquared: return "chi2";
    }
    return "?";
}

FadingKind fading_kind_from_string(const std::string& name) {
    if (name == "truncexp") return FadingKind::TruncatedExponential;
    if (name == "rayleigh") return FadingKind::Rayleigh;
    if (name == "rician") return FadingKind::Rician;
    if (name == "chi2") return FadingKind::NoncentralChiSquared;
    throw ConfigError("unknown fading kind: " + name);
}

void DistributionSpec::validate() const {
    if (!(mean_snr > 0.0)) throw ConfigError("DistributionSpec: mean_snr must be > 0");
    if (!(trunc >= 0.0)) throw ConfigError("DistributionSpec: trunc must be >= 0");
    if (!(noncentrality >= 0.0)) throw ConfigError("DistributionSpec: noncentrality must be >= 0");
    if (kind == FadingKind::NoncentralChiSquared || kind == FadingKind::Rician) {
        if (dof < 2 || dof % 2 != 0) throw ConfigError("DistributionSpec: dof must be a positive even integer");
    }
    if (kind == FadingKind::Rician && !(noncentrality > 0.0))
        throw ConfigError("DistributionSpec: Rician requires noncentrality > 0");
}

DistributionSpec DistributionSpec::truncated_exponential(double mean, double trunc) {
    DistributionSpec d;
    d.kind = FadingKind::TruncatedExponential;
    d.mean_snr = mean;
    d.trunc = trunc;
    d.validate();
    return d;
}

DistributionSpec DistributionSpec::rayleigh(double mean) {
    DistributionSpec d;
    d.kind = FadingKind::Rayleigh;
    d.mean_snr = mean;
    d.validate();
    return d;
}

DistributionSpec DistributionSpec::rician(double mean, double lambda) {
    DistributionSpec d;
    d.kind = FadingKind::Rician;
    d.mean_snr = mean;
    d.dof = 2;
    d.noncentrality = lambda;
    d.validate();
    return d;
}

DistributionSpec DistributionSpec::chi_squared(double mean, int dof, double lambda) {
    DistributionSpec d;
    d.kind = FadingKind::NoncentralChiSquared;
    d.mean_snr = mean;
    d.dof = dof;
    d.noncentrality = lambda;
    d.validate();
    return d;
}

namespace {

// Noncentral chi-squared with v = 2s degrees of freedom and
// noncentrality lambda, built as sum_{i=1..s} |X_i|^2 with complex
// Gaussians (unit variance per real component); the noncentrality sits
// in the first component.  Raw mean is v + lambda.
double chi2_raw(int dof, double lambda, RngStream& rng) {
    const int s = dof / 2;
    const double delta = std::sqrt(lambda);
    double acc = 0.0;
    for (int i = 0; i < s; ++i) {
        const double re = rng.normal() + (i == 0 ? delta : 0.0);
        const double im = rng.normal();
        acc += re * re + im * im;
    }
    return acc;
}

} // namespace

double sample(const DistributionSpec& dist, RngStream& rng) {
    dist.validate();
    switch (dist.kind) {
        case FadingKind::TruncatedExponential:
            // Inversion: F(g) = 1 - exp(-(g - trunc)/mean) for g >= trunc.
            return dist.trunc - dist.mean_snr * std::log(rng.uniform01());
        case FadingKind::Rayleigh:
            return -dist.mean_snr * std::log(rng.uniform01());
        case FadingKind::Rician: {
            const double raw = chi2_raw(2, dist.noncentrality, rng);
            return raw * dist.mean_snr / (2.0 + dist.noncentrality);
        }
        case FadingKind::NoncentralChiSquared: {
            const double raw = chi2_raw(dist.dof, dist.noncentrality, rng);
            return raw * dist.mean_snr / (static_cast<double>(dist.dof) + dist.noncentrality);
        }
    }
    throw ConfigError("sample: unknown fading kind");
}

void ChannelModel::validate() const {
    if (sr) sr->validate();
    sd.validate();
    rd.validate();
}

LinkSnrTriple ChannelModel::sample_triple(RngStream& rng) const {
    LinkSnrTriple t;
    t.sr = sr ? sample(*sr, rng) : 0.0;
    t.sd = sample(sd, rng);
    t.rd = sample(rd, rng);
    return t;
}

ScenarioSet make_scenarios(const ChannelModel& channel, int slots, int n_per_slot,
                           std::uint64_t seed) {
    channel.validate();
    if (slots < 1) throw ConfigError("make_scenarios: slots must be >= 1");
    if (n_per_slot < 1) throw ConfigError("make_scenarios: n_per_slot must be >= 1");
    ScenarioSet set;
    set.slots = slots;
    set.seed = seed;
    set.draws.resize(static_cast<std::size_t>(slots));
    const RngStream base = RngStream::seeded(seed).sub(stream_label::scenario);
    for (int k = 0; k < slots; ++k) {
        auto& slot = set.draws[static_cast<std::size_t>(k)];
        slot.resize(static_cast<std::size_t>(n_per_slot));
        const RngStream per_slot = base.sub(static_cast<std::uint64_t>(k) + 1);
        for (int i = 0; i < n_per_slot; ++i) {
            RngStream r = per_slot.sub(static_cast<std::uint64_t>(i) + 1);
            slot[static_cast<std::size_t>(i)] = channel.sample_triple(r);
        }
    }
    return set;
}

double xi1(double mean, double trunc) {
    if (!(mean > 0.0)) throw ConfigError("xi1: mean must be > 0");
    if (!(trunc > 0.0)) throw ConfigError("xi1: trunc must be > 0");
    const double z = trunc / mean;
    return std::exp(z) * exp_integral_e1(z) / mean;
}

double phi2_asymptote(double mean_sd, double mean_rd) {
    if (!(mean_sd > 0.0) || !(mean_rd > 0.0)) throw ConfigError("phi2_asymptote: means must be > 0");
    return std::log1p(mean_sd / mean_rd) / mean_sd + std::log1p(mean_rd / mean_sd) / mean_rd;
}

namespace {

PhiEstimate closed(double value) {
    PhiEstimate p;
    p.bounded = true;
    p.value = value;
    p.closed_form = true;
    return p;
}

PhiEstimate unbounded_phi() {
    PhiEstimate p;
    p.bounded = false;
    p.closed_form = true;
    return p;
}

template <typename Draw>
PhiEstimate monte_carlo_phi(Draw&& draw, long n, std::uint64_t seed, bool fallback) {
    RngStream rng = RngStream::seeded(seed).sub(stream_label::phi_mc);
    double sum = 0.0, sumsq = 0.0;
    for (long i = 0; i < n; ++i) {
        const double v = draw(rng);
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = std::max(0.0, sumsq / static_cast<double>(n) - mean * mean);
    PhiEstimate p;
    p.bounded = true;
    p.value = mean;
    p.std_error = std::sqrt(var / static_cast<double>(n));
    p.closed_form = false;
    p.mc_fallback = fallback;
    return p;
}

// E[1/gamma] diverges exactly when the SNR density is bounded away from
// zero at the origin, i.e. for the v = 2 chi-squared family (Rayleigh,
// Rician) and the untruncated exponential.
bool phi1_diverges(const DistributionSpec& d) {
    switch (d.kind) {
        case FadingKind::TruncatedExponential: return d.trunc == 0.0;
        case FadingKind::Rayleigh: return true;
        case FadingKind::Rician: return true;
        case FadingKind::NoncentralChiSquared: return d.dof <= 2;
    }
    return false;
}

} // namespace

PhiEstimate phi1(const DistributionSpec& dist, long mc_draws, std::uint64_t mc_seed) {
    dist.validate();
    if (phi1_diverges(dist)) return unbounded_phi();
    switch (dist.kind) {
        case FadingKind::TruncatedExponential:
            return closed(xi1(dist.mean_snr, dist.trunc));
        case FadingKind::NoncentralChiSquared: {
            if (dist.noncentrality == 0.0) {
                // E[1/gamma] = 1/(v - 2) at raw mean v, rescaled to mean_snr.
                const double v = static_cast<double>(dist.dof);
                return closed(v / dist.mean_snr / (v - 2.0));
            }
            return monte_carlo_phi(
                [&](RngStream& r) { return 1.0 / sample(dist, r); }, mc_draws, mc_seed, false);
        }
        default:
            return monte_carlo_phi(
                [&](RngStream& r) { return 1.0 / sample(dist, r); }, mc_draws, mc_seed, false);
    }
}

PhiEstimate phi2(const DistributionSpec& dist_sd, const DistributionSpec& dist_rd,
                 long mc_draws, std::uint64_t mc_seed) {
    dist_sd.validate();
    dist_rd.validate();

    const auto rayleigh_like = [](const DistributionSpec& d) {
        return d.kind == FadingKind::Rayleigh ||
               (d.kind == FadingKind::TruncatedExponential && d.trunc == 0.0);
    };
    const bool both_truncexp = dist_sd.kind == FadingKind::TruncatedExponential &&
                               dist_rd.kind == FadingKind::TruncatedExponential;

    if (rayleigh_like(dist_sd) && rayleigh_like(dist_rd))
        return closed(phi2_asymptote(dist_sd.mean_snr, dist_rd.mean_snr));

    if (both_truncexp) {
        if (dist_sd.trunc == dist_rd.trunc && dist_sd.trunc > 0.0) {
            const double hm = 1.0 / (1.0 / dist_sd.mean_snr + 1.0 / dist_rd.mean_snr);
            return closed(xi1(dist_sd.mean_snr, dist_sd.trunc) + xi1(dist_rd.mean_snr, dist_rd.trunc) -
                          xi1(hm, dist_sd.trunc));
        }
        // Mismatched thresholds: closed form does not apply.
        auto p = monte_carlo_phi(
            [&](RngStream& r) {
                return 1.0 / std::max(sample(dist_sd, r), sample(dist_rd, r));
            },
            mc_draws, mc_seed, true);
        return p;
    }

    return monte_carlo_phi(
        [&](RngStream& r) { return 1.0 / std::max(sample(dist_sd, r), sample(dist_rd, r)); },
        mc_draws, mc_seed, false);
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Bounded: return "BOUNDED";
        case Verdict::Unbounded: return "UNBOUNDED";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

BoundednessReport boundedness_report(const DistributionSpec& sr, const DistributionSpec& sd,
                                     const DistributionSpec& rd) {
    sr.validate();
    BoundednessReport rep;
    rep.phi1_sd = phi1(sd);
    rep.phi2_sd_rd = phi2(sd, rd);
    rep.no_relay = rep.phi1_sd.bounded ? Verdict::Bounded : Verdict::Unbounded;
    rep.relay = rep.phi2_sd_rd.bounded ? Verdict::Bounded : Verdict::Inconclusive;
    return rep;
}

} // namespace relaydp
