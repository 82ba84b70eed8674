#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace relaydp {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace detail

// Deterministic, splittable random stream (xoshiro256++ core).
//
// Streams are derived from a 64-bit key; sub(label) derives an
// independent child stream.  All stochastic code in the library takes a
// caller-owned stream, so parallel callers can carve out disjoint,
// reproducible sub-streams and nothing shares mutable state.
class RngStream {
  public:
    static RngStream seeded(std::uint64_t key) {
        RngStream r;
        r.key_ = key;
        std::uint64_t x = detail::splitmix64(key ^ 0x6a09e667f3bcc908ULL);
        for (auto& w : r.s_) {
            x = detail::splitmix64(x);
            w = x;
        }
        return r;
    }

    // Child stream derived from (key, label); independent of draws made
    // from this stream so far.
    RngStream sub(std::uint64_t label) const {
        return seeded(detail::splitmix64(key_ ^ detail::splitmix64(label)));
    }

    std::uint64_t key() const { return key_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl64(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = detail::rotl64(s_[3], 45);
        return result;
    }

    // Uniform on (0, 1]; never returns 0 so log() is always finite.
    double uniform01() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller.
    double normal() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

  private:
    std::uint64_t key_ = 0;
    std::array<std::uint64_t, 4> s_{};
};

// Fixed sub-stream labels, so different consumers of one base seed can
// never collide.
namespace stream_label {
inline constexpr std::uint64_t scenario = 0x5343454eULL;  // solver scenario sets
inline constexpr std::uint64_t eval = 0x4556414cULL;      // forward simulation
inline constexpr std::uint64_t phi_mc = 0x5048494dULL;    // Monte Carlo phi fallback
inline constexpr std::uint64_t closed_form = 0x434c4f53ULL;
} // namespace stream_label

} // namespace relaydp
