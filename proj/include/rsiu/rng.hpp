#pragma once
// Counter-based random streams. A stream is addressed by (seed, purpose,
// replication, unit, stage); the same address always reproduces the same
// draws and distinct addresses give statistically independent sequences,
// so parallel replications need no shared generator state. Common random
// numbers are obtained by addressing the same stream from every design.

#include <cmath>
#include <cstdint>

namespace rsiu {

namespace detail {
// splitmix64 finalizer (Steele, Lea, Flood 2014).
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}
} // namespace detail

// Stream roles; keeps sub-streams of one replication disjoint by construction.
enum class StreamUse : std::uint64_t {
    Data = 1,
    Sim = 2,
    PilotData = 3,
    PilotSim = 4,
    Oracle = 5,
    Misc = 6,
};

// Design slot used when all designs share one stream (CRN).
inline constexpr std::uint64_t kCrnUnit = 0xFFFFFFFFull;

struct StreamKey {
    std::uint64_t seed = 0;
    StreamUse use = StreamUse::Misc;
    std::uint64_t replication = 0;
    std::uint64_t unit = 0;  // design or input-block index, or kCrnUnit
    std::uint64_t stage = 0;

    std::uint64_t state() const {
        std::uint64_t h = detail::mix64(seed);
        h = detail::mix64(h ^ static_cast<std::uint64_t>(use));
        h = detail::mix64(h ^ replication);
        h = detail::mix64(h ^ unit);
        h = detail::mix64(h ^ stage);
        return h;
    }
};

class RngStream {
public:
    RngStream() : base_(0) {}
    explicit RngStream(const StreamKey& key) : base_(key.state()) {}
    explicit RngStream(std::uint64_t raw_state) : base_(raw_state) {}

    std::uint64_t next_u64() { return detail::mix64(base_ + (++counter_) * 0x9e3779b97f4a7c15ull); }

    // Uniform on (0,1]: never 0, so -log(u) is finite.
    double next_open_closed() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Uniform on [0,1).
    double next_halfopen() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double exponential(double mean) { return -mean * std::log(next_open_closed()); }

    // Box-Muller; pairs cached within the stream object.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_open_closed();
        double u2 = next_halfopen();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

private:
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace rsiu
