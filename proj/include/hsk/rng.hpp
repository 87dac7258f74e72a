#pragma once

#include <cstdint>

#include "hsk/types.hpp"

namespace hsk {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen over <random> engines because
// every simulator draw must replay bit-identically across platforms and
// standard library distributions are implementation-defined.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 bits of mantissa.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform in [0, n) via rejection sampling, exact for any n > 0.
    std::uint64_t next_below(std::uint64_t n);

    Bytes next_bytes(std::size_t count);

private:
    std::uint64_t state_;
};

// Independent, documented sub-streams of a scenario seed. Keeping the
// purposes on separate streams means e.g. adding an extra key exchange does
// not shift the placement of later random events.
enum class Stream : std::uint64_t {
    placement = 1,
    events = 2,
    key_exchange = 3,
    session_keys = 4,
    initiator = 5,
    sweep = 6,
};

std::uint64_t derive_seed(std::uint64_t base, Stream stream);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream_id);

}  // namespace hsk
