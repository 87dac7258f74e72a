#include "hsk/rng.hpp"

namespace hsk {

std::uint64_t SplitMix64::next_below(std::uint64_t n) {
    if (n == 0) throw Error("next_below: n must be positive");
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
        const std::uint64_t r = next();
        if (r >= threshold) return r % n;
    }
}

Bytes SplitMix64::next_bytes(std::size_t count) {
    Bytes out;
    out.reserve(count);
    while (out.size() < count) {
        std::uint64_t word = next();
        for (int i = 0; i < 8 && out.size() < count; ++i) {
            out.push_back(static_cast<std::uint8_t>(word & 0xFF));
            word >>= 8;
        }
    }
    return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream_id) {
    SplitMix64 gen(base ^ (stream_id * 0x9E3779B97F4A7C15ULL));
    return gen.next();
}

std::uint64_t derive_seed(std::uint64_t base, Stream stream) {
    return derive_seed(base, static_cast<std::uint64_t>(stream));
}

}  // namespace hsk
