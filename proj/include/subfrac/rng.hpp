// Counter-based RNG (Philox4x32-10) and a ziggurat normal sampler.
//
// Every Monte Carlo path owns its own stream, keyed by (seed, path index),
// so results are bitwise independent of how paths are distributed across
// threads.  The ziggurat (128-layer Marsaglia-Tsang construction) is used
// instead of Box-Muller because the acceptance-scale simulations draw
// ~1e10 normals on a single core.

#pragma once

#include <cstdint>

namespace subfrac {

struct Philox {
    std::uint32_t key[2];
    std::uint32_t ctr[4];   // (block_lo, block_hi, stream_lo, stream_hi)
    std::uint32_t buf[4];
    int idx = 4;

    Philox(std::uint64_t seed, std::uint64_t stream) {
        key[0] = static_cast<std::uint32_t>(seed);
        key[1] = static_cast<std::uint32_t>(seed >> 32);
        ctr[0] = 0;
        ctr[1] = 0;
        ctr[2] = static_cast<std::uint32_t>(stream);
        ctr[3] = static_cast<std::uint32_t>(stream >> 32);
    }

    void refill();

    std::uint32_t next_u32() {
        if (idx >= 4) refill();
        return buf[idx++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform on (0,1), never exactly 0 or 1 (safe for log()).
    double next_unit() {
        return (next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }
};

// Standard normal draw from the given stream.
double ziggurat_normal(Philox& rng);

}  // namespace subfrac
