#include "subfrac/rng.hpp"

#include <cmath>
#include <mutex>

namespace subfrac {

namespace {

inline void philox_round(std::uint32_t c[4], const std::uint32_t k[2]) {
    constexpr std::uint64_t M0 = 0xD2511F53ull;
    constexpr std::uint64_t M1 = 0xCD9E8D57ull;
    const std::uint64_t p0 = M0 * c[0];
    const std::uint64_t p1 = M1 * c[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t r0 = hi1 ^ c[1] ^ k[0];
    const std::uint32_t r1 = lo1;
    const std::uint32_t r2 = hi0 ^ c[3] ^ k[1];
    const std::uint32_t r3 = lo0;
    c[0] = r0; c[1] = r1; c[2] = r2; c[3] = r3;
}

}  // namespace

void Philox::refill() {
    std::uint32_t c[4] = {ctr[0], ctr[1], ctr[2], ctr[3]};
    std::uint32_t k[2] = {key[0], key[1]};
    for (int r = 0; r < 10; ++r) {
        philox_round(c, k);
        k[0] += 0x9E3779B9u;
        k[1] += 0xBB67AE85u;
    }
    buf[0] = c[0]; buf[1] = c[1]; buf[2] = c[2]; buf[3] = c[3];
    idx = 0;
    if (++ctr[0] == 0) ++ctr[1];  // 64-bit block counter within the stream
}

namespace {

// Marsaglia-Tsang ziggurat tables for the standard normal, 128 layers.
struct ZigTables {
    std::uint32_t kn[128];
    double wn[128];
    double fn[128];

    ZigTables() {
        const double m = 2147483648.0;  // 2^31
        const double vn = 9.91256303526217e-3;
        double dn = 3.442619855899, tn = dn;
        double q = vn / std::exp(-0.5 * dn * dn);
        kn[0] = static_cast<std::uint32_t>((dn / q) * m);
        kn[1] = 0;
        wn[0] = q / m;
        wn[127] = dn / m;
        fn[0] = 1.0;
        fn[127] = std::exp(-0.5 * dn * dn);
        for (int i = 126; i >= 1; --i) {
            dn = std::sqrt(-2.0 * std::log(vn / dn + std::exp(-0.5 * dn * dn)));
            kn[i + 1] = static_cast<std::uint32_t>((dn / tn) * m);
            tn = dn;
            fn[i] = std::exp(-0.5 * dn * dn);
            wn[i] = dn / m;
        }
    }
};

const ZigTables& zig() {
    static const ZigTables t;
    return t;
}

}  // namespace

double ziggurat_normal(Philox& rng) {
    const ZigTables& t = zig();
    const double r = 3.442619855899;
    for (;;) {
        const std::int32_t hz = static_cast<std::int32_t>(rng.next_u32());
        const std::uint32_t iz = static_cast<std::uint32_t>(hz) & 127u;
        if (static_cast<std::uint32_t>(hz < 0 ? -static_cast<std::int64_t>(hz)
                                              : hz) < t.kn[iz])
            return hz * t.wn[iz];
        if (iz == 0) {
            // Tail beyond r via Marsaglia's exponential wrap.
            double x, y;
            do {
                x = -std::log(rng.next_unit()) / r;
                y = -std::log(rng.next_unit());
            } while (y + y < x * x);
            return hz > 0 ? r + x : -(r + x);
        }
        const double x = hz * t.wn[iz];
        if (t.fn[iz] + rng.next_unit() * (t.fn[iz - 1] - t.fn[iz]) <
            std::exp(-0.5 * x * x))
            return x;
    }
}

}  // namespace subfrac
