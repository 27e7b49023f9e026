#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace htqc {

// splitmix64 step; used for seeding and stream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ with counter-based stream derivation: a stream is keyed by
// (seed, id0, id1, id2) and is independent of how other streams are consumed,
// so replications can be merged in any order with bit-identical results.
class RngStream {
public:
    RngStream() : RngStream(0, {}) {}

    RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
        std::uint64_t key = seed;
        std::uint64_t mix = splitmix64(key);
        for (std::uint64_t id : ids) {
            key = mix ^ (id + 0x9e3779b97f4a7c15ULL);
            mix = splitmix64(key);
        }
        std::uint64_t st = mix;
        for (auto& w : state_) w = splitmix64(st);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0,1), 53-bit resolution.
    double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]; safe as a log() argument.
    double u01_pos() { return 1.0 - u01(); }

    // Standard normal via a 128-layer ziggurat; the rejection fixups are rare
    // enough that the common path costs one draw and one compare.
    double normal() {
        const Ziggurat& z = ziggurat();
        for (;;) {
            const std::uint64_t u = next_u64();
            const std::int32_t hz = static_cast<std::int32_t>(u & 0xffffffffu);
            const std::uint32_t iz = static_cast<std::uint32_t>(u >> 32) & 127u;
            const std::uint32_t az =
                hz < 0 ? static_cast<std::uint32_t>(-static_cast<std::int64_t>(hz))
                       : static_cast<std::uint32_t>(hz);
            if (az < z.kn[iz]) return hz * z.wn[iz];
            if (iz == 0) { // tail beyond the base strip
                double x, y;
                do {
                    x = -std::log(u01_pos()) / z.rtail;
                    y = -std::log(u01_pos());
                } while (y + y < x * x);
                return hz > 0 ? z.rtail + x : -(z.rtail + x);
            }
            const double x = hz * z.wn[iz];
            if (z.fn[iz] + u01() * (z.fn[iz - 1] - z.fn[iz]) < std::exp(-0.5 * x * x))
                return x;
        }
    }

    // Exponential with mean 1.
    double exponential() { return -std::log(u01_pos()); }

    // Gamma(shape, scale) by Marsaglia-Tsang; shape < 1 via the boost trick.
    double gamma(double shape, double scale) {
        if (shape < 1.0) {
            const double u = u01_pos();
            return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = u01_pos();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    struct Ziggurat {
        std::uint32_t kn[128];
        double wn[128];
        double fn[128];
        double rtail;
    };

    static const Ziggurat& ziggurat() {
        static const Ziggurat z = [] {
            Ziggurat t{};
            const double m1 = 2147483648.0;
            double dn = 3.442619855899, tn = dn;
            const double vn = 9.91256303526217e-3;
            t.rtail = dn;
            const double q = vn / std::exp(-0.5 * dn * dn);
            t.kn[0] = static_cast<std::uint32_t>((dn / q) * m1);
            t.kn[1] = 0;
            t.wn[0] = q / m1;
            t.wn[127] = dn / m1;
            t.fn[0] = 1.0;
            t.fn[127] = std::exp(-0.5 * dn * dn);
            for (int i = 126; i >= 1; --i) {
                dn = std::sqrt(-2.0 * std::log(vn / dn + std::exp(-0.5 * dn * dn)));
                t.kn[i + 1] = static_cast<std::uint32_t>((dn / tn) * m1);
                tn = dn;
                t.fn[i] = std::exp(-0.5 * dn * dn);
                t.wn[i] = dn / m1;
            }
            return t;
        }();
        return z;
    }

    std::uint64_t state_[4];
};

} // namespace htqc
