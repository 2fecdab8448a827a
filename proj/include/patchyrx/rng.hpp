#ifndef PATCHYRX_RNG_HPP
#define PATCHYRX_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>

namespace patchyrx {

/// One step of the splitmix64 sequence; advances `state` and returns a
/// well-mixed 64-bit value. Used only for seeding.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace detail {

/// Ziggurat tables for the standard normal, 256 layers over |x|.
/// Layer widths xs[0] > xs[1] > ... > xs[255] = 0 satisfy the equal-area
/// recursion f(xs[i]) = f(xs[i-1]) + v/xs[i-1] with f(x) = exp(-x^2/2);
/// v is the common layer area and r = xs[0] is the tail start.
struct ZigguratTables {
    static constexpr int kLayers = 256;
    static constexpr double kScale = 9007199254740992.0;  // 2^53
    double w[kLayers];         // proposal scale per layer: x = mantissa * w[i]
    std::uint64_t k[kLayers];  // fast-accept threshold on the 53-bit mantissa
    double f[kLayers];         // f(xs[i]), increasing from f(r) to 1
    double x_prev[kLayers];    // xs[i-1] (layer width); x_prev[0] unused
    double r;                  // tail boundary
};

inline ZigguratTables build_ziggurat_tables() {
    constexpr int n = ZigguratTables::kLayers;
    auto gauss = [](double x) { return std::exp(-0.5 * x * x); };
    auto tail_area = [](double r) {
        return std::sqrt(M_PI / 2.0) * std::erfc(r / std::sqrt(2.0));
    };

    // Solve for the tail boundary r so that the layer stack closes exactly at
    // f = 1 after 256 equal-area layers. The residual is monotone in r.
    std::array<double, n> xs{};
    auto stack_residual = [&](double r) {
        double v = r * gauss(r) + tail_area(r);
        xs[0] = r;
        for (int i = 1; i < n - 1; ++i) {
            double y = gauss(xs[i - 1]) + v / xs[i - 1];
            if (y >= 1.0) return 1.0 + static_cast<double>(n - i);
            xs[i] = std::sqrt(-2.0 * std::log(y));
        }
        return gauss(xs[n - 2]) + v / xs[n - 2] - 1.0;
    };

    double lo = 3.0, hi = 4.2;
    for (int it = 0; it < 128; ++it) {
        double mid = 0.5 * (lo + hi);
        (stack_residual(mid) > 0.0 ? lo : hi) = mid;
    }
    double r = 0.5 * (lo + hi);
    stack_residual(r);
    xs[n - 1] = 0.0;

    ZigguratTables t{};
    t.r = r;
    double v = r * gauss(r) + tail_area(r);
    const double s = ZigguratTables::kScale;
    t.w[0] = (v / gauss(r)) / s;
    t.k[0] = static_cast<std::uint64_t>(s * r * gauss(r) / v);
    t.f[0] = gauss(r);
    t.x_prev[0] = 0.0;
    for (int i = 1; i < n; ++i) {
        t.w[i] = xs[i - 1] / s;
        t.k[i] = static_cast<std::uint64_t>(s * xs[i] / xs[i - 1]);
        t.f[i] = gauss(xs[i]);
        t.x_prev[i] = xs[i - 1];
    }
    t.f[n - 1] = 1.0;
    return t;
}

inline const ZigguratTables& ziggurat_tables() {
    static const ZigguratTables tables = build_ziggurat_tables();
    return tables;
}

}  // namespace detail

/// xoshiro256++ generator with a ziggurat standard-normal sampler.
/// Deterministic: a fixed seed (or fixed (seed, stream) pair) reproduces the
/// exact draw sequence on any run and any thread.
class Rng {
public:
    explicit Rng(std::uint64_t seed) { seed_state(seed); }

    /// Independent stream for a (seed, stream-index) pair; used to give each
    /// simulation realization its own generator so scheduling cannot change
    /// the draws any realization sees.
    static Rng for_stream(std::uint64_t seed, std::uint64_t stream) {
        Rng g(0);
        g.seed_state(seed ^ (0x9E3779B97F4A7C15ULL + stream * 0xBF58476D1CE4E5B9ULL));
        return g;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in (0, 1]; safe as a log() argument.
    double next_double_pos() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal draw via the 256-layer ziggurat; exact tail handling
    /// beyond the boundary layer via exponential rejection.
    double next_normal() {
        const auto& z = detail::ziggurat_tables();
        for (;;) {
            const std::uint64_t u = next_u64();
            const unsigned i = static_cast<unsigned>(u & 255u);
            const std::uint64_t m = u >> 11;
            const double x = static_cast<double>(m) * z.w[i];
            const bool neg = (u >> 8) & 1u;
            if (m < z.k[i]) return neg ? -x : x;
            if (i == 0) {
                double xt, yt;
                do {
                    xt = -std::log(next_double_pos()) / z.r;
                    yt = -std::log(next_double_pos());
                } while (yt + yt < xt * xt);
                return neg ? -(z.r + xt) : (z.r + xt);
            }
            const double y = z.f[i - 1] + next_double() * (z.f[i] - z.f[i - 1]);
            if (y < std::exp(-0.5 * x * x)) return neg ? -x : x;
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    void seed_state(std::uint64_t seed) {
        std::uint64_t st = seed;
        for (auto& word : s_) word = splitmix64(st);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    std::uint64_t s_[4];
};

}  // namespace patchyrx

#endif
