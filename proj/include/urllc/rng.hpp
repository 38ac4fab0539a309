#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>

namespace urllc {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Combine a base seed with a stream tag into an independent seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream)
{
    return splitmix64(base ^ splitmix64(stream + 0x6a09e667f3bcc909ULL));
}

/// mt19937_64 core with hand-rolled output transforms. The standard fully
/// specifies the engine but not the distributions, so uniform/normal are
/// implemented here to keep runs reproducible across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    /// Uniform double in [0, 1), 53 significant bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller, one spare cached.
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log1p(-u1)); // log(1-u1), u1<1
        double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Uniform index in [0, n). Modulo bias is < n / 2^64, irrelevant here.
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }

    /// Engine state as decimal text (the cached normal spare is dropped).
    friend std::ostream& operator<<(std::ostream& os, const Rng& r) { return os << r.gen_; }
    friend std::istream& operator>>(std::istream& is, Rng& r)
    {
        r.has_spare_ = false;
        return is >> r.gen_;
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace urllc
