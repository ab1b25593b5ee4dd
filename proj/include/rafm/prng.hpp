#pragma once

#include <cstdint>
#include <cmath>

namespace rafm {

// Counter-based PRNG (Philox2x64-10). Streams are carved out of the 128-bit
// counter space: stream id s occupies counters [s*2^64, (s+1)*2^64), so two
// distinct streams of the same seed cannot collide in fewer than 2^64 blocks.
// Output is reproducible bit-for-bit for a given (seed, stream) on any
// platform with 64-bit integers.
class Prng {
public:
    explicit Prng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix64(seed)), ctr_lo_(0), ctr_hi_(stream), seed_(seed), stream_(stream) {}

    // Independent sub-stream of the same seed.
    Prng split(std::uint64_t stream_id) const { return Prng(seed_, stream_id); }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t next_u64() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        std::uint64_t x0 = ctr_lo_, x1 = ctr_hi_, k = key_;
        for (int round = 0; round < 10; ++round) {
            unsigned __int128 prod = static_cast<unsigned __int128>(kMult) * x0;
            std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
            std::uint64_t lo = static_cast<std::uint64_t>(prod);
            x0 = hi ^ k ^ x1;
            x1 = lo;
            k += kWeyl;
        }
        if (++ctr_lo_ == 0) ++ctr_hi_;
        spare_ = x1;
        have_ = true;
        return x0;
    }

    // Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]; safe as a log() argument and as the empirical-CDF
    // inversion variable.
    double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // Standard normal via Box-Muller; the second variate of each pair is cached.
    double gaussian() {
        if (have_gauss_) {
            have_gauss_ = false;
            return spare_gauss_;
        }
        double u1 = uniform_pos();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * kPi * u2;
        spare_gauss_ = r * std::sin(a);
        have_gauss_ = true;
        return r * std::cos(a);
    }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        // rejection on the top of the range keeps the draw unbiased
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t x = next_u64();
            if (x >= threshold) return x % n;
        }
    }

private:
    static constexpr std::uint64_t kMult = 0xD2B74407B1CE6E93ull;
    static constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ull;
    static constexpr double kPi = 3.14159265358979323846;

    // splitmix64 finalizer; decorrelates nearby seeds
    static std::uint64_t mix64(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t ctr_lo_, ctr_hi_;
    std::uint64_t seed_, stream_;
    std::uint64_t spare_ = 0;
    bool have_ = false;
    double spare_gauss_ = 0.0;
    bool have_gauss_ = false;
};

} // namespace rafm
