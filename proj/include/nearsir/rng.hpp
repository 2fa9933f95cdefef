#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace nearsir {

//! Philox4x64-10 counter-based generator (Salmon, Moraes, Dror, Shaw 2011).
//!
//! A stream is addressed by (seed, stream): the two 64-bit key words. Distinct
//! streams are statistically independent, so a replica can draw from
//! (master_seed, replica_index) and get the same numbers no matter which thread
//! runs it or in what order. Output is pinned by known-answer tests against
//! numpy.random.Philox, word for word.
class PhiloxRng {
public:
    using result_type = std::uint64_t;

    explicit PhiloxRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key0_(seed), key1_(stream) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }

    result_type operator()() { return next_u64(); }

    std::uint64_t next_u64() {
        if (pos_ == 4) {
            fill_block();
            pos_ = 0;
        }
        return out_[pos_++];
    }

    //! uniform on [0,1), 53 random bits
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    //! uniform on (0,1], safe as a log() argument
    double next_double_pos() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    //! Exp(rate); +inf when rate == 0
    double exponential(double rate) {
        if (rate <= 0.0) return std::numeric_limits<double>::infinity();
        return -std::log(next_double_pos()) / rate;
    }

    //! unbiased integer in [0, bound), bound >= 1, by rejection from the top
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    bool bernoulli(double p) { return next_double() < p; }

private:
    static constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ull;
    static constexpr std::uint64_t kMult1 = 0xCA5A826395121157ull;
    static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
    static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

    static std::uint64_t mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi) {
        const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
        hi = static_cast<std::uint64_t>(p >> 64);
        return static_cast<std::uint64_t>(p);
    }

    void fill_block() {
        std::uint64_t x0 = ctr_[0], x1 = ctr_[1], x2 = ctr_[2], x3 = ctr_[3];
        std::uint64_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            std::uint64_t hi0, hi1;
            const std::uint64_t lo0 = mulhilo(kMult0, x0, hi0);
            const std::uint64_t lo1 = mulhilo(kMult1, x2, hi1);
            const std::uint64_t y0 = hi1 ^ x1 ^ k0;
            const std::uint64_t y2 = hi0 ^ x3 ^ k1;
            x0 = y0;
            x1 = lo1;
            x2 = y2;
            x3 = lo0;
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        out_[0] = x0;
        out_[1] = x1;
        out_[2] = x2;
        out_[3] = x3;
        if (++ctr_[0] == 0 && ++ctr_[1] == 0 && ++ctr_[2] == 0) ++ctr_[3];
    }

    std::uint64_t key0_, key1_;
    std::uint64_t ctr_[4] = {0, 0, 0, 0};
    std::uint64_t out_[4] = {0, 0, 0, 0};
    int pos_ = 4;
};

//! Poisson(mean) by Knuth's product-of-uniforms. Fine for the small means used
//! here (degree distributions); do not use for mean >> 50.
inline int sample_poisson(PhiloxRng& rng, double mean) {
    const double limit = std::exp(-mean);
    int k = 0;
    double prod = rng.next_double_pos();
    while (prod > limit) {
        ++k;
        prod *= rng.next_double_pos();
    }
    return k;
}

//! Binomial(n, p) as n Bernoulli trials; intended for small n.
inline int sample_binomial(PhiloxRng& rng, int n, double p) {
    int hits = 0;
    for (int i = 0; i < n; ++i)
        if (rng.next_double() < p) ++hits;
    return hits;
}

//! Stream ids keep every sampling purpose on its own counter sequence:
//! high bits name the purpose, low bits the replica. Results then depend
//! only on (master seed, purpose, replica), never on thread scheduling.
enum class StreamChannel : std::uint64_t {
    Experiment = 0, // experiment-level draws (degree recipes, reference seeding)
    Replica = 1,    // one stream per epidemic replica
    Component = 2,  // one stream per sampled graph in component studies
    Realisation = 3 // one stream per fixed-randomness realisation (threshold sweeps)
};

inline std::uint64_t stream_id(StreamChannel channel, std::uint64_t index) {
    return (static_cast<std::uint64_t>(channel) << 48) | index;
}

} // namespace nearsir
