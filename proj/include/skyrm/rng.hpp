#pragma once
#include <cmath>
#include <cstdint>
#include <string>

#include "skyrm/sha256.hpp"

namespace skyrm {

// Philox4x32-10 counter RNG (Salmon et al., SC'11). Key = master seed,
// counter = (stream id, block index). Streams are independent for distinct
// ids, so sweep points may be evaluated in any order or in parallel and still
// draw identical values.
class Philox {
  public:
    Philox(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    std::uint32_t next_u32() {
        if (have_ == 0) {
            block(out_);
            ++blk_;
            have_ = 4;
        }
        return out_[4 - have_--];
    }

    std::uint64_t next_u64() {
        const std::uint64_t hi = next_u32();
        return hi << 32 | next_u32();
    }

    // Uniform in [0,1) with 53 random bits.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Box-Muller; caches the second variate.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

    double normal(double mu, double sigma) { return mu + sigma * normal(); }

    // Stream id from a canonical parameter-tuple string, e.g.
    // "dephasing|m=80|sigma=1.5". Documented splitting rule: SHA-256 of the
    // tuple, first 8 bytes big-endian.
    static std::uint64_t stream_of(const std::string& param_tuple) {
        return Sha256::hash64(param_tuple);
    }

    // Raw 10-round keyed bijection; exposed for known-answer tests.
    static void rounds(const std::uint32_t ctr[4], const std::uint32_t key[2],
                       std::uint32_t out[4]) {
        std::uint32_t c0 = ctr[0], c1 = ctr[1], c2 = ctr[2], c3 = ctr[3];
        std::uint32_t k0 = key[0], k1 = key[1];
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t(0xD2511F53u) * c0;
            const std::uint64_t p1 = std::uint64_t(0xCD9E8D57u) * c2;
            const std::uint32_t n0 = std::uint32_t(p1 >> 32) ^ c1 ^ k0;
            const std::uint32_t n1 = std::uint32_t(p1);
            const std::uint32_t n2 = std::uint32_t(p0 >> 32) ^ c3 ^ k1;
            const std::uint32_t n3 = std::uint32_t(p0);
            c0 = n0; c1 = n1; c2 = n2; c3 = n3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        out[0] = c0; out[1] = c1; out[2] = c2; out[3] = c3;
    }

  private:
    void block(std::uint32_t out[4]) const {
        const std::uint32_t ctr[4] = {std::uint32_t(stream_), std::uint32_t(stream_ >> 32),
                                      std::uint32_t(blk_), std::uint32_t(blk_ >> 32)};
        const std::uint32_t key[2] = {std::uint32_t(seed_), std::uint32_t(seed_ >> 32)};
        rounds(ctr, key, out);
    }

    std::uint64_t seed_, stream_;
    std::uint64_t blk_ = 0;
    std::uint32_t out_[4] = {0, 0, 0, 0};
    int have_ = 0;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

} // namespace skyrm
