#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rsabc {

// Counter-based stream (Philox4x32-10). A stream is (key, counter); streams
// derived from the same master seed with distinct ids are independent, and a
// stream can be split into children without coordination. Draw sequences are
// fully determined by (master_seed, stream_id, draw index) and are identical
// across platforms: normals come from Box-Muller, never from the standard
// library's implementation-defined distributions.
class RandomStream {
public:
    RandomStream() : RandomStream(0, 0) {}

    RandomStream(uint64_t master_seed, uint64_t stream_id)
        : master_(master_seed), id_(stream_id) {
        uint64_t k = mix64(master_seed + 0x9E3779B97F4A7C15ULL * (stream_id + 1));
        key0_ = static_cast<uint32_t>(k);
        key1_ = static_cast<uint32_t>(k >> 32);
        ctr_[0] = ctr_[1] = ctr_[2] = ctr_[3] = 0;
        buf_pos_ = 4;
        have_cached_normal_ = false;
        cached_normal_ = 0.0;
    }

    // Independent child stream; children of distinct ids never collide in practice.
    RandomStream split(uint64_t child_id) const {
        uint64_t child_master = mix64(master_ ^ mix64(id_ + 0x632BE59BD9B4E019ULL));
        return RandomStream(child_master, child_id);
    }

    uint32_t next_u32() {
        if (buf_pos_ == 4) refill();
        return buf_[buf_pos_++];
    }

    uint64_t next_u64() {
        uint64_t lo = next_u32();
        uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    // [0, 1) with 53 random bits
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // {0, ..., n-1}; n > 0
    uint64_t uniform_index(uint64_t n) {
        return static_cast<uint64_t>(
            (static_cast<__uint128_t>(next_u64()) * n) >> 64);
    }

    double normal() {
        if (have_cached_normal_) {
            have_cached_normal_ = false;
            return cached_normal_;
        }
        double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        cached_normal_ = r * std::sin(a);
        have_cached_normal_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    double exponential(double rate) {
        return -std::log(1.0 - uniform()) / rate;
    }

    uint64_t master_seed() const { return master_; }
    uint64_t stream_id() const { return id_; }

private:
    static uint64_t mix64(uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    static void mul_hilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
        uint64_t p = static_cast<uint64_t>(a) * b;
        hi = static_cast<uint32_t>(p >> 32);
        lo = static_cast<uint32_t>(p);
    }

    void refill() {
        uint32_t c0 = ctr_[0], c1 = ctr_[1], c2 = ctr_[2], c3 = ctr_[3];
        uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            uint32_t hi0, lo0, hi1, lo1;
            mul_hilo(0xD2511F53u, c0, hi0, lo0);
            mul_hilo(0xCD9E8D57u, c2, hi1, lo1);
            uint32_t n0 = hi1 ^ c1 ^ k0;
            uint32_t n1 = lo1;
            uint32_t n2 = hi0 ^ c3 ^ k1;
            uint32_t n3 = lo0;
            c0 = n0; c1 = n1; c2 = n2; c3 = n3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        buf_[0] = c0; buf_[1] = c1; buf_[2] = c2; buf_[3] = c3;
        buf_pos_ = 0;
        if (++ctr_[0] == 0 && ++ctr_[1] == 0 && ++ctr_[2] == 0) ++ctr_[3];
    }

    uint64_t master_, id_;
    uint32_t key0_, key1_;
    uint32_t ctr_[4];
    uint32_t buf_[4];
    int buf_pos_;
    bool have_cached_normal_;
    double cached_normal_;
};

}  // namespace rsabc
