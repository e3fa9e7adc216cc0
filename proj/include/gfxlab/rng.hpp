#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace gfx {

/// Counter-based pseudo-random generator (Philox-4x64, 10 rounds).
///
/// The generator is a pure function of (seed, stream_id, counter), so a
/// stream is reproduced exactly by re-creating the state with the same
/// key, and two states with distinct stream_ids are independent without
/// any jump-ahead bookkeeping.  This is what lets Monte-Carlo replicas
/// run in parallel and still reduce to bit-identical totals.
class RngState {
public:
    explicit RngState(std::uint64_t seed, std::uint64_t stream_id = 0)
        : seed_(seed), stream_(stream_id) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    /// Next raw 64-bit word.
    std::uint64_t next_u64() {
        if (pos_ == 4) {
            fill_block();
            pos_ = 0;
        }
        return block_[pos_++];
    }

    /// Uniform on the open interval (0,1); 52-bit resolution, never 0 or 1.
    double uniform() {
        return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
    }

    double exponential(double rate = 1.0) {
        if (rate <= 0.0) throw std::invalid_argument("exponential: rate must be > 0");
        return -std::log(uniform()) / rate;
    }

    /// Standard normal via the Marsaglia polar method.  Rejection makes the
    /// uniform consumption per call variable, so determinism holds per
    /// stream, not per call index.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double v1, v2, s;
        do {
            v1 = 2.0 * uniform() - 1.0;
            v2 = 2.0 * uniform() - 1.0;
            s = v1 * v1 + v2 * v2;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v2 * f;
        has_spare_ = true;
        return v1 * f;
    }

private:
    void fill_block() {
        // Philox-4x64-10 (constants from the reference specification).
        constexpr std::uint64_t M0 = 0xD2E7470EE14C6C93ULL;
        constexpr std::uint64_t M1 = 0xCA5A826395121157ULL;
        constexpr std::uint64_t W0 = 0x9E3779B97F4A7C15ULL;
        constexpr std::uint64_t W1 = 0xBB67AE8584CAA73BULL;

        std::uint64_t x0 = ctr_lo_, x1 = ctr_hi_, x2 = seed_ ^ 0x7F4A7C159E3779B9ULL, x3 = stream_;
        std::uint64_t k0 = seed_, k1 = stream_;
        for (int round = 0; round < 10; ++round) {
            const auto p0 = mul128(M0, x0);
            const auto p1 = mul128(M1, x2);
            const std::uint64_t y0 = p1.hi ^ x1 ^ k0;
            const std::uint64_t y1 = p1.lo;
            const std::uint64_t y2 = p0.hi ^ x3 ^ k1;
            const std::uint64_t y3 = p0.lo;
            x0 = y0; x1 = y1; x2 = y2; x3 = y3;
            k0 += W0; k1 += W1;
        }
        block_[0] = x0; block_[1] = x1; block_[2] = x2; block_[3] = x3;
        if (++ctr_lo_ == 0) ++ctr_hi_;
    }

    struct U128 { std::uint64_t hi, lo; };
    static U128 mul128(std::uint64_t a, std::uint64_t b) {
        const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
        return {static_cast<std::uint64_t>(p >> 64), static_cast<std::uint64_t>(p)};
    }

    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::uint64_t ctr_lo_ = 0;
    std::uint64_t ctr_hi_ = 0;
    std::uint64_t block_[4] = {0, 0, 0, 0};
    int pos_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace gfx
