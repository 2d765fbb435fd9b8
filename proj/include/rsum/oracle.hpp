#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>

// Ground truth for every other algorithm in this library: a fixed-point
// superaccumulator wide enough to add any number of doubles exactly, plus
// correctly rounded readout and exact sign.
//
// Representation: value = sum of limbs[i] * 2^(32*i - 1074). Limbs are
// signed 64-bit and accumulate lazily; each term touches at most three
// limbs with 32-bit chunks, so about 2^30 terms fit before any limb can
// overflow, at which point carries are propagated. The span covers
// 2^-1074 through 2^1023 with 142 bits of headroom on top, enough for
// 2^63 terms of the largest magnitude.
//
// This file decodes IEEE bits by hand and composes via std::ldexp on
// purpose: the rest of the library must be testable against an oracle
// that shares none of its code paths.

namespace rsum {

class superaccumulator {
  public:
    static constexpr int limb_count = 70;
    static constexpr int offset = 1074;  // bit index of 2^0

    superaccumulator() { limbs_.fill(0); }

    void add(double x) {
        if (!std::isfinite(x))
            throw std::invalid_argument("superaccumulator: non-finite input");
        ++count_;
        if (x == 0.0) return;
        std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
        std::uint64_t frac = bits & 0x000F'FFFF'FFFF'FFFFull;
        int e = int((bits >> 52) & 0x7FF);
        // value = m * 2^(pos - 1074 + 52 - 52); pos is the bit index of the
        // mantissa's least significant bit, 0 for subnormals
        std::uint64_t m = e ? (frac | (1ull << 52)) : frac;
        int pos = e ? e - 1 : 0;
        int limb = pos >> 5;
        int shift = pos & 31;
        unsigned __int128 wide = (unsigned __int128)m << shift;  // at most 84 bits
        std::int64_t c0 = std::int64_t(std::uint32_t(wide));
        std::int64_t c1 = std::int64_t(std::uint32_t(wide >> 32));
        std::int64_t c2 = std::int64_t(std::uint32_t(wide >> 64));
        if (bits >> 63) {
            limbs_[limb] -= c0;
            limbs_[limb + 1] -= c1;
            limbs_[limb + 2] -= c2;
        } else {
            limbs_[limb] += c0;
            limbs_[limb + 1] += c1;
            limbs_[limb + 2] += c2;
        }
        if (++pending_ >= normalize_interval) normalize();
    }

    // exact: limb-wise addition; both sides stay far from 64-bit overflow
    void merge(const superaccumulator& other) {
        for (int i = 0; i < limb_count; ++i) limbs_[i] += other.limbs_[i];
        count_ += other.count_;
        normalize();
    }

    std::uint64_t count() const { return count_; }

    int sign() const {
        canonical c = propagate();
        if (c.carry < 0) return -1;
        return c.top >= 0 ? 1 : 0;
    }

    bool is_zero() const { return sign() == 0; }

    // round-to-nearest-even double of the exact value
    double round() const {
        canonical c = propagate();
        if (c.carry == 0 && c.top < 0) return 0.0;
        bool neg = c.carry < 0;
        if (neg) {
            // two's complement negate to get the magnitude
            std::uint64_t borrow = 1;
            for (int i = 0; i < limb_count; ++i) {
                std::uint64_t v = (~c.limb[i] & 0xFFFF'FFFFull) + borrow;
                c.limb[i] = v & 0xFFFF'FFFFull;
                borrow = v >> 32;
            }
            c.top = limb_count - 1;
            while (c.top >= 0 && c.limb[c.top] == 0) --c.top;
            if (c.top < 0) return -0.0;  // not reachable within the headroom bound
        }
        int highest = 32 * c.top + std::bit_width(std::uint32_t(c.limb[c.top])) - 1;
        // keep 53 bits from the top, or everything down to bit 0 when the
        // result lands in the subnormal range (those cases are exact)
        int p = highest > 52 ? highest - 52 : 0;
        std::uint64_t mantissa = 0;
        for (int b = highest; b >= p; --b) mantissa = (mantissa << 1) | bit(c.limb, b);
        bool round_bit = p > 0 && bit(c.limb, p - 1);
        bool sticky = false;
        for (int b = 0; b < p - 1 && !sticky; b += 32) {
            std::uint64_t chunk = c.limb[b >> 5];
            int remaining = (p - 1) - b;
            if (remaining < 32) chunk &= (1ull << remaining) - 1;
            sticky = chunk != 0;
        }
        if (round_bit && (sticky || (mantissa & 1))) ++mantissa;
        double r = std::ldexp(double(mantissa), p - offset);
        return neg ? -r : r;
    }

  private:
    static constexpr std::uint64_t normalize_interval = 1ull << 30;

    struct canonical {
        std::array<std::uint64_t, limb_count> limb;
        int carry;  // sign extension beyond the top limb: 0 or -1
        int top;    // index of the highest nonzero limb, -1 if none
    };

    void normalize() {
        std::int64_t carry = 0;
        for (int i = 0; i < limb_count; ++i) {
            std::int64_t v = limbs_[i] + carry;
            limbs_[i] = v & 0xFFFF'FFFFll;
            carry = v >> 32;  // arithmetic shift keeps the sign
        }
        // the final carry is the sign extension; keep it in the top limb
        limbs_[limb_count - 1] += carry << 32;
        pending_ = 0;
    }

    canonical propagate() const {
        canonical c{};
        std::int64_t carry = 0;
        for (int i = 0; i < limb_count; ++i) {
            std::int64_t v = limbs_[i] + carry;
            c.limb[i] = std::uint64_t(v) & 0xFFFF'FFFFull;
            carry = v >> 32;
        }
        c.carry = int(carry);
        c.top = limb_count - 1;
        while (c.top >= 0 && c.limb[c.top] == 0) --c.top;
        return c;
    }

    static std::uint64_t bit(const std::array<std::uint64_t, limb_count>& limb, int b) {
        return (limb[b >> 5] >> (b & 31)) & 1;
    }

    std::array<std::int64_t, limb_count> limbs_;
    std::uint64_t count_ = 0;
    std::uint64_t pending_ = 0;
};

struct exact_result {
    double rounded;
    bool exact_is_zero;
};

template <class Seq>
exact_result exact_sum(const Seq& a) {
    superaccumulator acc;
    for (double x : a) acc.add(x);
    return {acc.round(), acc.is_zero()};
}

template <class Seq>
int exact_sign(const Seq& a) {
    superaccumulator acc;
    for (double x : a) acc.add(x);
    return acc.sign();
}

// |approx - exact| / |exact|; +inf when exact = 0 and approx != 0, 0 when both zero
template <class Seq>
double relative_error(double approx, const Seq& a) {
    superaccumulator acc;
    for (double x : a) acc.add(x);
    if (acc.is_zero())
        return approx == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    double exact = acc.round();
    acc.add(-approx);
    double diff = std::fabs(acc.round());
    return diff / std::fabs(exact);
}

}  // namespace rsum
