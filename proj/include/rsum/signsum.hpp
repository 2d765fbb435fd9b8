#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rsum/accumulators.hpp"
#include "rsum/fpbits.hpp"

// Exact sign of a sum. Positive terms and magnitudes of negative terms are
// kept in two descending lists; each round replaces the leading pair by
// exactly representable differences until a termination bound decides the
// sign. Every subtraction below is exact: the equal-exponent case is a
// Sterbenz difference, and the power-of-two split cases subtract a power
// that lies on the operand's grid (guarded by the list-size bound).

namespace rsum {

struct sign_result {
    int sign;                  // -1, 0, +1
    bool exact;
    std::uint64_t iterations;  // rounds of the reduction loop
};

namespace detail {

template <class F>
void insert_desc(std::vector<F>& list, F x) {
    list.insert(std::upper_bound(list.begin(), list.end(), x, std::greater<F>()), x);
}

// compare lead >= count * 2^(e+1) without overflow: scale into the double
// domain, where underflow can only push an already-losing value lower
template <class F>
bool lead_dominates(F lead, std::size_t count, int e) {
    double scaled = mul_pow2(double(lead), -(e + 1));
    return scaled >= double(count);
}

}  // namespace detail

template <class F>
sign_result essa_sign(std::span<const F> values) {
    std::vector<F> a, b;  // positives, magnitudes of negatives
    a.reserve(values.size());
    b.reserve(values.size());
    for (F x : values) {
        if (x == F(0)) continue;
        if (classify(x) == float_class::infinite || classify(x) == float_class::nan)
            throw std::invalid_argument("essa_sign: non-finite input");
        if (x > F(0))
            a.push_back(x);
        else
            b.push_back(-x);
    }
    std::sort(a.begin(), a.end(), std::greater<F>());
    std::sort(b.begin(), b.end(), std::greater<F>());

    const std::uint64_t cap = (std::uint64_t(values.size()) + 8) * 4400 + 10000;
    std::uint64_t rounds = 0;
    for (;;) {
        if (a.empty() && b.empty()) return {0, true, rounds};
        if (b.empty()) return {1, true, rounds};
        if (a.empty()) return {-1, true, rounds};

        int e1 = floor_log2(a.front());
        int f1 = floor_log2(b.front());
        // a_1 alone outweighs every negative term, or the mirror image
        if (detail::lead_dominates(a.front(), b.size(), f1)) return {1, true, rounds};
        if (detail::lead_dominates(b.front(), a.size(), e1)) return {-1, true, rounds};

        if (++rounds > cap)
            throw std::runtime_error("essa_sign: round cap exceeded");

        F a1 = a.front(), b1 = b.front();
        a.erase(a.begin());
        b.erase(b.begin());
        if (e1 == f1) {
            if (a1 >= b1) {
                F ap = a1 - b1;  // Sterbenz: exact
                if (ap != F(0)) detail::insert_desc(a, ap);
            } else {
                F bp = b1 - a1;
                if (bp != F(0)) detail::insert_desc(b, bp);
            }
        } else if (e1 > f1) {
            // the dominance test failed, so 2^(e1-f1-1) < |b-list|, which
            // bounds the exponent gap and keeps u on a_1's grid
            assert(e1 - f1 - 1 <= fp_format<F>::mantissa_bits);
            F u = mul_pow2(F(1), f1 + 1);
            F ap = a1 - u;       // grid-aligned: exact
            F app = u - b1;      // Sterbenz: exact
            if (ap != F(0)) detail::insert_desc(a, ap);
            if (app != F(0)) detail::insert_desc(a, app);
        } else {
            assert(f1 - e1 - 1 <= fp_format<F>::mantissa_bits);
            F v = mul_pow2(F(1), e1 + 1);
            F bp = b1 - v;
            F bpp = v - a1;
            if (bp != F(0)) detail::insert_desc(b, bp);
            if (bpp != F(0)) detail::insert_desc(b, bpp);
        }
    }
}

// sign of the folded bucket sum: fast, usually right, never guaranteed
template <class F>
sign_result hash_sign(std::span<const F> values) {
    auto rep = bucket_sum_recursive(values);
    int s = (rep.sum > F(0)) - (rep.sum < F(0));
    return {s, false, 0};
}

}  // namespace rsum
