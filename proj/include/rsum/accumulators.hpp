#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsum/fpbits.hpp"
#include "rsum/oracle.hpp"

// The summation algorithms: naive, compensated, and the two per-exponent
// bucket variants, plus table folding, merging, and a cancellation measure.

namespace rsum {

template <class F>
struct sum_report {
    F sum = F(0);
    std::string algorithm;
    std::uint64_t n_terms = 0;
    std::optional<F> error_estimate;  // compensated residual, when present
    std::optional<std::vector<std::uint64_t>> level_histogram;
    bool overflow = false;
    bool saw_nan = false;
};

namespace detail {

template <class F>
void flag_term(F x, bool& overflow, bool& saw_nan) {
    switch (classify(x)) {
        case float_class::infinite: overflow = true; break;
        case float_class::nan: saw_nan = true; break;
        default: break;
    }
}

}  // namespace detail

// plain left-to-right accumulation in F, round-to-nearest-even
template <class F>
sum_report<F> naive_sum(std::span<const F> a) {
    sum_report<F> r;
    r.algorithm = "naive";
    r.n_terms = a.size();
    F s = F(0);
    for (F x : a) {
        detail::flag_term(x, r.overflow, r.saw_nan);
        s += x;
    }
    if (classify(s) == float_class::infinite) r.overflow = true;
    if (classify(s) == float_class::nan) r.saw_nan = true;
    r.sum = s;
    return r;
}

// accumulation with a running error term folded into each incoming value
template <class F>
sum_report<F> compensated_sum(std::span<const F> a) {
    sum_report<F> r;
    r.algorithm = "compensated";
    r.n_terms = a.size();
    F S = F(0);
    F error = F(0);
    for (F x : a) {
        detail::flag_term(x, r.overflow, r.saw_nan);
        F temp = S;
        F q = x + error;
        S = temp + q;
        error = (temp - S) + q;
    }
    if (classify(S) == float_class::infinite) r.overflow = true;
    if (classify(S) == float_class::nan) r.saw_nan = true;
    r.sum = S;
    r.error_estimate = error;
    return r;
}

// One partial sum per biased exponent value. The exponent field of a value
// is its slot address; inserting re-adds until the stored value's exponent
// matches its address, so cancellation and carry both relocate naturally.
template <class F>
struct bucket_table {
    using fmt = fp_format<F>;
    static constexpr int slot_count = fmt::max_biased_exponent + 1;
    static constexpr int max_depth = 1000;

    std::array<F, slot_count> slot{};
    std::array<std::uint64_t, max_depth + 1> level{};  // placements by re-add depth
    bool overflow = false;
    bool saw_nan = false;

    void insert(F x, bool record = true) {
        F q = x;
        int addr = extract_exponent(q);
        int depth = 0;
        for (;;) {
            F old = slot[addr];
            slot[addr] = F(0);
            F qn = q + old;
            if (classify(qn) == float_class::infinite &&
                classify(q) != float_class::infinite &&
                classify(old) != float_class::infinite)
                overflow = true;
            if (classify(qn) == float_class::nan) saw_nan = true;
            int e = extract_exponent(qn);
            if (e == addr) {
                slot[addr] = qn;
                if (record) ++level[std::size_t(depth)];
                return;
            }
            if (++depth > max_depth)
                throw std::runtime_error("bucket_table: re-add depth limit exceeded");
            q = qn;
            addr = e;
        }
    }

    // additive relocation of one slot whose stored value drifted off-address
    void relocate(int addr) {
        F v = slot[addr];
        if (v == F(0)) return;
        int e = extract_exponent(v);
        if (e == addr || e == 0 || e == fmt::max_biased_exponent) return;
        slot[addr] = F(0);
        slot[e] += v;
    }
};

// slots accumulated in increasing index order (smallest magnitudes first)
// with a Neumaier-style correction term
template <class F>
F fold_table(bucket_table<F>& t) {
    // two-level compensation: c1 carries the exact per-step residue, c2 the
    // (far smaller) residue of maintaining c1, so a well-conditioned table
    // folds to the correctly rounded sum
    F s = F(0);
    F c1 = F(0);
    F c2 = F(0);
    for (int i = 0; i < bucket_table<F>::slot_count; ++i) {
        F x = t.slot[i];
        if (x == F(0)) continue;
        F sum = s + x;
        F r = (std::fabs(s) >= std::fabs(x)) ? (s - sum) + x : (x - sum) + s;
        F csum = c1 + r;
        c2 += (std::fabs(c1) >= std::fabs(r)) ? (c1 - csum) + r : (r - csum) + c1;
        s = sum;
        c1 = csum;
        if (classify(s) == float_class::nan) {
            t.saw_nan = true;
            return s;
        }
        if (classify(s) == float_class::infinite) {
            t.overflow = true;
            return s;
        }
    }
    F r = s + (c1 + c2);
    if (classify(r) == float_class::infinite) t.overflow = true;
    return r;
}

// equivalent to re-inserting t2's slot values into t1; histograms are summed
template <class F>
bucket_table<F> merge_tables(const bucket_table<F>& t1, const bucket_table<F>& t2) {
    bucket_table<F> out = t1;
    for (int i = 0; i < bucket_table<F>::slot_count; ++i)
        if (t2.slot[i] != F(0)) out.insert(t2.slot[i], false);
    for (std::size_t d = 0; d <= bucket_table<F>::max_depth; ++d)
        out.level[d] += t2.level[d];
    out.overflow = out.overflow || t2.overflow;
    out.saw_nan = out.saw_nan || t2.saw_nan;
    return out;
}

namespace detail {

template <class F>
std::optional<std::vector<std::uint64_t>> histogram_copy(const bucket_table<F>& t) {
    std::size_t last = 0;
    for (std::size_t d = 0; d <= bucket_table<F>::max_depth; ++d)
        if (t.level[d] != 0) last = d + 1;
    if (last == 0) return std::vector<std::uint64_t>{};
    return std::vector<std::uint64_t>(t.level.begin(), t.level.begin() + last);
}

}  // namespace detail

template <class F>
sum_report<F> bucket_sum_recursive(std::span<const F> a) {
    sum_report<F> r;
    r.algorithm = "bucket-recursive";
    r.n_terms = a.size();
    bucket_table<F> t;
    for (F x : a) {
        detail::flag_term(x, r.overflow, r.saw_nan);
        t.insert(x);
    }
    r.level_histogram = detail::histogram_copy(t);
    r.sum = fold_table(t);
    r.overflow = r.overflow || t.overflow;
    r.saw_nan = r.saw_nan || t.saw_nan;
    return r;
}

// direct slot accumulation; stored values may drift off-address by a few
// slots, which the optional per-insert relocation and the unconditional
// final sweep pull back before folding
template <class F>
sum_report<F> bucket_sum_nonrecursive(std::span<const F> a, bool correct) {
    sum_report<F> r;
    r.algorithm = correct ? "bucket-nonrec-corrected" : "bucket-nonrec";
    r.n_terms = a.size();
    bucket_table<F> t;
    for (F x : a) {
        detail::flag_term(x, r.overflow, r.saw_nan);
        int addr = extract_exponent(x);
        F qn = x + t.slot[addr];
        if (classify(qn) == float_class::infinite && classify(x) != float_class::infinite)
            t.overflow = true;
        t.slot[addr] = qn;
        if (correct) t.relocate(addr);
    }
    // final sweep: move every off-address value to where it belongs
    for (int i = 0; i < bucket_table<F>::slot_count; ++i) {
        F v = t.slot[i];
        if (v == F(0) || extract_exponent(v) == i) continue;
        t.slot[i] = F(0);
        t.insert(v, false);
    }
    r.sum = fold_table(t);
    r.overflow = r.overflow || t.overflow;
    r.saw_nan = r.saw_nan || t.saw_nan;
    return r;
}

struct condition_stats {
    double sum_abs;  // sum of magnitudes
    double abs_sum;  // magnitude of the exact sum
    double ratio;    // sum_abs / abs_sum; +inf when the exact sum is zero
};

template <class Seq>
condition_stats condition_measure(const Seq& a) {
    superaccumulator mag, sum;
    for (double x : a) {
        mag.add(std::fabs(x));
        sum.add(x);
    }
    double sum_abs = mag.round();
    if (sum.is_zero())
        return {sum_abs, 0.0, std::numeric_limits<double>::infinity()};
    double abs_sum = std::fabs(sum.round());
    return {sum_abs, abs_sum, sum_abs / abs_sum};
}

}  // namespace rsum
