#include <algorithm>
#include <cmath>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "rsum/accumulators.hpp"
#include "rsum/generators.hpp"
#include "rsum/oracle.hpp"

using namespace rsum;

namespace {

std::int64_t ordered_bits(double x) {
    auto b = std::bit_cast<std::int64_t>(x);
    return b < 0 ? std::numeric_limits<std::int64_t>::min() - b : b;
}

std::int64_t ulps_apart(double a, double b) {
    return std::abs(ordered_bits(a) - ordered_bits(b));
}

std::string fixed15(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15f", x);
    return buf;
}

template <class F>
std::vector<F> shuffled(std::vector<F> v, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng() % i]);
    return v;
}

double median_run_ms(const std::vector<double>& data, int repeats) {
    std::vector<double> times;
    for (int r = 0; r < repeats; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        auto rep = bucket_sum_nonrecursive<double>(data, true);
        auto t1 = std::chrono::steady_clock::now();
        volatile double sink = rep.sum;
        (void)sink;
        times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
}

}  // namespace

TEST_CASE("naive sum basics") {
    REQUIRE(naive_sum<double>(std::vector<double>{}).sum == 0.0);
    REQUIRE(naive_sum<double>(std::vector<double>{0.5}).sum == 0.5);

    std::vector<float> a(1000, 1e-3f);
    auto r = naive_sum<float>(a);
    REQUIRE(fixed15(double(r.sum)) == "0.999990701675415");
    REQUIRE(r.n_terms == 1000);
    REQUIRE_FALSE(r.overflow);
    REQUIRE_FALSE(r.saw_nan);

    std::vector<float> b(10000, 1e-4f);
    REQUIRE(fixed15(double(naive_sum<float>(b).sum)) == "1.000053524971008");
}

TEST_CASE("naive sum flags") {
    double inf = std::numeric_limits<double>::infinity();
    double nan = std::numeric_limits<double>::quiet_NaN();

    auto r1 = naive_sum<double>(std::vector<double>{1e308, 1e308});
    REQUIRE(r1.overflow);
    REQUIRE(std::isinf(r1.sum));

    auto r2 = naive_sum<double>(std::vector<double>{1.0, nan});
    REQUIRE(r2.saw_nan);
    REQUIRE(std::isnan(r2.sum));

    auto r3 = naive_sum<double>(std::vector<double>{inf, 1.0});
    REQUIRE(r3.overflow);
    REQUIRE(std::isinf(r3.sum));

    // inf + -inf: nan appears at accumulation time
    auto r4 = naive_sum<double>(std::vector<double>{inf, -inf});
    REQUIRE(r4.saw_nan);
    REQUIRE(std::isnan(r4.sum));
}

TEST_CASE("compensated sum basics") {
    auto r = compensated_sum<double>(std::vector<double>{42.5});
    REQUIRE(r.sum == 42.5);
    REQUIRE(r.error_estimate.has_value());
    REQUIRE(*r.error_estimate == 0.0);

    // the residual holds the tail the float sum dropped
    std::vector<double> v{1.0, 0x1p-60};
    auto r2 = compensated_sum<double>(v);
    REQUIRE(r2.sum == 1.0);
    REQUIRE(*r2.error_estimate == 0x1p-60);
}

TEST_CASE("compensated beats naive on the repeated-constant series") {
    std::vector<float> a(10000, 1e-4f);
    double exact = exact_sum(a).rounded;  // near 1.0
    double err_naive = std::fabs(double(naive_sum<float>(a).sum) - exact);
    double err_comp = std::fabs(double(compensated_sum<float>(a).sum) - exact);
    REQUIRE(err_comp < err_naive);
}

TEST_CASE("compensated on harmonic stays within 2 ulp of the exact sum") {
    auto s = make_series<double>("harmonic", 1000000);
    auto terms = series_terms(s);
    double exact = exact_sum(terms).rounded;
    auto r = compensated_sum<double>(terms);
    REQUIRE(ulps_apart(r.sum, exact) <= 2);
}

TEST_CASE("compensated error bound: |S + e - exact| <= 2u * sum|a|") {
    std::mt19937_64 rng(2024);
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<double> a;
        superaccumulator mag;
        for (int i = 0; i < 500; ++i) {
            double m = 0.5 + double(rng() >> 11) * 0x1p-54;
            int e = int(rng() % 80) - 40;
            double x = std::ldexp(m, e);
            if (rng() & 1) x = -x;
            a.push_back(x);
            mag.add(std::fabs(x));
        }
        auto r = compensated_sum<double>(a);
        superaccumulator res;
        res.add(r.sum);
        res.add(*r.error_estimate);
        for (double x : a) res.add(-x);
        double defect = std::fabs(res.round());
        double bound = 2 * 0x1p-53 * mag.round();
        REQUIRE(defect <= bound);
    }
}

TEST_CASE("bucket recursive sums the integers 1..1e7 exactly") {
    const std::uint64_t n = 10000000;
    std::vector<double> a(n);
    for (std::uint64_t i = 0; i < n; ++i) a[i] = double(i + 1);
    auto r = bucket_sum_recursive<double>(a);
    REQUIRE(r.sum == 50000005000000.0);
    REQUIRE(r.level_histogram.has_value());
    std::uint64_t placed = 0;
    for (auto c : *r.level_histogram) placed += c;
    REQUIRE(placed == n);
}

TEST_CASE("bucket recursive on all-zero input") {
    std::vector<double> a(1000, 0.0);
    auto r = bucket_sum_recursive<double>(a);
    REQUIRE(r.sum == 0.0);
    REQUIRE(r.level_histogram.has_value());
    REQUIRE((*r.level_histogram).size() == 1);  // everything terminated at depth 0
    REQUIRE((*r.level_histogram)[0] == 1000);
}

TEST_CASE("bucket recursive handles a lone large term among tiny ones") {
    std::vector<double> a(1000000, 1e-6);
    a.push_back(1e9);
    a = shuffled(std::move(a), 7);
    double exact = exact_sum(a).rounded;
    auto r = bucket_sum_recursive<double>(a);
    REQUIRE(std::fabs(r.sum - exact) / std::fabs(exact) <= 1e-14);
}

TEST_CASE("recursive placement: every nonzero slot sits at its own exponent") {
    std::mt19937_64 rng(99);
    bucket_table<double> t;
    for (int i = 0; i < 100000; ++i) {
        double m = 0.5 + double(rng() >> 11) * 0x1p-54;
        int e = int(rng() % 600) - 300;
        double x = std::ldexp(m, e);
        if (rng() & 1) x = -x;
        t.insert(x);
    }
    for (int i = 0; i < bucket_table<double>::slot_count; ++i)
        if (t.slot[i] != 0.0) REQUIRE(extract_exponent(t.slot[i]) == i);
}

TEST_CASE("subnormal terms collect in slot zero and promote exactly") {
    double tiny = std::ldexp(1.0, -1025);
    std::vector<double> a(16, tiny);
    auto r = bucket_sum_recursive<double>(a);
    REQUIRE(r.sum == std::ldexp(1.0, -1021));
}

TEST_CASE("re-add depth limit is a hard error") {
    bucket_table<double> t;
    for (int k = -400; k <= 601; ++k) t.insert(std::ldexp(1.0, k));
    // one more copy of the bottom power starts a carry chain through
    // every seeded slot, blowing the depth counter
    REQUIRE_THROWS_AS(t.insert(std::ldexp(1.0, -400)), std::runtime_error);
}

TEST_CASE("bucket overflow and nan flags") {
    auto r1 = bucket_sum_recursive<double>(std::vector<double>{1e308, 1e308});
    REQUIRE(r1.overflow);
    REQUIRE(std::isinf(r1.sum));

    double nan = std::numeric_limits<double>::quiet_NaN();
    auto r2 = bucket_sum_recursive<double>(std::vector<double>{1.0, nan});
    REQUIRE(r2.saw_nan);
    REQUIRE(std::isnan(r2.sum));

    auto r3 = bucket_sum_nonrecursive<double>(std::vector<double>{1e308, 1e308}, true);
    REQUIRE(r3.overflow);

    auto r4 = bucket_sum_nonrecursive<double>(std::vector<double>{2.0, nan}, false);
    REQUIRE(r4.saw_nan);
    REQUIRE(std::isnan(r4.sum));
}

TEST_CASE("nonrecursive bucket sum basics") {
    for (bool correct : {false, true}) {
        auto r = bucket_sum_nonrecursive<double>(std::vector<double>{3.25}, correct);
        REQUIRE(r.sum == 3.25);
        REQUIRE(bucket_sum_nonrecursive<double>(std::vector<double>{}, correct).sum == 0.0);
    }
}

TEST_CASE("nonrecursive bucket error does not exceed naive on the 1e-3 series") {
    std::vector<float> a(1000, 1e-3f);
    double err_naive = std::fabs(double(naive_sum<float>(a).sum) - 1.0);
    for (bool correct : {false, true}) {
        double err_bucket =
            std::fabs(double(bucket_sum_nonrecursive<float>(a, correct).sum) - 1.0);
        REQUIRE(err_bucket <= err_naive);
    }
}

TEST_CASE("nonrecursive bucket nails the telescoping series") {
    const std::uint64_t n = 1000000;
    auto terms = series_terms(make_series<double>("telescoping-reciprocal", n));
    double closed = 1.0 - 1.0 / double(n + 1);
    for (bool correct : {false, true}) {
        auto r = bucket_sum_nonrecursive<double>(terms, correct);
        REQUIRE(std::fabs(r.sum - closed) / std::fabs(r.sum) <= 1e-13);
    }
}

TEST_CASE("nonrecursive matches recursive closely on mixed magnitudes") {
    std::mt19937_64 rng(31337);
    std::vector<double> a;
    for (int i = 0; i < 200000; ++i) {
        double m = 0.5 + double(rng() >> 11) * 0x1p-54;
        int e = int(rng() % 120) - 60;
        double x = std::ldexp(m, e);
        if (rng() & 1) x = -x;
        a.push_back(x);
    }
    // random signs across a wide exponent span cancel heavily, so the
    // bounds here are looser than on the benign series catalog
    double exact = exact_sum(a).rounded;
    for (bool correct : {false, true}) {
        auto r = bucket_sum_nonrecursive<double>(a, correct);
        REQUIRE(ulps_apart(r.sum, exact) <= 512);
    }
    REQUIRE(ulps_apart(bucket_sum_recursive<double>(a).sum, exact) <= 64);
}

TEST_CASE("fold basics") {
    bucket_table<double> t;
    t.slot[fp_format<double>::bias] = 1.0;
    REQUIRE(fold_table(t) == 1.0);

    bucket_table<double> t2;
    double small = std::ldexp(1.0, -30);
    t2.slot[extract_exponent(small)] = small;
    t2.slot[fp_format<double>::bias] = 1.0;
    REQUIRE(fold_table(t2) == 1.0 + std::ldexp(1.0, -30));
}

TEST_CASE("fold of a random table tracks the exact slot sum") {
    std::mt19937_64 rng(513);
    for (int iter = 0; iter < 100; ++iter) {
        bucket_table<double> t;
        std::vector<double> vals;
        for (int k = 0; k < 50; ++k) {
            double m = 0.5 + double(rng() >> 11) * 0x1p-54;
            int e = int(rng() % 400) - 200;
            double x = std::ldexp(m, e);
            if (rng() & 1) x = -x;
            int idx = int(rng() % 2046) + 1;
            t.slot[idx] += x;
        }
        for (int i = 0; i < bucket_table<double>::slot_count; ++i)
            if (t.slot[i] != 0.0) vals.push_back(t.slot[i]);
        double exact = exact_sum(vals).rounded;
        double folded = fold_table(t);
        REQUIRE(ulps_apart(folded, exact) <= 1);
    }
}

TEST_CASE("fold determinism") {
    bucket_table<double> t;
    std::mt19937_64 rng(8);
    for (int i = 0; i < 1000; ++i)
        t.insert(std::ldexp(double(rng() >> 11) * 0x1p-53 + 0.5, int(rng() % 100) - 50));
    bucket_table<double> copy = t;
    REQUIRE(fold_table(t) == fold_table(copy));
}

TEST_CASE("merge with an empty table is an identity") {
    bucket_table<double> t;
    std::mt19937_64 rng(21);
    for (int i = 0; i < 5000; ++i) {
        double x = std::ldexp(0.5 + double(rng() >> 11) * 0x1p-54, int(rng() % 200) - 100);
        t.insert((rng() & 1) ? x : -x);
    }
    bucket_table<double> empty;
    for (auto [left, right] : {std::pair{merge_tables(t, empty), t},
                               std::pair{merge_tables(empty, t), t}}) {
        for (int i = 0; i < bucket_table<double>::slot_count; ++i)
            REQUIRE(left.slot[i] == right.slot[i]);
        for (std::size_t d = 0; d <= std::size_t(bucket_table<double>::max_depth); ++d)
            REQUIRE(left.level[d] == right.level[d]);
    }
}

TEST_CASE("split, merge, fold lands within 2 ulp of the unsplit run") {
    std::mt19937_64 rng(4242);
    std::vector<double> a;
    for (int i = 0; i < 100000; ++i) {
        double x = std::ldexp(0.5 + double(rng() >> 11) * 0x1p-54, int(rng() % 300) - 150);
        a.push_back((rng() & 1) ? x : -x);
    }
    bucket_table<double> whole, lo, hi;
    for (double x : a) whole.insert(x);
    for (std::size_t i = 0; i < a.size() / 2; ++i) lo.insert(a[i]);
    for (std::size_t i = a.size() / 2; i < a.size(); ++i) hi.insert(a[i]);
    bucket_table<double> merged = merge_tables(lo, hi);
    std::uint64_t placed = 0;
    for (auto c : merged.level) placed += c;
    REQUIRE(placed == a.size());
    double split_sum = fold_table(merged);
    double whole_sum = fold_table(whole);
    REQUIRE(ulps_apart(split_sum, whole_sum) <= 2);
}

TEST_CASE("bucket recursive is permutation-robust") {
    auto terms = series_terms(make_series<double>("harmonic", 100000));
    double exact = exact_sum(terms).rounded;
    double u = std::fabs(std::nextafter(exact, 2 * exact) - exact);
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        auto p = shuffled(terms, seed);
        auto r = bucket_sum_recursive<double>(p);
        REQUIRE(std::fabs(r.sum - exact) <= 4 * u);
    }
}

TEST_CASE("condition measure") {
    auto c = condition_measure(std::vector<double>{1.0, -1.0, 1e-20});
    REQUIRE(c.abs_sum == 1e-20);
    REQUIRE(c.sum_abs == 2.0);  // 2 + 1e-20 rounds back to 2
    REQUIRE(c.ratio == Catch::Approx(2e20).epsilon(1e-12));

    auto pos = condition_measure(std::vector<double>{0.25, 1.5, 3.0, 0.125});
    REQUIRE(pos.ratio == Catch::Approx(1.0).epsilon(1e-15));

    auto zero = condition_measure(std::vector<double>{1.0, -1.0});
    REQUIRE(zero.abs_sum == 0.0);
    REQUIRE(std::isinf(zero.ratio));

    auto gen = make_ill_conditioned({100, 1e12, 42});
    auto g = condition_measure(gen);
    REQUIRE(g.ratio >= 1e11);
    REQUIRE(g.ratio <= 1e13);
}

TEST_CASE("nonrecursive bucket summation scales linearly") {
    std::mt19937_64 rng(77);
    std::vector<double> big;
    for (int i = 0; i < 2000000; ++i) {
        double x = std::ldexp(0.5 + double(rng() >> 11) * 0x1p-54, int(rng() % 100) - 50);
        big.push_back((rng() & 1) ? x : -x);
    }
    std::vector<double> half(big.begin(), big.begin() + 1000000);
    double t_half = median_run_ms(half, 7);
    double t_full = median_run_ms(big, 7);
    double ratio = t_full / t_half;
    INFO("t(1e6)=" << t_half << "ms t(2e6)=" << t_full << "ms ratio=" << ratio);
    REQUIRE(ratio >= 1.6);
    REQUIRE(ratio <= 2.6);
}
