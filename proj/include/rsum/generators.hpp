#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsum/eft.hpp"
#include "rsum/oracle.hpp"

// Test-problem generators: a catalog of series with known behavior, the
// classic Rump polynomial, and ill-conditioned datasets with a requested
// cancellation ratio. Terms are formed in wider arithmetic (binary128 or
// exact integers) and rounded once to the target format, so each stored
// term is the correctly rounded value of its mathematical definition.

namespace rsum {

template <class F>
struct series {
    std::string name;
    std::uint64_t n = 0;                     // number of terms
    std::function<F(std::uint64_t)> term;    // 1-based index
    std::optional<double> expected;          // limit/closed form where one exists
    bool expected_is_exact = false;          // expected equals the exact sum of the stored terms
};

namespace detail {

using quad = __float128;
using u128 = unsigned __int128;

inline double quad_to_double(quad q) { return double(q); }

// 1/(i-1)!, zero once it underflows to nothing
template <class F>
F inv_factorial_term(std::uint64_t i) {
    if (i > 220) return F(0);
    quad f = 1;
    for (std::uint64_t k = 2; k < i; ++k) f *= quad(k);
    return F(quad(1) / f);
}

inline double exp_partial(std::uint64_t n) {
    quad s = 0, f = 1;
    for (std::uint64_t i = 1; i <= n && i <= 230; ++i) {
        if (i >= 2) f *= quad(i - 1);
        s += quad(1) / f;
    }
    return double(s);
}

}  // namespace detail

inline const std::vector<std::string>& series_names() {
    static const std::vector<std::string> names = {
        "const-1e-3",   "const-1e-4",     "harmonic",
        "harmonic-reversed", "triangular", "cubes",
        "exp-series",   "log-ratio",      "telescoping-reciprocal",
        "riemann-quadratic", "rosenbrock", "odd-product",
    };
    return names;
}

template <class F>
series<F> make_series(const std::string& name, std::uint64_t n) {
    using detail::quad;
    if (n == 0) throw std::invalid_argument("make_series: n must be positive");
    series<F> s;
    s.name = name;
    s.n = n;

    if (name == "const-1e-3") {
        s.term = [](std::uint64_t) { return F(quad(1) / 1000); };
        s.expected = double(quad(n) / 1000);
    } else if (name == "const-1e-4") {
        s.term = [](std::uint64_t) { return F(quad(1) / 10000); };
        s.expected = double(quad(n) / 10000);
    } else if (name == "harmonic") {
        s.term = [](std::uint64_t i) { return F(quad(1) / quad(i)); };
    } else if (name == "harmonic-reversed") {
        s.term = [n](std::uint64_t i) { return F(quad(1) / quad(n + 1 - i)); };
    } else if (name == "triangular") {
        s.term = [](std::uint64_t i) { return F(double(i)); };
        s.expected = double(__int128(n) * (n + 1) / 2);
        s.expected_is_exact = true;
    } else if (name == "cubes") {
        s.term = [](std::uint64_t i) { return F(quad(__int128(i) * i * i)); };
        __int128 t = __int128(n) * (n + 1) / 2;
        s.expected = double(t * t);
        s.expected_is_exact = true;
    } else if (name == "exp-series") {
        s.term = detail::inv_factorial_term<F>;
        s.expected = detail::exp_partial(n);
    } else if (name == "log-ratio") {
        // ln(i+2) - ln(i+1), summed: ln((n+2)/2)
        s.term = [](std::uint64_t i) { return F(std::log1pl(1.0L / double(i + 1))); };
        s.expected = double(std::log1pl((long double)(n) / 2));
    } else if (name == "telescoping-reciprocal") {
        s.term = [](std::uint64_t i) {
            return F(quad(1) / (detail::u128(i) * (i + 1)));
        };
        s.expected = double(quad(1) - quad(1) / (quad(n) + 1));
    } else if (name == "riemann-quadratic") {
        // left-endpoint-style rule for the integral of 3x^2 over [1,2]
        s.term = [n](std::uint64_t i) {
            quad u = 1 + quad(i) / quad(n);
            return F(3 * u * u / quad(n));
        };
        quad q = 3 * (1 + quad(n + 1) / n +
                      quad(__int128(n + 1) * (2 * n + 1)) / (6 * quad(n) * n));
        s.expected = double(q);
    } else if (name == "rosenbrock") {
        // pairwise residuals at the all-ones point: every term is zero
        if (n < 2 || n % 2 != 0)
            throw std::invalid_argument("make_series: rosenbrock needs even n >= 2");
        s.n = n / 2;
        s.term = [](std::uint64_t) { return F(0); };
        s.expected = 0.0;
        s.expected_is_exact = true;
    } else if (name == "odd-product") {
        s.term = [](std::uint64_t i) {
            return F(quad(1) / (detail::u128(2 * i - 1) * (2 * i + 1)));
        };
        s.expected = double(quad(n) / (2 * quad(n) + 1));
    } else {
        throw std::invalid_argument("make_series: unknown series '" + name + "'");
    }
    return s;
}

// Rosenbrock residuals at an arbitrary point (coordinates come in flat,
// two per term). No closed form; the expected value is left unset.
template <class F>
series<F> make_rosenbrock(std::span<const double> point) {
    if (point.size() < 2 || point.size() % 2 != 0)
        throw std::invalid_argument("make_rosenbrock: need an even number of coordinates");
    using detail::quad;
    series<F> s;
    s.name = "rosenbrock";
    s.n = point.size() / 2;
    std::vector<double> pts(point.begin(), point.end());
    s.term = [pts](std::uint64_t i) {
        quad lo = pts[2 * i - 2], hi = pts[2 * i - 1];
        quad d = hi - lo, e = 1 - hi;
        return F(100 * d * d + e * e);
    };
    return s;
}

template <class F>
std::vector<F> series_terms(const series<F>& s) {
    std::vector<F> v(s.n);
    for (std::uint64_t i = 1; i <= s.n; ++i) v[i - 1] = s.term(i);
    return v;
}

// ---- Rump's polynomial f(x,y) = 333.75 y^6 + x^2 (11 x^2 y^2 - y^6
//      - 121 y^4 - 2) + 5.5 y^8 + x / (2y) ----

// evaluate with binary128 intermediates, round once to F
template <class F>
F rump_eval(F x, F y) {
    if (y == F(0)) throw std::domain_error("rump_eval: y must be nonzero");
    using Q = __float128;
    Q xq = x, yq = y;
    Q x2 = xq * xq;
    Q y2 = yq * yq, y4 = y2 * y2, y6 = y4 * y2, y8 = y4 * y4;
    Q f = Q(333.75) * y6 + x2 * (Q(11) * x2 * y2 - y6 - Q(121) * y4 - Q(2)) +
          Q(5.5) * y8 + xq / (2 * yq);
    return F(f);
}

// exact polynomial via nonoverlapping expansions plus a residual-corrected
// quotient; the result is the correctly rounded value to within one ulp
inline double rump_eval_exact(double x, double y) {
    if (y == 0.0) throw std::domain_error("rump_eval_exact: y must be nonzero");
    if (std::fabs(x) > 0x1p120 || std::fabs(y) > 0x1p120)
        throw std::domain_error("rump_eval_exact: inputs too large for exact expansion");

    auto pp = [](double u, double v) {
        two_result r = two_prod(u, v);
        expansion e;
        if (r.lo != 0.0) e.push_back(r.lo);
        if (r.hi != 0.0) e.push_back(r.hi);
        return e;
    };
    expansion y2 = pp(y, y);
    expansion y4 = mul_expansions(y2, y2);
    expansion y6 = mul_expansions(y4, y2);
    expansion y8 = mul_expansions(y4, y4);
    expansion x2 = pp(x, x);

    expansion inner = scale_expansion(mul_expansions(x2, y2), 11.0);
    inner = add_expansions(inner, negate_expansion(y6));
    inner = add_expansions(inner, scale_expansion(y4, -121.0));
    inner = add_expansions(inner, expansion{-2.0});

    expansion p = scale_expansion(y6, 333.75);
    p = add_expansions(p, mul_expansions(x2, inner));
    p = add_expansions(p, scale_expansion(y8, 5.5));

    double d = 2 * y;  // exact
    double q = x / d;
    double r = std::fma(-q, d, x);  // exact division residual
    double q2 = r / d;

    p = grow_expansion(p, q);
    p = grow_expansion(p, q2);
    return approximate(p);
}

// ---- ill-conditioned datasets: exactly cancelling pairs plus a small
//      residual chosen so sum|a_i| / |sum a_i| lands near the target ----

struct ill_cond_spec {
    std::uint64_t n = 0;
    double target_ratio = 1.0;  // >= 1; may be +infinity (pure cancellation)
    std::uint64_t seed = 0;
};

namespace detail {

// log-uniform magnitude: mantissa in [0.5, 1), exponent in [-30, 30]
inline double random_magnitude(std::mt19937_64& rng) {
    double m = 0.5 + double(rng() >> 11) * 0x1p-54;
    int e = int(rng() % 61) - 30;
    return std::ldexp(m, e);
}

// Fisher-Yates with the raw engine, so the order is fixed by the seed alone
template <class T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng() % i]);
}

}  // namespace detail

inline std::vector<double> make_ill_conditioned(const ill_cond_spec& spec) {
    if (spec.n == 0)
        throw std::invalid_argument("make_ill_conditioned: n must be positive");
    if (!(spec.target_ratio >= 1.0))
        throw std::invalid_argument("make_ill_conditioned: ratio must be >= 1");
    std::mt19937_64 rng(spec.seed);
    std::vector<double> out;
    out.reserve(spec.n);

    if (spec.target_ratio == 1.0) {
        for (std::uint64_t i = 0; i < spec.n; ++i)
            out.push_back(detail::random_magnitude(rng));
        return out;
    }
    if (std::isinf(spec.target_ratio)) {
        if (spec.n < 2 || spec.n % 2 != 0)
            throw std::invalid_argument(
                "make_ill_conditioned: pure cancellation needs even n >= 2");
        for (std::uint64_t i = 0; i < spec.n / 2; ++i) {
            double x = detail::random_magnitude(rng);
            out.push_back(x);
            out.push_back(-x);
        }
        detail::seeded_shuffle(out, rng);
        return out;
    }

    if (spec.n < 3)
        throw std::invalid_argument(
            "make_ill_conditioned: finite ratio > 1 needs n >= 3");
    std::uint64_t residual_slots = (spec.n % 2 == 0) ? 2 : 1;
    std::uint64_t pairs = (spec.n - residual_slots) / 2;
    superaccumulator acc;
    for (std::uint64_t i = 0; i < pairs; ++i) {
        double x = detail::random_magnitude(rng);
        out.push_back(x);
        out.push_back(-x);
        acc.add(x);
    }
    double pair_mass = acc.round();
    double r = 2 * pair_mass / (spec.target_ratio - 1);
    if (!std::isfinite(r) || r == 0.0)
        throw std::invalid_argument(
            "make_ill_conditioned: ratio unachievable for this n and seed");
    if (residual_slots == 1) {
        out.push_back(r);
    } else {
        out.push_back(r / 2);
        out.push_back(r / 2);
    }
    detail::seeded_shuffle(out, rng);
    return out;
}

}  // namespace rsum
