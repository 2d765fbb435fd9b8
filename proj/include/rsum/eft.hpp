#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

// Error-free transformations and expansion arithmetic over doubles.
// An expansion is a list of components, increasing in magnitude and
// pairwise nonoverlapping, whose exact sum is the represented value.
// The empty expansion is zero.

namespace rsum {

struct two_result {
    double hi;
    double lo;  // hi + lo == a op b, exactly
};

inline two_result two_sum(double a, double b) {
    double s = a + b;
    double bv = s - a;
    double av = s - bv;
    return {s, (a - av) + (b - bv)};
}

// requires |a| >= |b| or a == 0
inline two_result fast_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline two_result two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

using expansion = std::vector<double>;

inline expansion grow_expansion(const expansion& e, double b) {
    expansion h;
    h.reserve(e.size() + 1);
    double q = b;
    for (double comp : e) {
        auto [s, lo] = two_sum(q, comp);
        if (lo != 0.0) h.push_back(lo);
        q = s;
    }
    if (q != 0.0) h.push_back(q);
    return h;
}

inline expansion add_expansions(const expansion& e, const expansion& f) {
    expansion r = e;
    for (double comp : f) r = grow_expansion(r, comp);
    return r;
}

inline expansion negate_expansion(expansion e) {
    for (double& c : e) c = -c;
    return e;
}

inline expansion scale_expansion(const expansion& e, double b) {
    if (e.empty() || b == 0.0) return {};
    expansion h;
    h.reserve(2 * e.size());
    auto [q, lo0] = two_prod(e[0], b);
    if (lo0 != 0.0) h.push_back(lo0);
    for (std::size_t i = 1; i < e.size(); ++i) {
        auto [ti, tlo] = two_prod(e[i], b);
        auto [qi, lo1] = two_sum(q, tlo);
        if (lo1 != 0.0) h.push_back(lo1);
        auto [qn, lo2] = fast_two_sum(ti, qi);
        if (lo2 != 0.0) h.push_back(lo2);
        q = qn;
    }
    if (q != 0.0) h.push_back(q);
    return h;
}

inline expansion mul_expansions(const expansion& e, const expansion& f) {
    expansion r;
    for (double comp : f) r = add_expansions(r, scale_expansion(e, comp));
    return r;
}

// ascending-order sum of the components; for a nonoverlapping expansion
// the result is within one ulp of the true value
inline double approximate(const expansion& e) {
    double s = 0.0;
    for (double comp : e) s += comp;  // ascending magnitude
    return s;
}

inline int sign_of(const expansion& e) {
    if (e.empty()) return 0;
    return e.back() > 0.0 ? 1 : -1;  // largest component carries the sign
}

}  // namespace rsum
