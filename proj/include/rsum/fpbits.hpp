#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <type_traits>

// Bit-level access to IEEE-754 binary32/binary64: raw exponent extraction,
// exponent rewrite, and exact scaling by powers of two.

namespace rsum {

template <class F>
struct fp_format;

template <>
struct fp_format<float> {
    using bits_t = std::uint32_t;
    static constexpr const char* name = "single";
    static constexpr int exponent_bits = 8;
    static constexpr int mantissa_bits = 23;
    static constexpr int bias = 127;
    static constexpr int max_biased_exponent = 255;
    static constexpr bits_t sign_mask = 0x8000'0000u;
    static constexpr bits_t exponent_mask = 0x7F80'0000u;
    static constexpr bits_t mantissa_mask = 0x007F'FFFFu;
    // the same exponent field, seen through the top 16 bits of the word
    static constexpr std::uint16_t top16_exponent_mask = 0x7F80;
    static constexpr std::uint16_t top16_rest_mask = 0x807F;
    static constexpr int top16_shift = 7;
};

template <>
struct fp_format<double> {
    using bits_t = std::uint64_t;
    static constexpr const char* name = "double";
    static constexpr int exponent_bits = 11;
    static constexpr int mantissa_bits = 52;
    static constexpr int bias = 1023;
    static constexpr int max_biased_exponent = 2047;
    static constexpr bits_t sign_mask = 0x8000'0000'0000'0000ull;
    static constexpr bits_t exponent_mask = 0x7FF0'0000'0000'0000ull;
    static constexpr bits_t mantissa_mask = 0x000F'FFFF'FFFF'FFFFull;
    static constexpr std::uint16_t top16_exponent_mask = 0x7FF0;
    static constexpr std::uint16_t top16_rest_mask = 0x800F;
    static constexpr int top16_shift = 4;
};

template <class F>
concept supported_float = std::is_same_v<F, float> || std::is_same_v<F, double>;

// sanity: the derived relations every format must satisfy
template <class F>
    requires supported_float<F>
struct fp_format_checks {
    using fmt = fp_format<F>;
    static_assert(fmt::max_biased_exponent == (1 << fmt::exponent_bits) - 1);
    static_assert(fmt::bias == (1 << (fmt::exponent_bits - 1)) - 1);
    static_assert(1 + fmt::exponent_bits + fmt::mantissa_bits == 8 * sizeof(F));
    static_assert((fmt::sign_mask | fmt::exponent_mask | fmt::mantissa_mask) ==
                  typename fmt::bits_t(-1));
};
template struct fp_format_checks<float>;
template struct fp_format_checks<double>;

// runtime-friendly description of a format, for reports and the CLI
struct format_spec {
    const char* name;
    int exponent_bits;
    int mantissa_bits;
    int bias;
    int max_biased_exponent;
    std::uint16_t top16_exponent_mask;
    std::uint16_t top16_rest_mask;
    int top16_shift;
};

template <class F>
    requires supported_float<F>
constexpr format_spec format_of() {
    using fmt = fp_format<F>;
    return {fmt::name,
            fmt::exponent_bits,
            fmt::mantissa_bits,
            fmt::bias,
            fmt::max_biased_exponent,
            fmt::top16_exponent_mask,
            fmt::top16_rest_mask,
            fmt::top16_shift};
}

template <class F>
constexpr typename fp_format<F>::bits_t to_bits(F x) {
    return std::bit_cast<typename fp_format<F>::bits_t>(x);
}

template <class F>
constexpr F from_bits(typename fp_format<F>::bits_t b) {
    return std::bit_cast<F>(b);
}

// raw biased exponent field; total, never traps (specials included)
template <class F>
constexpr int extract_exponent(F x) {
    using fmt = fp_format<F>;
    return int((to_bits(x) & fmt::exponent_mask) >> fmt::mantissa_bits);
}

// the same field read through the top 16 bits of the word only
template <class F>
constexpr int extract_exponent_top16(F x) {
    using fmt = fp_format<F>;
    auto top = std::uint16_t(to_bits(x) >> (8 * sizeof(F) - 16));
    return (top & fmt::top16_exponent_mask) >> fmt::top16_shift;
}

enum class float_class { zero, subnormal, normal, infinite, nan };

template <class F>
constexpr float_class classify(F x) {
    using fmt = fp_format<F>;
    auto b = to_bits(x);
    auto e = (b & fmt::exponent_mask) >> fmt::mantissa_bits;
    auto m = b & fmt::mantissa_mask;
    if (e == typename fmt::bits_t(fmt::max_biased_exponent))
        return m ? float_class::nan : float_class::infinite;
    if (e == 0)
        return m ? float_class::subnormal : float_class::zero;
    return float_class::normal;
}

// sign + mantissa decomposition; round-trips every bit pattern, NaN payloads included
template <class F>
struct float_view {
    unsigned sign;
    int biased_exponent;
    typename fp_format<F>::bits_t mantissa;
};

template <class F>
constexpr float_view<F> decompose(F x) {
    using fmt = fp_format<F>;
    auto b = to_bits(x);
    return {unsigned((b & fmt::sign_mask) >> (8 * sizeof(F) - 1)),
            int((b & fmt::exponent_mask) >> fmt::mantissa_bits),
            b & fmt::mantissa_mask};
}

template <class F>
constexpr F compose(const float_view<F>& v) {
    using fmt = fp_format<F>;
    using bits_t = typename fmt::bits_t;
    bits_t b = (bits_t(v.sign) << (8 * sizeof(F) - 1)) |
               (bits_t(v.biased_exponent) << fmt::mantissa_bits) |
               (v.mantissa & fmt::mantissa_mask);
    return from_bits<F>(b);
}

namespace detail {

// unchecked exponent-field rewrite
template <class F>
constexpr F set_exponent_raw(F x, int new_exp) {
    using fmt = fp_format<F>;
    using bits_t = typename fmt::bits_t;
    bits_t b = to_bits(x);
    b = (b & ~fmt::exponent_mask) | (bits_t(new_exp) << fmt::mantissa_bits);
    return from_bits<F>(b);
}

// 2^j as an exact constant; j must land in the normal range
template <class F>
constexpr F pow2(int j) {
    using fmt = fp_format<F>;
    using bits_t = typename fmt::bits_t;
    return from_bits<F>(bits_t(j + fmt::bias) << fmt::mantissa_bits);
}

}  // namespace detail

// same sign and mantissa bits, exponent field replaced
template <class F>
constexpr F set_exponent(F x, int new_exp) {
    using fmt = fp_format<F>;
    if (new_exp < 0 || new_exp > fmt::max_biased_exponent)
        throw std::out_of_range("set_exponent: exponent field out of range");
    return detail::set_exponent_raw(x, new_exp);
}

// floor(log2 |x|) for finite nonzero x, subnormals included
template <class F>
constexpr int floor_log2(F x) {
    using fmt = fp_format<F>;
    auto b = to_bits(x);
    int e = int((b & fmt::exponent_mask) >> fmt::mantissa_bits);
    if (e != 0) return e - fmt::bias;
    // subnormal: value = mantissa * 2^(1 - bias - mantissa_bits)
    auto m = b & fmt::mantissa_mask;
    return std::bit_width(m) - fmt::mantissa_bits - fmt::bias;
}

// x * 2^k with a single final rounding, matching the format's arithmetic
// through gradual underflow and overflow. Normal-to-normal moves are pure
// exponent-field rewrites; only a boundary crossing pays one multiply.
template <class F>
constexpr F mul_pow2(F x, int k) {
    using fmt = fp_format<F>;
    if (x == F(0) || classify(x) == float_class::infinite || classify(x) == float_class::nan)
        return x;
    int e = extract_exponent(x);
    if (e != 0) {
        int t = e + k;
        if (t >= 1 && t <= fmt::max_biased_exponent - 1)
            return detail::set_exponent_raw(x, t);
    }
    // normalize a subnormal exactly before shifting
    int kr = k;
    if (e == 0) {
        x = x * detail::pow2<F>(fmt::mantissa_bits);
        kr -= fmt::mantissa_bits;
        e = extract_exponent(x);
    }
    // exact exponent moves while the value stays normal
    while (kr != 0) {
        int lo = 1 - e, hi = (fmt::max_biased_exponent - 1) - e;
        int s = kr < lo ? lo : (kr > hi ? hi : kr);
        if (s == 0) break;
        x = detail::set_exponent_raw(x, e + s);
        e += s;
        kr -= s;
    }
    if (kr == 0) return x;
    if (kr > 0)  // pinned at the top of the normal range: certain overflow
        return x * detail::pow2<F>(fmt::max_biased_exponent - 1 - fmt::bias);
    if (kr < -(fmt::mantissa_bits + 2))  // deep underflow: rounds to zero
        return x * F(0);                 // keeps the sign
    return x * detail::pow2<F>(kr);      // one rounding into the subnormal range
}

}  // namespace rsum
