#pragma once

#include <cstdint>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

namespace avp {

// Exact rational with 64-bit parts. Every operation reports overflow instead
// of wrapping; callers fall back to floating point when exactness is lost.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;  // invariant: den > 0, gcd(|num|, den) == 1

    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num(n), den(1) {}
    Rational(std::int64_t n, std::int64_t d) {
        if (d < 0) { n = -n; d = -d; }
        const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
        num = g ? n / g : n;
        den = g ? d / g : 1;
    }

    bool is_zero() const { return num == 0; }
    bool is_one() const { return num == 1 && den == 1; }
    bool is_integer() const { return den == 1; }
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator==(const Rational&, const Rational&) = default;
};

namespace detail {

inline std::optional<std::int64_t> checked(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) return std::nullopt;
    return static_cast<std::int64_t>(v);
}

}  // namespace detail

inline std::optional<Rational> rat_make(__int128 n, __int128 d) {
    if (d == 0) return std::nullopt;
    if (d < 0) { n = -n; d = -d; }
    __int128 a = n < 0 ? -n : n, b = d;
    while (b) { __int128 t = a % b; a = b; b = t; }
    if (a > 1) { n /= a; d /= a; }
    auto nn = detail::checked(n), dd = detail::checked(d);
    if (!nn || !dd) return std::nullopt;
    Rational r;
    r.num = *nn;
    r.den = *dd;
    return r;
}

inline std::optional<Rational> rat_add(const Rational& a, const Rational& b) {
    return rat_make((__int128)a.num * b.den + (__int128)b.num * a.den, (__int128)a.den * b.den);
}
inline std::optional<Rational> rat_mul(const Rational& a, const Rational& b) {
    return rat_make((__int128)a.num * b.num, (__int128)a.den * b.den);
}
inline std::optional<Rational> rat_div(const Rational& a, const Rational& b) {
    if (b.num == 0) return std::nullopt;
    return rat_make((__int128)a.num * b.den, (__int128)a.den * b.num);
}
inline std::optional<Rational> rat_neg(const Rational& a) {
    if (a.num == INT64_MIN) return std::nullopt;
    return Rational{-a.num, a.den};
}

// a^e for integer e; exact or nothing.
inline std::optional<Rational> rat_pow_int(const Rational& a, std::int64_t e) {
    if (e == 0) return Rational{1};
    Rational base = a;
    if (e < 0) {
        auto inv = rat_div(Rational{1}, a);
        if (!inv) return std::nullopt;
        base = *inv;
        e = -e;
    }
    Rational acc{1};
    while (e) {
        if (e & 1) {
            auto p = rat_mul(acc, base);
            if (!p) return std::nullopt;
            acc = *p;
        }
        e >>= 1;
        if (e) {
            auto s = rat_mul(base, base);
            if (!s) return std::nullopt;
            base = *s;
        }
    }
    return acc;
}

// Exact rational root when one exists (e.g. sqrt(9/4)); otherwise nothing.
inline std::optional<Rational> rat_root(const Rational& a, std::int64_t k) {
    if (k <= 0 || a.num < 0) return std::nullopt;
    auto iroot = [k](std::int64_t v) -> std::optional<std::int64_t> {
        if (v == 0 || v == 1) return v;
        std::int64_t lo = 1, hi = v;
        while (lo < hi) {
            std::int64_t mid = lo + (hi - lo + 1) / 2;
            __int128 p = 1;
            bool over = false;
            for (std::int64_t i = 0; i < k; ++i) {
                p *= mid;
                if (p > v) { over = true; break; }
            }
            if (over) hi = mid - 1; else lo = mid;
        }
        __int128 p = 1;
        for (std::int64_t i = 0; i < k; ++i) p *= lo;
        if (p == v) return lo;
        return std::nullopt;
    };
    auto rn = iroot(a.num), rd = iroot(a.den);
    if (!rn || !rd) return std::nullopt;
    return Rational{*rn, *rd};
}

inline std::string rat_str(const Rational& r) {
    if (r.den == 1) return std::to_string(r.num);
    return std::to_string(r.num) + "/" + std::to_string(r.den);
}

}  // namespace avp
