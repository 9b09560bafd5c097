#pragma once

// Exact rationals for community thresholds and profiles. Always reduced, with
// a positive denominator; comparisons cross-multiply in 128 bits.

#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "communitylab/error.hpp"

namespace communitylab {

class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num_(n) {} // NOLINT(google-explicit-constructor)
    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }

    double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

    std::string str() const {
        return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// Accepts "p/q", integers, and finite decimals such as "0.3" (parsed exactly as 3/10).
    static Rational parse(std::string_view text) {
        auto fail = [&] { return ParameterError("not a rational number: '" + std::string(text) + "'"); };
        if (text.empty()) throw fail();
        if (auto slash = text.find('/'); slash != std::string_view::npos) {
            return Rational(parse_int(text.substr(0, slash), fail), parse_int(text.substr(slash + 1), fail));
        }
        if (auto dot = text.find('.'); dot != std::string_view::npos) {
            std::string_view whole = text.substr(0, dot);
            std::string_view frac = text.substr(dot + 1);
            bool negative = !whole.empty() && whole.front() == '-';
            if (negative) whole.remove_prefix(1);
            if (frac.size() > 17) throw fail();
            std::int64_t scale = 1;
            for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
            std::int64_t w = whole.empty() ? 0 : parse_int(whole, fail);
            std::int64_t f = frac.empty() ? 0 : parse_int(frac, fail);
            if (w < 0 || f < 0) throw fail();
            Rational r = Rational(w) + Rational(f, scale);
            return negative ? -r : r;
        }
        return Rational(parse_int(text, fail));
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return from_wide(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                         static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw Error("rational division by zero");
        return from_wide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
    }
    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }

    friend bool operator==(const Rational& a, const Rational& b) noexcept {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
        const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
        const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    template <class Fail>
    static std::int64_t parse_int(std::string_view s, Fail fail) {
        if (s.empty()) throw fail();
        std::size_t i = 0;
        bool negative = false;
        if (s[0] == '-' || s[0] == '+') {
            negative = s[0] == '-';
            i = 1;
        }
        if (i == s.size()) throw fail();
        std::int64_t v = 0;
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') throw fail();
            if (v > (INT64_MAX - 9) / 10) throw fail();
            v = v * 10 + (s[i] - '0');
        }
        return negative ? -v : v;
    }

    static Rational from_wide(__int128 n, __int128 d) {
        if (d == 0) throw Error("rational with zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 a = n < 0 ? -n : n;
        __int128 b = d;
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        if (a > 1) {
            n /= a;
            d /= a;
        }
        if (n > INT64_MAX || n < -INT64_MAX || d > INT64_MAX) throw Error("rational overflow");
        Rational r;
        r.num_ = static_cast<std::int64_t>(n);
        r.den_ = static_cast<std::int64_t>(d);
        return r;
    }

    void normalize() {
        *this = from_wide(num_, den_);
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

} // namespace communitylab
