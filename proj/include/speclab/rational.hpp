#pragma once

#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace speclab {

/// Exact rational number over 64-bit integers with signed infinities.
///
/// Exponent bookkeeping in the rate formulas has knife-edge case boundaries
/// (for example gamma == p * (s + 1)); decimal inputs such as 1.5 or 0.1 are
/// therefore converted to exact fractions before any comparison happens.
/// Infinity is stored as den == 0 with num = +1 or -1. Arithmetic on infinite
/// values is only defined where the result is unambiguous.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT(implicit)

    Rational(std::int64_t num, std::int64_t den) {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        assign(static_cast<__int128>(num), static_cast<__int128>(den));
    }

    static constexpr Rational infinity() { return from_raw(1, 0); }
    static constexpr Rational negative_infinity() { return from_raw(-1, 0); }

    /// Exact value of the shortest round-trip decimal representation of x.
    static Rational from_double(double x) {
        if (std::isinf(x)) return x > 0 ? infinity() : negative_infinity();
        if (std::isnan(x)) throw std::invalid_argument("Rational: NaN");
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof buf, x);
        return parse_decimal(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
    }

    /// Accepts "p/q", decimals ("1.25", "-3e-2"), and "inf"/"-inf".
    static Rational parse(std::string_view text) {
        while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
        while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
        if (text == "inf" || text == "+inf" || text == "infinity") return infinity();
        if (text == "-inf" || text == "-infinity") return negative_infinity();
        if (auto slash = text.find('/'); slash != std::string_view::npos) {
            return parse_decimal(text.substr(0, slash)) / parse_decimal(text.substr(slash + 1));
        }
        return parse_decimal(text);
    }

    constexpr std::int64_t num() const { return num_; }
    constexpr std::int64_t den() const { return den_; }
    constexpr bool is_infinite() const { return den_ == 0; }
    constexpr bool is_integer() const { return den_ == 1; }

    double to_double() const {
        if (den_ == 0) return num_ > 0 ? std::numeric_limits<double>::infinity()
                                       : -std::numeric_limits<double>::infinity();
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    std::int64_t floor() const {
        if (den_ == 0) throw std::domain_error("Rational: floor of infinity");
        std::int64_t q = num_ / den_;
        if ((num_ % den_ != 0) && (num_ < 0)) --q;
        return q;
    }

    std::int64_t ceil() const { return -(-*this).floor(); }

    Rational operator-() const { return from_raw(-num_, den_); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        if (a.is_infinite() || b.is_infinite()) {
            if (a.is_infinite() && b.is_infinite() && a.num_ != b.num_)
                throw std::domain_error("Rational: inf - inf");
            return a.is_infinite() ? a : b;
        }
        Rational r;
        r.assign(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                 static_cast<__int128>(a.den_) * b.den_);
        return r;
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

    friend Rational operator*(const Rational& a, const Rational& b) {
        if (a.is_infinite() || b.is_infinite()) {
            if (a.num_ == 0 || b.num_ == 0) throw std::domain_error("Rational: 0 * inf");
            return from_raw((a.num_ > 0) == (b.num_ > 0) ? 1 : -1, 0);
        }
        Rational r;
        r.assign(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
        return r;
    }

    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.is_infinite()) {
            if (a.is_infinite()) throw std::domain_error("Rational: inf / inf");
            return Rational(0);
        }
        if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
        if (a.is_infinite()) return from_raw((a.num_ > 0) == (b.num_ > 0) ? 1 : -1, 0);
        Rational r;
        r.assign(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
        return r;
    }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        if (a.is_infinite() || b.is_infinite()) {
            const int ka = a.is_infinite() ? (a.num_ > 0 ? 1 : -1) : 0;
            const int kb = b.is_infinite() ? (b.num_ > 0 ? 1 : -1) : 0;
            if (ka != kb) return ka <=> kb;
            return std::strong_ordering::equal;
        }
        const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
        const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    std::string str() const {
        if (den_ == 0) return num_ > 0 ? "inf" : "-inf";
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    static constexpr Rational from_raw(std::int64_t n, std::int64_t d) {
        Rational r;
        r.num_ = n;
        r.den_ = d;
        return r;
    }

    static __int128 gcd128(__int128 a, __int128 b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    void assign(__int128 n, __int128 d) {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        const __int128 g = gcd128(n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        constexpr __int128 lim = std::numeric_limits<std::int64_t>::max();
        if (n > lim || n < -lim || d > lim) throw std::overflow_error("Rational: 64-bit overflow");
        num_ = static_cast<std::int64_t>(n);
        den_ = static_cast<std::int64_t>(d == 0 ? 1 : d);
        if (n == 0) den_ = 1;
    }

    static Rational parse_decimal(std::string_view text) {
        bool negative = false;
        std::size_t i = 0;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
            negative = text[i] == '-';
            ++i;
        }
        __int128 mantissa = 0;
        int scale = 0;
        bool any_digit = false;
        bool after_point = false;
        constexpr __int128 cap = static_cast<__int128>(1) << 100;
        for (; i < text.size(); ++i) {
            const char c = text[i];
            if (c == '.') {
                if (after_point) throw std::invalid_argument("Rational: malformed number");
                after_point = true;
                continue;
            }
            if (c == 'e' || c == 'E') break;
            if (c < '0' || c > '9') throw std::invalid_argument("Rational: malformed number");
            any_digit = true;
            mantissa = mantissa * 10 + (c - '0');
            if (mantissa > cap) throw std::overflow_error("Rational: too many digits");
            if (after_point) --scale;
        }
        if (!any_digit) throw std::invalid_argument("Rational: malformed number");
        if (i < text.size()) {
            int exp10 = 0;
            auto first = text.data() + i + 1;
            if (first < text.data() + text.size() && *first == '+') ++first;
            auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), exp10);
            if (ec != std::errc{} || ptr != text.data() + text.size())
                throw std::invalid_argument("Rational: malformed exponent");
            scale += exp10;
        }
        if (negative) mantissa = -mantissa;
        __int128 num = mantissa;
        __int128 den = 1;
        for (; scale > 0; --scale) {
            num *= 10;
            if (num > cap || num < -cap) throw std::overflow_error("Rational: exponent too large");
        }
        for (; scale < 0; ++scale) {
            den *= 10;
            if (den > cap) throw std::overflow_error("Rational: exponent too small");
        }
        Rational r;
        r.assign(num, den);
        return r;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace speclab
