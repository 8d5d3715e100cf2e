#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

namespace dynkin {

/// Exact rational on int64 with __int128 intermediates. Always stored
/// canonically: den > 0, gcd(|num|, den) == 1. Every narrowing back to
/// int64 is checked and throws std::overflow_error instead of wrapping.
class Rational {
public:
    Rational() = default;
    Rational(long long n) : num_(n) {}  // NOLINT: implicit from integers is the point
    Rational(long long n, long long d) { assign(n, d); }

    long long num() const { return num_; }
    long long den() const { return den_; }

    bool is_integer() const { return den_ == 1; }
    bool is_zero() const { return num_ == 0; }
    int sign() const { return num_ > 0 ? 1 : num_ < 0 ? -1 : 0; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        using I = __int128;
        return make(I(a.num_) * b.den_ + I(b.num_) * a.den_, I(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        using I = __int128;
        return make(I(a.num_) * b.den_ - I(b.num_) * a.den_, I(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        using I = __int128;
        return make(I(a.num_) * b.num_, I(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("rational division by zero");
        using I = __int128;
        return make(I(a.num_) * b.den_, I(a.den_) * b.num_);
    }
    Rational operator-() const {
        Rational r;
        r.num_ = -num_;  // int64 min never occurs: canonical values come from checked narrows
        r.den_ = den_;
        return r;
    }
    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }
    Rational& operator*=(const Rational& b) { return *this = *this * b; }
    Rational& operator/=(const Rational& b) { return *this = *this / b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        using I = __int128;
        return I(a.num_) * b.den_ < I(b.num_) * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    Rational abs() const { return num_ < 0 ? -*this : *this; }

    double to_double() const { return double(num_) / double(den_); }

    /// Canonical text form: "7", "-3/4".
    std::string str() const {
        std::string s = std::to_string(num_);
        if (den_ != 1) s += "/" + std::to_string(den_);
        return s;
    }

    /// Accepts "p" and "p/q" with optional leading sign on p; q must be a
    /// plain positive integer.
    static Rational parse(const std::string& text) {
        auto slash = text.find('/');
        try {
            if (slash == std::string::npos)
                return Rational(parse_int(text, true), 1);
            return Rational(parse_int(text.substr(0, slash), true),
                            parse_int(text.substr(slash + 1), false));
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument("not a rational: '" + text + "'");
        } catch (const std::out_of_range&) {
            throw std::overflow_error("rational literal out of range: '" + text + "'");
        }
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    long long num_ = 0;
    long long den_ = 1;

    static unsigned __int128 gcd128(unsigned __int128 a, unsigned __int128 b) {
        while (b != 0) {
            auto t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    static Rational make(__int128 n, __int128 d) {
        if (d == 0) throw std::domain_error("rational with zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        unsigned __int128 un = n < 0 ? (unsigned __int128)(-n) : (unsigned __int128)n;
        if (un != 0) {
            auto g = gcd128(un, (unsigned __int128)d);
            n /= (__int128)g;
            d /= (__int128)g;
            un /= g;
        } else {
            d = 1;
        }
        constexpr unsigned __int128 kMax = (unsigned __int128)INT64_MAX;
        if (un > kMax || (unsigned __int128)d > kMax)
            throw std::overflow_error("rational overflow; value does not fit exact 64-bit mode");
        Rational r;
        r.num_ = (long long)n;
        r.den_ = (long long)d;
        return r;
    }

    void assign(long long n, long long d) { *this = make(n, d); }

    static long long parse_int(const std::string& s, bool allow_sign) {
        if (s.empty()) throw std::invalid_argument(s);
        size_t i = (allow_sign && (s[0] == '+' || s[0] == '-')) ? 1 : 0;
        if (i == s.size()) throw std::invalid_argument(s);
        for (size_t k = i; k < s.size(); ++k)
            if (s[k] < '0' || s[k] > '9') throw std::invalid_argument(s);
        size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    }
};

inline Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace dynkin
