#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "dynkin/rational.hpp"

namespace dynkin {

/// Comparison policy shared by every module: exact for Rational, tolerance
/// scaled by max(1, |a|, |b|) for double. All inequality checks in float
/// mode go through here so verdicts cannot drift between consumers.
template <class S>
struct Arith;

template <>
struct Arith<Rational> {
    static constexpr bool exact = true;
    static bool eq(const Rational& a, const Rational& b, double) { return a == b; }
    static bool le(const Rational& a, const Rational& b, double) { return a <= b; }
    static bool lt(const Rational& a, const Rational& b, double) { return a < b; }
    static Rational abs(const Rational& a) { return a.abs(); }
    static Rational zero() { return Rational(0); }
    static Rational from_int(long long v) { return Rational(v); }
    static double to_double(const Rational& a) { return a.to_double(); }
    static std::string str(const Rational& a) { return a.str(); }
};

template <>
struct Arith<double> {
    static constexpr bool exact = false;
    static double scale(double a, double b) {
        return std::max({1.0, std::fabs(a), std::fabs(b)});
    }
    static bool eq(double a, double b, double tol) { return std::fabs(a - b) <= tol * scale(a, b); }
    static bool le(double a, double b, double tol) { return a <= b + tol * scale(a, b); }
    static bool lt(double a, double b, double tol) { return a < b - tol * scale(a, b); }
    static double abs(double a) { return std::fabs(a); }
    static double zero() { return 0.0; }
    static double from_int(long long v) { return double(v); }
    static double to_double(double a) { return a; }
    static std::string str(double a) { return std::to_string(a); }
};

template <class S>
S scalar_min(const S& a, const S& b) {
    return a < b ? a : b;
}

template <class S>
S scalar_max(const S& a, const S& b) {
    return a < b ? b : a;
}

}  // namespace dynkin
