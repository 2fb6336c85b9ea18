#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace mtn {

using BigInt   = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(const BigInt& z) { return z.convert_to<double>(); }

inline std::string to_string(const Rational& r) { return r.str(); }
inline std::string to_string(const BigInt& z) { return z.str(); }

// Accepts "p/q", "p", and a leading '-'.
inline Rational parse_rational(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    try {
        return Rational(s);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad rational literal: '" + s + "'");
    }
}

inline int sign_of(const Rational& r) {
    if (r > 0) return 1;
    if (r < 0) return -1;
    return 0;
}

inline bool exact_sqrt(const BigInt& z, BigInt& root) {
    if (z < 0) return false;
    root = boost::multiprecision::sqrt(z);
    return root * root == z;
}

// sqrt of a nonnegative rational, exact or nothing.
inline std::optional<Rational> exact_sqrt(const Rational& q) {
    if (q < 0) return std::nullopt;
    BigInt rn, rd;
    if (!exact_sqrt(numerator(q), rn)) return std::nullopt;
    if (!exact_sqrt(denominator(q), rd)) return std::nullopt;
    return Rational(rn, rd);
}

inline double log2_big(const BigInt& z) {
    if (z <= 0) throw std::invalid_argument("log2 of nonpositive value");
    const auto bits = boost::multiprecision::msb(z); // floor(log2 z)
    if (bits <= 52) return std::log2(z.convert_to<double>());
    BigInt shifted = z >> (bits - 52);
    return static_cast<double>(bits - 52) + std::log2(shifted.convert_to<double>());
}

constexpr double kRelTol = 1e-9;
constexpr double kLambdaSlack = 1e-12;

inline bool leq_tol(double a, double b, double tol = kRelTol) {
    return a <= b + tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

inline bool close_rel(double a, double b, double tol = kRelTol) {
    return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

} // namespace mtn
