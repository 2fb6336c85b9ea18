#pragma once

#include "mtn/common.hpp"

#include <cmath>

namespace mtn {

// Scalar tracked through its exact square. Rationals embed exactly; square
// roots of rationals keep an exact square and recover a rational value only
// when the square is a perfect square. Scalars that came out of binary64
// arithmetic carry approx=true and never count as exact.
struct QScalar {
    int sign = 0;
    Rational sq = 0;              // |value|^2
    std::optional<Rational> rat;  // exact |value| with sign applied
    bool approx = false;

    QScalar() = default;

    static QScalar from_rational(const Rational& r) {
        QScalar q;
        q.sign = sign_of(r);
        q.sq = r * r;
        q.rat = r;
        return q;
    }

    static QScalar from_int(long long v) { return from_rational(Rational(v)); }

    // value = sign * sqrt(square)
    static QScalar from_square(const Rational& square, int sign = 1) {
        if (square < 0) throw std::invalid_argument("QScalar: negative square");
        QScalar q;
        q.sq = square;
        q.sign = (square == 0) ? 0 : (sign >= 0 ? 1 : -1);
        if (auto r = exact_sqrt(square)) q.rat = (q.sign >= 0) ? *r : Rational(-*r);
        return q;
    }

    static QScalar from_double(double v) {
        QScalar q;
        if (v == 0.0) return q;
        q.sign = v > 0 ? 1 : -1;
        Rational r(v); // exact binary64 value
        q.rat = r;
        q.sq = r * r;
        q.approx = true;
        return q;
    }

    bool is_zero() const { return sign == 0; }
    bool exact() const { return !approx; }
    bool has_rational() const { return rat.has_value(); }

    Rational rational_value() const {
        if (!rat) throw std::logic_error("QScalar: no exact rational value");
        return *rat;
    }

    double value() const {
        if (rat) return to_double(*rat);
        return sign * std::sqrt(to_double(sq));
    }

    QScalar operator-() const {
        QScalar q = *this;
        q.sign = -q.sign;
        if (q.rat) q.rat = -*q.rat;
        return q;
    }

    QScalar abs() const {
        QScalar q = *this;
        if (q.sign < 0) return -q;
        return q;
    }

    friend QScalar operator*(const QScalar& a, const QScalar& b) {
        QScalar q;
        q.sign = a.sign * b.sign;
        if (q.sign == 0) return q;
        q.sq = a.sq * b.sq;
        q.approx = a.approx || b.approx;
        if (a.rat && b.rat) {
            q.rat = *a.rat * *b.rat;
        } else if (auto r = exact_sqrt(q.sq)) {
            q.rat = (q.sign >= 0) ? *r : Rational(-*r);
        }
        return q;
    }

    QScalar scaled(const Rational& c) const { return *this * from_rational(c); }

    // Addition is only defined where the design guarantees no irrational
    // collision: one side zero, or both sides exact rationals.
    friend QScalar operator+(const QScalar& a, const QScalar& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        if (a.rat && b.rat) {
            QScalar q = from_rational(*a.rat + *b.rat);
            q.approx = a.approx || b.approx;
            return q;
        }
        throw std::logic_error("QScalar: sum of incommensurable square roots");
    }
};

} // namespace mtn
