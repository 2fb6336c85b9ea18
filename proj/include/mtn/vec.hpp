#pragma once

#include "mtn/finite_set.hpp"
#include "mtn/qscalar.hpp"

#include <algorithm>
#include <map>
#include <vector>

namespace mtn {

// Finitely supported coefficient sequence on the unit vector basis. Entries
// are QScalars so that square-root coefficients coming from p=2 convex
// combinations stay exactly square-tracked.
class Vec {
public:
    Vec() = default;

    static Vec basis(std::int64_t idx, const QScalar& c = QScalar::from_int(1)) {
        Vec v;
        v.set(idx, c);
        return v;
    }

    static Vec from_rationals(const std::vector<std::pair<std::int64_t, Rational>>& entries) {
        Vec v;
        for (const auto& [i, r] : entries) v.set(i, QScalar::from_rational(r));
        return v;
    }

    void set(std::int64_t idx, const QScalar& c) {
        if (idx < 1) throw std::invalid_argument("Vec: index must be >= 1");
        if (c.is_zero()) {
            m_.erase(idx);
            return;
        }
        m_[idx] = c;
    }

    QScalar coeff(std::int64_t idx) const {
        auto it = m_.find(idx);
        return it == m_.end() ? QScalar{} : it->second;
    }

    bool empty() const { return m_.empty(); }
    std::size_t support_size() const { return m_.size(); }

    FiniteSet support() const {
        std::vector<std::int64_t> v;
        v.reserve(m_.size());
        for (const auto& [i, c] : m_) v.push_back(i);
        return FiniteSet(std::move(v));
    }

    std::int64_t minsupp() const {
        if (empty()) throw std::logic_error("minsupp of zero vector");
        return m_.begin()->first;
    }
    std::int64_t maxsupp() const {
        if (empty()) throw std::logic_error("maxsupp of zero vector");
        return m_.rbegin()->first;
    }

    // smallest interval containing the support, as [lo, hi]
    std::pair<std::int64_t, std::int64_t> range() const { return {minsupp(), maxsupp()}; }

    const std::map<std::int64_t, QScalar>& entries() const { return m_; }

    bool all_exact() const {
        for (const auto& [i, c] : m_)
            if (c.approx) return false;
        return true;
    }

    bool all_rational() const {
        for (const auto& [i, c] : m_)
            if (!c.has_rational()) return false;
        return true;
    }

    Vec restrict(const FiniteSet& E) const {
        Vec v;
        for (const auto& [i, c] : m_)
            if (E.contains(i)) v.m_[i] = c;
        return v;
    }

    Vec restrict_interval(std::int64_t lo, std::int64_t hi) const {
        Vec v;
        for (const auto& [i, c] : m_)
            if (i >= lo && i <= hi) v.m_[i] = c;
        return v;
    }

    Vec scaled(const QScalar& s) const {
        Vec v;
        if (s.is_zero()) return v;
        for (const auto& [i, c] : m_) v.m_[i] = c * s;
        return v;
    }

    friend Vec operator+(const Vec& a, const Vec& b) {
        Vec v = a;
        for (const auto& [i, c] : b.m_) {
            auto it = v.m_.find(i);
            if (it == v.m_.end()) {
                v.m_[i] = c;
            } else {
                auto s = it->second + c; // throws on irrational collision
                if (s.is_zero()) v.m_.erase(it); else it->second = s;
            }
        }
        return v;
    }

    Rational l1_exact() const {
        Rational s = 0;
        for (const auto& [i, c] : m_) {
            if (!c.has_rational() || c.approx)
                throw std::logic_error("l1_exact: vector has non-rational entries");
            s += boost::multiprecision::abs(c.rational_value());
        }
        return s;
    }

    double linf() const {
        double best = 0;
        for (const auto& [i, c] : m_) best = std::max(best, std::abs(c.value()));
        return best;
    }

    double l1() const {
        double s = 0;
        for (const auto& [i, c] : m_) s += std::abs(c.value());
        return s;
    }

    // pairwise disjoint supports
    static bool successive(const std::vector<Vec>& xs) {
        for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
            if (xs[k].empty() || xs[k + 1].empty()) return false;
            if (xs[k].maxsupp() >= xs[k + 1].minsupp()) return false;
        }
        return !xs.empty();
    }

    static bool pairwise_disjoint(const std::vector<Vec>& xs) {
        std::vector<FiniteSet> sup;
        for (const auto& x : xs) sup.push_back(x.support());
        for (std::size_t i = 0; i < sup.size(); ++i)
            for (std::size_t j = i + 1; j < sup.size(); ++j)
                if (!FiniteSet::disjoint(sup[i], sup[j])) return false;
        return true;
    }

private:
    std::map<std::int64_t, QScalar> m_;
};

} // namespace mtn
