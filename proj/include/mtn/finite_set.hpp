#pragma once

#include "mtn/common.hpp"

#include <algorithm>
#include <vector>

namespace mtn {

// Finite subset of {1,2,...} kept strictly increasing. Empty is allowed.
struct FiniteSet {
    std::vector<std::int64_t> elems;

    FiniteSet() = default;
    explicit FiniteSet(std::vector<std::int64_t> v) : elems(std::move(v)) { validate(); }
    FiniteSet(std::initializer_list<std::int64_t> v) : elems(v) { validate(); }

    void validate() const {
        for (std::size_t i = 0; i < elems.size(); ++i) {
            if (elems[i] < 1) throw std::invalid_argument("FiniteSet: elements must be >= 1");
            if (i > 0 && elems[i] <= elems[i - 1])
                throw std::invalid_argument("FiniteSet: elements must be strictly increasing");
        }
    }

    bool empty() const { return elems.empty(); }
    std::size_t size() const { return elems.size(); }
    std::int64_t min() const {
        if (empty()) throw std::logic_error("min of empty set");
        return elems.front();
    }
    std::int64_t max() const {
        if (empty()) throw std::logic_error("max of empty set");
        return elems.back();
    }
    bool contains(std::int64_t v) const {
        return std::binary_search(elems.begin(), elems.end(), v);
    }

    bool operator==(const FiniteSet& o) const { return elems == o.elems; }
    bool operator!=(const FiniteSet& o) const { return !(*this == o); }
    bool operator<(const FiniteSet& o) const { return elems < o.elems; }

    static bool disjoint(const FiniteSet& a, const FiniteSet& b) {
        std::size_t i = 0, j = 0;
        while (i < a.elems.size() && j < b.elems.size()) {
            if (a.elems[i] == b.elems[j]) return false;
            if (a.elems[i] < b.elems[j]) ++i; else ++j;
        }
        return true;
    }

    static FiniteSet unite(const FiniteSet& a, const FiniteSet& b) {
        std::vector<std::int64_t> out;
        out.reserve(a.size() + b.size());
        std::merge(a.elems.begin(), a.elems.end(), b.elems.begin(), b.elems.end(),
                   std::back_inserter(out));
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return FiniteSet(std::move(out));
    }

    // true when every element of *this is in o
    bool subset_of(const FiniteSet& o) const {
        return std::includes(o.elems.begin(), o.elems.end(), elems.begin(), elems.end());
    }

    FiniteSet with(std::int64_t v) const {
        auto e = elems;
        e.insert(std::lower_bound(e.begin(), e.end(), v), v);
        return FiniteSet(std::move(e));
    }

    std::string str() const {
        std::string s = "{";
        for (std::size_t i = 0; i < elems.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(elems[i]);
        }
        return s + "}";
    }
};

enum class FamilyMode { admissible, allowable };

// A finite family of finite sets: admissible = successive, allowable =
// pairwise disjoint.
struct SetFamily {
    std::vector<FiniteSet> members;
    FamilyMode mode = FamilyMode::allowable;

    // empty string when the mode invariant holds, else a description naming
    // the offending pair
    std::string mode_violation() const {
        for (std::size_t i = 0; i < members.size(); ++i) {
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                const auto& a = members[i];
                const auto& b = members[j];
                if (a.empty() || b.empty()) continue;
                if (mode == FamilyMode::admissible) {
                    if (a.max() >= b.min())
                        return "members " + std::to_string(i) + " and " + std::to_string(j) +
                               " are not successive";
                } else {
                    if (!FiniteSet::disjoint(a, b))
                        return "members " + std::to_string(i) + " and " + std::to_string(j) +
                               " are not disjoint";
                }
            }
        }
        return {};
    }

    FiniteSet mins() const {
        std::vector<std::int64_t> m;
        for (const auto& s : members)
            if (!s.empty()) m.push_back(s.min());
        std::sort(m.begin(), m.end());
        m.erase(std::unique(m.begin(), m.end()), m.end());
        return FiniteSet(std::move(m));
    }
};

} // namespace mtn
