#pragma once

#include "mtn/finite_set.hpp"
#include "mtn/params.hpp"
#include "mtn/schreier.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace mtn {

// One entry of a special sequence: the pair (E, 2j). j is stored halved; the
// attached weight is m_{2j}.
struct SpecialPair {
    FiniteSet E;
    std::int64_t j = 0;

    bool operator==(const SpecialPair& o) const { return j == o.j && E == o.E; }
    bool operator<(const SpecialPair& o) const {
        if (E != o.E) return E < o.E;
        return j < o.j;
    }
};

struct SpecialSequence {
    std::vector<SpecialPair> pairs;
    std::optional<std::int64_t> target_j; // odd-level qualification target

    bool empty() const { return pairs.empty(); }
    std::size_t size() const { return pairs.size(); }

    SpecialSequence prefix(std::size_t len) const {
        SpecialSequence s;
        s.pairs.assign(pairs.begin(), pairs.begin() + len);
        return s;
    }

    SpecialSequence extended(const SpecialPair& p) const {
        SpecialSequence s = *this;
        s.pairs.push_back(p);
        return s;
    }

    bool operator==(const SpecialSequence& o) const { return pairs == o.pairs; }
    bool operator<(const SpecialSequence& o) const { return pairs < o.pairs; }
};

// Membership in Sigma: pairwise disjoint sets, strictly increasing weight
// indices, first index in N1 and the rest in N2. Empty reason = member.
inline std::string sigma_membership_violation(const SpecialSequence& s,
                                              const ParameterSystem& P) {
    if (s.empty()) return "empty sequence";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.pairs[i].E.empty()) return "pair " + std::to_string(i) + " has empty set";
        for (std::size_t l = i + 1; l < s.size(); ++l)
            if (!FiniteSet::disjoint(s.pairs[i].E, s.pairs[l].E))
                return "sets " + std::to_string(i) + " and " + std::to_string(l) +
                       " are not disjoint";
        if (i > 0 && s.pairs[i].j <= s.pairs[i - 1].j)
            return "weight indices not strictly increasing at " + std::to_string(i);
    }
    if (!P.in_N1(s.pairs[0].j)) return "j_1 not in N1";
    for (std::size_t i = 1; i < s.size(); ++i)
        if (!P.in_N2(s.pairs[i].j)) return "j_" + std::to_string(i + 1) + " not in N2";
    return {};
}

// Stateful realization of the injective coding sigma. Assignments follow the
// smallest-valid-unused rule, so a registry replayed in the same query order
// reproduces identical indices. Single writer, multiple readers.
class SigmaRegistry {
public:
    struct Entry {
        SpecialSequence seq;
        std::int64_t sigma = 0;
    };

    std::optional<std::int64_t> lookup(const SpecialSequence& s) const {
        auto it = map_.find(s);
        if (it == map_.end()) return std::nullopt;
        return it->second;
    }

    const std::vector<Entry>& log() const { return log_; }

    bool index_used(std::int64_t j) const { return used_.count(j) > 0; }

    // sigma over the prefix chain: every j_{i+1} must equal sigma of the
    // length-i prefix. Empty reason = consistent.
    std::string chain_violation(const SpecialSequence& s) const {
        for (std::size_t i = 1; i < s.size(); ++i) {
            auto got = lookup(s.prefix(i));
            if (!got) return "prefix of length " + std::to_string(i) + " not assigned";
            if (*got != s.pairs[i].j)
                return "j_" + std::to_string(i + 1) + " = " + std::to_string(s.pairs[i].j) +
                       " does not match sigma(prefix) = " + std::to_string(*got);
        }
        return {};
    }

    // Assign sigma(s): the smallest unused j in N2 exceeding the last index
    // of s whose weight clears the growth threshold
    //   m_{2j} > m_{2 sigma(parent)} * (maxsupp E_last)^2,
    // with sigma(empty) = 0 for the first assignment.
    std::int64_t assign(const SpecialSequence& s, const ParameterSystem& P) {
        if (auto got = lookup(s)) return *got;
        if (auto v = sigma_membership_violation(s, P); !v.empty())
            throw std::invalid_argument("sigma_assign: sequence not in Sigma: " + v);
        if (auto v = chain_violation(s); !v.empty())
            throw std::invalid_argument("sigma_assign: " + v);
        std::int64_t parent_sigma = 0;
        if (s.size() > 1) parent_sigma = *lookup(s.prefix(s.size() - 1));
        const BigInt threshold =
            P.m_at(2 * parent_sigma) * BigInt(s.pairs.back().E.max()) * BigInt(s.pairs.back().E.max());
        for (std::int64_t j = s.pairs.back().j + 1;; ++j) {
            if (!P.has_index(2 * j))
                throw std::out_of_range(
                    "sigma_assign: parameter list too short to satisfy the growth condition");
            if (!P.in_N2(j) || index_used(j)) continue;
            if (P.m_at(2 * j) > threshold) {
                record(s, j);
                return j;
            }
        }
    }

    // Accept a foreign assignment (certificate import, registry load) after
    // validating Sigma membership, chaining, injectivity and growth.
    void adopt(const SpecialSequence& s, std::int64_t j, const ParameterSystem& P) {
        if (auto got = lookup(s)) {
            if (*got != j)
                throw std::invalid_argument("adopt: sequence already assigned a different index");
            return;
        }
        if (auto v = sigma_membership_violation(s, P); !v.empty())
            throw std::invalid_argument("adopt: sequence not in Sigma: " + v);
        if (auto v = chain_violation(s); !v.empty()) throw std::invalid_argument("adopt: " + v);
        if (index_used(j)) throw std::invalid_argument("adopt: index already used (injectivity)");
        if (!P.in_N2(j)) throw std::invalid_argument("adopt: index not in N2");
        if (j <= s.pairs.back().j)
            throw std::invalid_argument("adopt: index does not exceed the last weight index");
        std::int64_t parent_sigma = 0;
        if (s.size() > 1) parent_sigma = *lookup(s.prefix(s.size() - 1));
        const BigInt threshold =
            P.m_at(2 * parent_sigma) * BigInt(s.pairs.back().E.max()) * BigInt(s.pairs.back().E.max());
        if (!(P.m_at(2 * j) > threshold))
            throw std::invalid_argument("adopt: growth condition violated");
        record(s, j);
    }

    SigmaRegistry clone() const { return *this; }

    std::size_t size() const { return log_.size(); }

private:
    void record(const SpecialSequence& s, std::int64_t j) {
        map_.emplace(s, j);
        used_.insert(j);
        log_.push_back({s, j});
    }

    std::map<SpecialSequence, std::int64_t> map_;
    std::set<std::int64_t> used_;
    std::vector<Entry> log_;
};

inline std::int64_t sigma_assign(SigmaRegistry& reg, const SpecialSequence& s,
                                 const ParameterSystem& P) {
    return reg.assign(s, P);
}

// s extended by (E, 2 sigma(s)); extending the empty sequence needs a caller
// choice of j_1 in N1.
inline SpecialSequence extend_special(SigmaRegistry& reg, const SpecialSequence& s,
                                      const FiniteSet& E, const ParameterSystem& P,
                                      std::optional<std::int64_t> j1 = std::nullopt) {
    if (E.empty()) throw std::invalid_argument("extend_special: empty set");
    for (const auto& p : s.pairs)
        if (!FiniteSet::disjoint(p.E, E))
            throw std::invalid_argument("extend_special: set overlaps the existing sequence");
    if (s.empty()) {
        if (!j1 || !P.in_N1(*j1))
            throw std::invalid_argument("extend_special: first pair needs j_1 in N1");
        return s.extended({E, *j1});
    }
    const auto j = reg.assign(s, P);
    return s.extended({E, j});
}

// Tree-like trichotomy for two sigma-special sequences.
struct TreelikeVerdict {
    enum class Kind { disjoint_weights, branch, prefix_equal, violation } kind;
    std::size_t d = 0; // 1-based branch position for Kind::branch
    std::string detail;
};

inline TreelikeVerdict check_treelike(const SpecialSequence& s, const SpecialSequence& t,
                                      const SigmaRegistry& reg, const ParameterSystem& P) {
    for (const auto* q : {&s, &t}) {
        if (auto v = sigma_membership_violation(*q, P); !v.empty())
            throw std::invalid_argument("check_treelike: not sigma-special: " + v);
        if (auto v = reg.chain_violation(*q); !v.empty())
            throw std::invalid_argument("check_treelike: not sigma-special: " + v);
    }
    const std::size_t minlen = std::min(s.size(), t.size());
    std::size_t d = 0;
    while (d < minlen && s.pairs[d] == t.pairs[d]) ++d;
    if (d == minlen) return {TreelikeVerdict::Kind::prefix_equal, minlen + 1,
                             "one sequence is a prefix of the other"};
    if (s.pairs[d].j == t.pairs[d].j) {
        if (s.pairs[d].E == t.pairs[d].E)
            return {TreelikeVerdict::Kind::violation, d + 1, "equal pairs beyond divergence"};
        for (std::size_t i = d + 1; i < minlen; ++i)
            if (s.pairs[i].j == t.pairs[i].j)
                return {TreelikeVerdict::Kind::violation, i + 1,
                        "weights coincide beyond the branch point"};
        return {TreelikeVerdict::Kind::branch, d + 1, {}};
    }
    // no shared branch: all weights must be pairwise distinct
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t l = 0; l < t.size(); ++l)
            if (s.pairs[i].j == t.pairs[l].j)
                return {TreelikeVerdict::Kind::violation, i + 1,
                        "weights coincide without a shared prefix"};
    return {TreelikeVerdict::Kind::disjoint_weights, 0, {}};
}

} // namespace mtn
