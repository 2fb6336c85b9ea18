#pragma once

#include "mtn/finite_set.hpp"

#include <map>
#include <string>
#include <vector>

namespace mtn::schreier {

constexpr std::int64_t kRankInfinite = -1;

// Incremental greedy acceptor for the generalized Schreier hierarchy.
//
// Feeding the elements of a set in increasing order maintains the greedy
// decomposition into maximal initial segments: budget[k] counts how many more
// level-k blocks may still be opened inside the current level-(k+1) block.
// Opening a block at element e resets every lower budget to e-1. The family
// is spreading and hereditary, so the greedy decomposition is optimal and the
// deepest level ever consumed equals the least n with F in S_n.
class RankMachine {
public:
    bool started() const { return started_; }

    // Returns the level consumed by this element (1-based), 0 for the first
    // element, or kRankInfinite when the element cannot be absorbed at any
    // level (min = 1 pathologies).
    std::int64_t include(std::int64_t e) {
        if (!started_) {
            started_ = true;
            init_ = e - 1;
            return 0;
        }
        std::size_t k = 0;
        while (k < b_.size() && b_[k] == 0) ++k;
        if (k >= b_.size()) {
            if (init_ == 0) return kRankInfinite;
            b_.push_back(init_ - 1);
        } else {
            b_[k] -= 1;
        }
        for (std::size_t i = 0; i < k; ++i) b_[i] = e - 1;
        return static_cast<std::int64_t>(k + 1);
    }

    // True when no element can be appended while staying inside S_n.
    bool saturated(std::int64_t n) const {
        if (!started_) return false;
        for (std::size_t k = 0; k < b_.size() && k < static_cast<std::size_t>(n); ++k)
            if (b_[k] > 0) return false;
        if (static_cast<std::int64_t>(b_.size()) < n && init_ > 0) return false;
        return true;
    }

private:
    bool started_ = false;
    std::int64_t init_ = 0;            // pristine budget at untouched levels
    std::vector<std::int64_t> b_;      // touched levels, bottom up
};

// Least n with F in S_n; kRankInfinite when F belongs to no S_n.
inline std::int64_t rank(const FiniteSet& F) {
    if (F.size() <= 1) return 0;
    RankMachine m;
    std::int64_t r = 0;
    for (auto e : F.elems) {
        const auto lvl = m.include(e);
        if (lvl == kRankInfinite) return kRankInfinite;
        r = std::max(r, lvl);
    }
    return r;
}

enum class Variant { standard, modified };

namespace detail {

using Memo = std::map<std::pair<std::vector<std::int64_t>, std::int64_t>, bool>;

bool member_modified(const std::vector<std::int64_t>& F, std::int64_t n, Memo& memo);

// Search for a partition of F into at most `parts_cap` pairwise disjoint
// pieces, each a member of S^M_{n-1}. Pieces are grown element by element;
// hereditarity makes "partial piece not a member" a sound pruning rule.
inline bool partition_search(const std::vector<std::int64_t>& F, std::size_t idx,
                             std::vector<std::vector<std::int64_t>>& parts,
                             std::size_t parts_cap, std::int64_t sub_level, Memo& memo) {
    if (idx == F.size()) return true;
    const auto e = F[idx];
    for (std::size_t p = 0; p <= parts.size() && p < parts_cap; ++p) {
        if (p == parts.size()) parts.emplace_back();
        parts[p].push_back(e);
        if (member_modified(parts[p], sub_level, memo) &&
            partition_search(F, idx + 1, parts, parts_cap, sub_level, memo))
            return true;
        parts[p].pop_back();
        if (parts[p].empty()) {
            parts.pop_back();
            break; // opening a later empty part is symmetric
        }
    }
    return false;
}

inline bool member_modified(const std::vector<std::int64_t>& F, std::int64_t n, Memo& memo) {
    if (F.size() <= 1) return true;
    if (n == 0) return false;
    if (static_cast<std::int64_t>(F.size()) <= F.front()) return true; // already in S_1
    if (n == 1) return false;
    // S_n c S^M_n, so a standard accept settles it cheaply.
    {
        FiniteSet fs;
        fs.elems = F;
        const auto r = rank(fs);
        if (r != kRankInfinite && r <= n) return true;
    }
    const auto key = std::make_pair(F, n);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::vector<std::vector<std::int64_t>> parts;
    const bool ok =
        partition_search(F, 0, parts, static_cast<std::size_t>(F.front()), n - 1, memo);
    memo.emplace(key, ok);
    return ok;
}

} // namespace detail

// Membership in S_n (standard, via the greedy rank machine) or S^M_n
// (modified, via exhaustive disjoint-decomposition search). S_0 = {empty} u
// {singletons} by convention; membership stabilizes above n = |F|, which the
// modified search uses to stay total for huge n.
inline bool is_member(const FiniteSet& F, std::int64_t n, Variant v = Variant::standard) {
    if (n < 0) throw std::invalid_argument("is_member: n must be >= 0");
    if (v == Variant::standard) {
        const auto r = rank(F);
        return r != kRankInfinite && r <= n;
    }
    detail::Memo memo;
    const auto cap = std::min<std::int64_t>(n, static_cast<std::int64_t>(F.size()));
    return detail::member_modified(F.elems, cap, memo);
}

// F in S_n and no m > max F keeps F u {m} inside S_n. Membership of F u {m}
// is monotone in m by the spreading property, so one sufficiently large probe
// decides; m beyond |F|+1 can only ever sit in singleton blocks.
inline bool is_maximal(const FiniteSet& F, std::int64_t n) {
    if (!is_member(F, n)) throw std::invalid_argument("is_maximal: F is not in S_n");
    if (F.empty()) return false;
    const std::int64_t probe = F.max() + static_cast<std::int64_t>(F.size()) + 2;
    return !is_member(F.with(probe), n);
}

struct FamilyVerdict {
    bool ok = false;
    std::string violation; // empty when ok
};

// Mode invariant plus {min E_i} in S_n.
inline FamilyVerdict check_family(const SetFamily& fam, std::int64_t n) {
    if (auto v = fam.mode_violation(); !v.empty()) return {false, v};
    const auto mins = fam.mins();
    if (!is_member(mins, n))
        return {false, "family mins " + mins.str() + " not in S_" + std::to_string(n)};
    return {true, {}};
}

// All members of S_n inside {1..universe_max}, ordered by size then
// lexicographically.
inline std::vector<FiniteSet> enumerate(std::int64_t n, std::int64_t universe_max,
                                        std::int64_t cap = 14) {
    if (universe_max > cap)
        throw std::invalid_argument("enumerate: universe_max exceeds cap " + std::to_string(cap));
    if (universe_max < 0) universe_max = 0;
    std::vector<FiniteSet> out;
    const std::uint64_t limit = 1ull << universe_max;
    for (std::uint64_t mask = 0; mask < limit; ++mask) {
        std::vector<std::int64_t> v;
        for (std::int64_t i = 0; i < universe_max; ++i)
            if (mask & (1ull << i)) v.push_back(i + 1);
        FiniteSet F(std::move(v));
        if (is_member(F, n)) out.push_back(std::move(F));
    }
    std::sort(out.begin(), out.end(), [](const FiniteSet& a, const FiniteSet& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a.elems < b.elems;
    });
    return out;
}

namespace detail {

// successive decomposition: blocks are consecutive chunks of the sorted set
inline bool conv_standard(const std::vector<std::int64_t>& F, std::size_t from,
                          std::vector<std::int64_t>& mins, std::int64_t p_lvl,
                          std::int64_t q_lvl) {
    if (from == F.size()) {
        FiniteSet m;
        m.elems = mins;
        return is_member(m, p_lvl);
    }
    for (std::size_t to = from + 1; to <= F.size(); ++to) {
        FiniteSet block(std::vector<std::int64_t>(F.begin() + from, F.begin() + to));
        if (!is_member(block, q_lvl)) continue; // hereditary: longer blocks only get harder
        mins.push_back(F[from]);
        if (conv_standard(F, to, mins, p_lvl, q_lvl)) return true;
        mins.pop_back();
    }
    return false;
}

// disjoint decomposition for the modified convolution
inline bool conv_modified(const std::vector<std::int64_t>& F, std::size_t idx,
                          std::vector<std::vector<std::int64_t>>& parts, std::int64_t p_lvl,
                          std::int64_t q_lvl, Memo& memo) {
    if (idx == F.size()) {
        std::vector<std::int64_t> mins;
        for (const auto& p : parts)
            if (!p.empty()) mins.push_back(p.front());
        std::sort(mins.begin(), mins.end());
        return member_modified(mins, p_lvl, memo);
    }
    const auto e = F[idx];
    for (std::size_t p = 0; p <= parts.size(); ++p) {
        if (p == parts.size()) parts.emplace_back();
        parts[p].push_back(e);
        if (member_modified(parts[p], q_lvl, memo) &&
            conv_modified(F, idx + 1, parts, p_lvl, q_lvl, memo))
            return true;
        parts[p].pop_back();
        if (parts[p].empty()) {
            parts.pop_back();
            break;
        }
    }
    return false;
}

} // namespace detail

// Membership in the convolution S_P[S_Q] (or its modified counterpart),
// decided by exhaustive decomposition.
inline bool convolution_member(const FiniteSet& F, std::int64_t p_level, std::int64_t q_level,
                               bool modified = false) {
    if (p_level < 0 || q_level < 0)
        throw std::invalid_argument("convolution_member: levels must be >= 0");
    if (F.empty()) return true;
    if (!modified) {
        std::vector<std::int64_t> mins;
        return detail::conv_standard(F.elems, 0, mins, p_level, q_level);
    }
    detail::Memo memo;
    std::vector<std::vector<std::int64_t>> parts;
    const auto pc = std::min<std::int64_t>(p_level, static_cast<std::int64_t>(F.size()));
    const auto qc = std::min<std::int64_t>(q_level, static_cast<std::int64_t>(F.size()));
    return detail::conv_modified(F.elems, 0, parts, pc, qc, memo);
}

} // namespace mtn::schreier
