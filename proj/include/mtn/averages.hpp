#pragma once

#include "mtn/schreier.hpp"
#include "mtn/vec.hpp"

#include <map>
#include <numeric>
#include <string>
#include <vector>

namespace mtn::averages {

namespace detail {

// Appends the coefficients of scale * a_n^{L[from..]}; every support index is
// touched exactly once, so the whole construction is linear in the support.
// Returns the number of leading elements of L consumed.
inline std::size_t raa_collect(std::int64_t n, const std::vector<std::int64_t>& L,
                               std::size_t from, const Rational& scale,
                               std::vector<std::pair<std::int64_t, Rational>>& out) {
    if (from >= L.size())
        throw std::invalid_argument("repeated_average: index list exhausted");
    if (n == 0) {
        out.emplace_back(L[from], scale);
        return 1;
    }
    const std::int64_t l1 = L[from];
    const Rational w = scale / l1;
    std::size_t pos = from;
    for (std::int64_t k = 0; k < l1; ++k) pos += raa_collect(n - 1, L, pos, w, out);
    return pos - from;
}

} // namespace detail

// The repeated-averages hierarchy: a_0^L = e_{min L}, and a_{n+1}^L averages
// the first (min L) successive a_n sub-averages. Exact rational coefficients;
// throws when the finite list L runs out mid-recursion.
inline Vec repeated_average(std::int64_t n, const std::vector<std::int64_t>& L) {
    if (n < 0) throw std::invalid_argument("repeated_average: n must be >= 0");
    for (std::size_t i = 0; i < L.size(); ++i) {
        if (L[i] < 1 || (i > 0 && L[i] <= L[i - 1]))
            throw std::invalid_argument("repeated_average: L must be strictly increasing, >= 1");
    }
    std::vector<std::pair<std::int64_t, Rational>> entries;
    detail::raa_collect(n, L, 0, Rational(1), entries);
    return Vec::from_rationals(entries);
}

// ---------------------------------------------------------------------------
// max over G in S_k, G c supp x, of sum_{i in G} |b_i|^p  (reported as the
// exact p-th power mass). Tiered exact search:
//   k = 0          -> single heaviest entry
//   k = 1, masses nonincreasing -> linear scan over the choice of min G
//   otherwise      -> DFS over the sorted support driving the greedy budget
//                     machine, memoized on (position, machine state)
// ---------------------------------------------------------------------------

struct MassResult {
    Rational mass_p; // exact max of sum |b_i|^p over admissible G
    double value(int p) const {
        const double m = to_double(mass_p);
        return p == 2 ? std::sqrt(m) : m;
    }
};

namespace detail {

struct MinsState {
    bool started = false;
    std::int64_t init = 0;
    std::vector<std::int64_t> b;

    bool include(std::int64_t e, std::int64_t k) {
        if (k <= 0) { // S_0: only a single element fits
            if (!started) { started = true; init = e - 1; return true; }
            return false;
        }
        if (!started) {
            started = true;
            init = e - 1;
            return true;
        }
        std::size_t lvl = 0;
        while (lvl < b.size() && b[lvl] == 0) ++lvl;
        if (lvl >= b.size()) {
            if (static_cast<std::int64_t>(b.size()) >= k || init == 0) return false;
            b.push_back(init - 1);
        } else {
            b[lvl] -= 1;
        }
        for (std::size_t i = 0; i < lvl; ++i) b[i] = e - 1;
        return true;
    }

    std::string key() const {
        std::string s = started ? "s" : "n";
        s += std::to_string(init);
        for (auto v : b) {
            s += ',';
            s += std::to_string(v);
        }
        return s;
    }
};

struct MassDfs {
    const std::vector<std::int64_t>& vals;
    const std::vector<Rational>& mass;
    std::int64_t k;
    std::map<std::pair<std::size_t, std::string>, Rational> memo;

    Rational best_from(std::size_t i, const MinsState& st) {
        if (i == vals.size()) return 0;
        const auto key = std::make_pair(i, st.key());
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        Rational best = best_from(i + 1, st); // skip vals[i]
        MinsState nxt = st;
        if (nxt.include(vals[i], k)) {
            Rational take = mass[i] + best_from(i + 1, nxt);
            if (take > best) best = take;
        }
        memo.emplace(key, best);
        return best;
    }
};

} // namespace detail

inline MassResult max_schreier_weight(const Vec& x, int p, std::int64_t k,
                                      std::size_t dfs_cap = 26) {
    if (p != 1 && p != 2) throw std::invalid_argument("max_schreier_weight: p must be 1 or 2");
    if (k < 0) throw std::invalid_argument("max_schreier_weight: k must be >= 0");
    std::vector<std::int64_t> vals;
    std::vector<Rational> mass;
    for (const auto& [i, c] : x.entries()) {
        if (c.approx) throw std::invalid_argument("max_schreier_weight: needs exact entries");
        vals.push_back(i);
        if (p == 1) {
            if (!c.has_rational())
                throw std::invalid_argument("max_schreier_weight: p=1 needs rational entries");
            mass.push_back(boost::multiprecision::abs(c.rational_value()));
        } else {
            mass.push_back(c.sq);
        }
    }
    if (vals.empty()) return {Rational(0)};

    if (k == 0) {
        Rational best = 0;
        for (const auto& m : mass) best = std::max(best, m);
        return {best};
    }

    if (k == 1) {
        bool noninc = true;
        for (std::size_t i = 0; i + 1 < mass.size(); ++i)
            if (mass[i] < mass[i + 1]) { noninc = false; break; }
        if (noninc) {
            // optimal G with min at position i takes the v_i - 1 immediately
            // following entries
            std::vector<Rational> pre(mass.size() + 1, Rational(0));
            for (std::size_t i = 0; i < mass.size(); ++i) pre[i + 1] = pre[i] + mass[i];
            Rational best = 0;
            for (std::size_t i = 0; i < vals.size(); ++i) {
                const auto cap = static_cast<std::size_t>(
                    std::min<std::int64_t>(vals[i], static_cast<std::int64_t>(vals.size() - i)));
                const Rational cand = pre[i + cap] - pre[i];
                if (cand > best) best = cand;
            }
            return {best};
        }
    }

    if (vals.size() > dfs_cap)
        throw std::invalid_argument("max_schreier_weight: support exceeds search cap");
    detail::MassDfs dfs{vals, mass, k, {}};
    return {dfs.best_from(0, detail::MinsState{})};
}

// ---------------------------------------------------------------------------
// basic special convex combinations
// ---------------------------------------------------------------------------

struct BsccVerdict {
    bool ok = false;
    std::string reason;
};

// (p, eps, n)-bscc: support in S_n, unit l_p mass, and for 1 <= k < n every
// S_k-portion of the mass stays below eps.
inline BsccVerdict is_bscc(const Vec& x, int p, const Rational& eps, std::int64_t n) {
    if (x.empty()) return {false, "zero vector"};
    if (!schreier::is_member(x.support(), n))
        return {false, "support not in S_" + std::to_string(n)};
    Rational total = 0;
    for (const auto& [i, c] : x.entries()) {
        if (c.approx) return {false, "entries are not exact"};
        if (p == 1) {
            if (!c.has_rational()) return {false, "p=1 entry not rational"};
            total += boost::multiprecision::abs(c.rational_value());
        } else {
            total += c.sq;
        }
    }
    if (total != 1) return {false, "l_p mass is " + to_string(total) + ", not 1"};
    const Rational eps_p = (p == 2) ? Rational(eps * eps) : eps;
    for (std::int64_t k = 1; k < n; ++k) {
        const auto mr = max_schreier_weight(x, p, k);
        if (!(mr.mass_p < eps_p))
            return {false, "S_" + std::to_string(k) + " mass " + to_string(mr.mass_p) +
                               " not below eps^p = " + to_string(eps_p)};
    }
    return {true, {}};
}

struct SccWitness {
    int p = 2;
    Rational eps;
    std::int64_t n = 0;
    std::vector<std::int64_t> anchors;   // t_k = maxsupp y_k
    std::vector<Rational> b_sq;          // b_k^p tracked exactly (squares for p=2)
    bool anchors_maximal = false;

    Vec anchor_vector(int pp) const {
        Vec v;
        for (std::size_t i = 0; i < anchors.size(); ++i) {
            if (pp == 1)
                v.set(anchors[i], QScalar::from_rational(b_sq[i]));
            else
                v.set(anchors[i], QScalar::from_square(b_sq[i]));
        }
        return v;
    }
};

struct BsccBuild {
    Vec x;
    SccWitness witness;
};

// Existence route for bscc's: take the repeated average a_n^L and, for p = 2,
// its entrywise square root. Requires 3/min L < eps^p.
inline BsccBuild make_bscc(int p, const Rational& eps, std::int64_t n,
                           const std::vector<std::int64_t>& L) {
    if (p != 1 && p != 2) throw std::invalid_argument("make_bscc: p must be 1 or 2");
    if (L.empty()) throw std::invalid_argument("make_bscc: empty index list");
    const Rational eps_p = (p == 2) ? Rational(eps * eps) : eps;
    if (!(Rational(3, L.front()) < eps_p))
        throw std::invalid_argument("make_bscc: requires 3/min L < eps^p (min L too small)");
    Vec a = repeated_average(n, L);
    BsccBuild out;
    out.witness.p = p;
    out.witness.eps = eps;
    out.witness.n = n;
    if (p == 1) {
        out.x = a;
    } else {
        for (const auto& [i, c] : a.entries())
            out.x.set(i, QScalar::from_square(c.rational_value()));
    }
    for (const auto& [i, c] : a.entries()) {
        out.witness.anchors.push_back(i);
        out.witness.b_sq.push_back(c.rational_value());
    }
    if (auto v = is_bscc(out.x, p, eps, n); !v.ok)
        throw std::logic_error("make_bscc: construction failed verification: " + v.reason);
    return out;
}

struct SccBuild {
    std::vector<QScalar> coeffs; // one per used block
    SccWitness witness;
    std::size_t used_blocks = 0;
};

// Special convex combination over a block sequence (p = 2 convention).
// Coefficients come from the repeated average on the anchor list
// t_k = maxsupp y_k; the combination uses the maximal initial anchor segment.
inline SccBuild make_scc(const std::vector<Vec>& blocks, const Rational& eps, std::int64_t n) {
    if (blocks.empty()) throw std::invalid_argument("make_scc: empty block list");
    if (!Vec::successive(blocks))
        throw std::invalid_argument("make_scc: blocks must be successive and nonzero");
    std::vector<std::int64_t> anchors;
    anchors.reserve(blocks.size());
    for (const auto& y : blocks) anchors.push_back(y.maxsupp());
    Vec a;
    try {
        a = repeated_average(n, anchors);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument(
            "make_scc: block list exhausted before an S_n-maximal anchor set is reached");
    }
    SccBuild out;
    out.witness.p = 2;
    out.witness.eps = eps;
    out.witness.n = n;
    schreier::RankMachine machine;
    for (const auto& [t, c] : a.entries()) {
        out.witness.anchors.push_back(t);
        out.witness.b_sq.push_back(c.rational_value());
        out.coeffs.push_back(QScalar::from_square(c.rational_value()));
        machine.include(t);
    }
    out.used_blocks = out.coeffs.size();
    out.witness.anchors_maximal = machine.saturated(n);
    const Vec anchor_vec = out.witness.anchor_vector(2);
    if (auto v = is_bscc(anchor_vec, 2, eps, n); !v.ok)
        throw std::invalid_argument("make_scc: cannot reach eps with these blocks: " + v.reason);
    return out;
}

// combine blocks with scc coefficients (disjoint supports)
inline Vec combine(const std::vector<Vec>& blocks, const std::vector<QScalar>& coeffs) {
    if (coeffs.size() > blocks.size()) throw std::invalid_argument("combine: size mismatch");
    Vec acc;
    for (std::size_t k = 0; k < coeffs.size(); ++k) acc = acc + blocks[k].scaled(coeffs[k]);
    return acc;
}

// Instance check for the repeated-average mass bound: every S_m-portion of
// a_n^L (m < n) weighs less than 3/min L. Reports, per level, the exact
// maximum (or that the bound holds trivially because the whole l1 mass does).
struct AverageMassReport {
    std::int64_t level = 0;
    bool holds = false;
    bool trivial_l1 = false;
    Rational bound;
    Rational max_mass; // meaningful when !trivial_l1
};

inline std::vector<AverageMassReport> check_average_mass(const Vec& a, std::int64_t min_L,
                                                         std::int64_t n,
                                                         bool include_level0 = true) {
    std::vector<AverageMassReport> out;
    const Rational bound(3, min_L);
    const Rational total = a.l1_exact();
    for (std::int64_t m = include_level0 ? 0 : 1; m < n; ++m) {
        AverageMassReport r;
        r.level = m;
        r.bound = bound;
        if (total < bound) {
            r.holds = true;
            r.trivial_l1 = true;
            r.max_mass = total;
        } else {
            r.max_mass = max_schreier_weight(a, 1, m).mass_p;
            r.holds = r.max_mass < bound;
        }
        out.push_back(r);
    }
    return out;
}

} // namespace mtn::averages
