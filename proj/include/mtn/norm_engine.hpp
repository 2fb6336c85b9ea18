#pragma once

#include "mtn/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace mtn::norm {

struct NormOptions {
    std::int64_t jmax = 3;        // even weights m_2..m_{2 jmax}, odd m_1..m_{2 jmax + 1}
    std::size_t dp_cap = 14;      // max support size for the subset DP
    std::size_t oracle_supp_cap = 6;
    int oracle_depth = 3;         // hard cap 6
    bool use_oracle = false;      // sigma-true odd search for the lower bound
    double tol = kRelTol;
    std::vector<FnPtr> extra_certificates; // user-supplied lower certificates
};

struct NormBounds {
    double lower = 0;
    FnPtr lower_certificate;
    double upper = 0;
    std::string upper_method = "even_only"; // even_only | relaxed_odd | linf
    bool exact = false;
    std::string note;

    static NormBounds zero() { return {0, nullptr, 0, "even_only", true, "zero vector"}; }
};

namespace detail {

// Budget machine over piece minima, bounded at `k` levels (see schreier.hpp).
struct PackState {
    bool started = false;
    std::int64_t init = 0;
    std::vector<std::int64_t> b;

    bool include(std::int64_t e, std::int64_t k) {
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
        std::string s = started ? "1" : "0";
        s += ':' + std::to_string(init);
        for (auto v : b) s += ',' + std::to_string(v);
        return s;
    }
};

struct EvenOp {
    std::int64_t j_half = 0;
    double m = 2;
    std::int64_t n_eff = 1;
    bool unconstrained = false; // mins-set condition can never bind
};

class Engine {
public:
    Engine(const Vec& x, const ParameterSystem& P, const NormOptions& opt, bool allow_odd)
        : P_(P), opt_(opt), allow_odd_(allow_odd) {
        for (const auto& [i, c] : x.entries()) {
            vals_.push_back(i);
            w_.push_back(std::abs(c.value()));
            sgn_.push_back(c.sign);
        }
        N_ = vals_.size();
        if (N_ > opt.dp_cap)
            throw std::invalid_argument("norm engine: support exceeds the subset-DP cap");
        build_ops();
        run();
    }

    double value() const { return N_ ? nv_.back() : 0.0; }

    double value_of_mask(std::uint32_t mask) const { return nv_[mask]; }

    FnPtr certificate() { return N_ ? build_cert(full_mask()) : nullptr; }

    std::string trunc_note() const { return trunc_note_; }

private:
    const ParameterSystem& P_;
    const NormOptions& opt_;
    bool allow_odd_;
    std::vector<std::int64_t> vals_;
    std::vector<double> w_;
    std::vector<int> sgn_;
    std::size_t N_ = 0;

    std::vector<EvenOp> evens_;         // one per usable half-index, indexed by slot
    std::vector<std::size_t> dedup_;    // slots driving the even layer
    std::vector<double> nv_, nv2_;
    // pack_excl_[slot][mask]: best packing into pieces excluding the single
    // whole-mask family; W2_[slot][mask] additionally admits that family.
    std::vector<std::vector<double>> pack_excl_, W2_;
    struct Choice {
        enum class Kind { leaf, even, odd } kind = Kind::leaf;
        std::size_t slot = 0;     // even slot
        std::int64_t t = 0;       // odd half-target
    };
    std::vector<Choice> choice_;
    std::string trunc_note_;

    std::uint32_t full_mask() const { return (N_ >= 32) ? 0 : ((1u << N_) - 1); }

    void build_ops() {
        for (std::int64_t j = 1; j <= opt_.jmax; ++j) {
            if (!P_.has_index(2 * j)) break;
            EvenOp op;
            op.j_half = j;
            op.m = P_.m_double(2 * j);
            op.n_eff = std::min<std::int64_t>(P_.n_at(2 * j), static_cast<std::int64_t>(N_));
            op.unconstrained =
                (!vals_.empty() && vals_[0] >= 2 &&
                 op.n_eff >= static_cast<std::int64_t>(N_));
            evens_.push_back(op);
        }
        for (std::size_t s = 0; s < evens_.size(); ++s) {
            bool dup = false;
            for (auto d : dedup_)
                if (evens_[d].m == evens_[s].m && evens_[d].n_eff == evens_[s].n_eff) dup = true;
            if (!dup) dedup_.push_back(s);
        }
    }

    // ---- constrained packing -------------------------------------------

    using Memo = std::unordered_map<std::string, double>;

    // When the mins-set condition can never bind (level at least the support
    // size, no index-1 entry) the machine state is irrelevant and the memo
    // collapses to the plain mask.
    double pack_any(std::uint32_t rem, PackState st, std::int64_t n_eff, bool free_mode,
                    Memo& memo) {
        if (!rem) return 0;
        const std::string key =
            free_mode ? std::to_string(rem) : std::to_string(rem) + '|' + st.key();
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        const int low = __builtin_ctz(rem);
        double best = pack_any(rem & (rem - 1), st, n_eff, free_mode, memo); // skip lowest
        PackState nxt = st;
        if (free_mode || nxt.include(vals_[low], n_eff)) {
            const std::uint32_t rest = rem & ~(1u << low);
            // P runs over submasks of rem containing low
            std::uint32_t sub = rest;
            while (true) {
                const std::uint32_t piece = sub | (1u << low);
                best = std::max(best,
                                nv2_[piece] + pack_any(rem & ~piece, nxt, n_eff, free_mode, memo));
                if (sub == 0) break;
                sub = (sub - 1) & rest;
            }
        }
        memo[key] = best;
        return best;
    }

    double packing(std::uint32_t mask, std::size_t slot, bool exclude_full, Memo& memo) {
        const auto& op = evens_[slot];
        if (!mask) return 0;
        const int low = __builtin_ctz(mask);
        PackState st;
        double best = pack_any(mask & (mask - 1), st, op.n_eff, op.unconstrained, memo);
        PackState nxt = st;
        if (op.unconstrained || nxt.include(vals_[low], op.n_eff)) {
            const std::uint32_t rest = mask & ~(1u << low);
            std::uint32_t sub = rest;
            while (true) {
                const std::uint32_t piece = sub | (1u << low);
                if (!(exclude_full && piece == mask))
                    best = std::max(best, nv2_[piece] + pack_any(mask & ~piece, nxt, op.n_eff,
                                                                 op.unconstrained, memo));
                if (sub == 0) break;
                sub = (sub - 1) & rest;
            }
        }
        return best;
    }

    // ---- relaxed odd layer ----------------------------------------------

    struct OddCtx {
        std::int64_t t;      // target half-index, weight m_{2t+1}
        std::int64_t n_eff;
        std::uint32_t full;
        Memo memo;
    };

    // pieces get strictly increasing even half-indices: first in N1 above
    // t+1, later ones in N2; no sigma chaining (upper relaxation)
    double odd_pack(std::uint32_t rem, PackState st, std::int64_t next_lb, bool first,
                    OddCtx& ctx) {
        if (!rem) return 0;
        const std::string key = std::to_string(rem) + '|' + st.key() + '|' +
                                std::to_string(next_lb) + (first ? "|f" : "|r");
        if (auto it = ctx.memo.find(key); it != ctx.memo.end()) return it->second;
        const int low = __builtin_ctz(rem);
        double best = odd_pack(rem & (rem - 1), st, next_lb, first, ctx);
        PackState nxt = st;
        if (nxt.include(vals_[low], ctx.n_eff)) {
            const std::uint32_t rest = rem & ~(1u << low);
            std::uint32_t sub = rest;
            while (true) {
                const std::uint32_t piece = sub | (1u << low);
                if (piece != ctx.full) {
                    for (std::size_t slot = 0; slot < evens_.size(); ++slot) {
                        const std::int64_t j = evens_[slot].j_half;
                        if (j < next_lb) continue;
                        if (first ? !P_.in_N1(j) : !P_.in_N2(j)) continue;
                        const double v2 = W2_[slot][piece] / (evens_[slot].m * evens_[slot].m);
                        best = std::max(
                            v2 + odd_pack(rem & ~piece, nxt, j + 1, false, ctx), best);
                    }
                }
                if (sub == 0) break;
                sub = (sub - 1) & rest;
            }
        }
        ctx.memo[key] = best;
        return best;
    }

    // ---- main sweep -------------------------------------------------------

    void run() {
        if (!N_) return;
        const std::size_t M = 1ull << N_;
        nv_.assign(M, 0.0);
        nv2_.assign(M, 0.0);
        choice_.assign(M, {});
        pack_excl_.assign(evens_.size(), {});
        W2_.assign(evens_.size(), {});
        for (auto& t : pack_excl_) t.assign(M, 0.0);
        for (auto& t : W2_) t.assign(M, 0.0);

        std::vector<std::vector<std::uint32_t>> by_pop(N_ + 1);
        for (std::uint32_t mask = 1; mask < M; ++mask)
            by_pop[__builtin_popcount(mask)].push_back(mask);

        // per-slot memoization persists across masks (subproblems recur)
        std::vector<Memo> memos(evens_.size());

        // unconstrained fast tables are rebuilt per popcount level since they
        // read nv2 of smaller masks only; a piece may equal the mask itself,
        // so values of the current level must already be final for strictly
        // smaller masks — recompute lazily instead
        for (std::size_t pc = 1; pc <= N_; ++pc) {
            for (auto mask : by_pop[pc]) {
                // leaf layer
                double best = 0;
                Choice ch;
                for (std::size_t i = 0; i < N_; ++i)
                    if (mask & (1u << i)) best = std::max(best, w_[i]);
                ch.kind = Choice::Kind::leaf;

                // even layer
                for (auto slot : dedup_) {
                    double p = packing(mask, slot, /*exclude_full=*/true, memos[slot]);
                    pack_excl_[slot][mask] = p;
                    const double v = std::sqrt(p) / evens_[slot].m;
                    if (v > best) {
                        best = v;
                        ch.kind = Choice::Kind::even;
                        ch.slot = slot;
                    }
                }
                // share packings across deduped slots
                for (std::size_t s = 0; s < evens_.size(); ++s) {
                    for (auto d : dedup_)
                        if (evens_[d].m == evens_[s].m && evens_[d].n_eff == evens_[s].n_eff) {
                            pack_excl_[s][mask] = pack_excl_[d][mask];
                            break;
                        }
                }

                // relaxed odd layer
                if (allow_odd_) {
                    for (std::int64_t t = 0; t <= opt_.jmax; ++t) {
                        if (!P_.has_index(2 * t + 1)) break;
                        OddCtx ctx{t, std::min<std::int64_t>(P_.n_at(2 * t + 1),
                                                             static_cast<std::int64_t>(N_)),
                                   mask, {}};
                        PackState st;
                        const double p = odd_pack(mask, st, t + 2, true, ctx);
                        const double v = std::sqrt(p) / P_.m_double(2 * t + 1);
                        if (v > best) {
                            best = v;
                            ch.kind = Choice::Kind::odd;
                            ch.t = t;
                        }
                    }
                }

                nv_[mask] = best;
                nv2_[mask] = best * best;
                choice_[mask] = ch;
                for (std::size_t s = 0; s < evens_.size(); ++s)
                    W2_[s][mask] = std::max(nv2_[mask], pack_excl_[s][mask]);
            }
        }

        // Envelope check for the truncation at jmax: an operation of weight m
        // contributes at most sqrt(|supp|) ||x|| / m, so any listed weight
        // with m > sqrt(|supp|) cannot raise the computed value.
        const double root_n = std::sqrt(static_cast<double>(N_));
        bool listed_tail_covered = true;
        for (std::int64_t idx = 2 * opt_.jmax + 2;
             idx < static_cast<std::int64_t>(P_.levels()); ++idx)
            if (!(to_double(P_.m_at(idx)) > root_n)) listed_tail_covered = false;
        trunc_note_ = "weights considered up to index " + std::to_string(2 * opt_.jmax + 1);
        if (static_cast<std::int64_t>(P_.levels()) > 2 * opt_.jmax + 2)
            trunc_note_ += listed_tail_covered ? "; remaining listed weights cannot contribute"
                                               : "; larger listed weights were truncated";
    }

    // ---- certificate reconstruction ---------------------------------------

    FnPtr build_cert(std::uint32_t mask) {
        const Choice ch = choice_[mask];
        if (ch.kind == Choice::Kind::leaf) {
            for (std::size_t i = 0; i < N_; ++i)
                if ((mask & (1u << i)) && w_[i] == nv_[mask])
                    return Functional::make_leaf(sgn_[i], vals_[i]);
            // fall through defensively
        }
        if (ch.kind == Choice::Kind::even) {
            auto pieces = reconstruct_family(mask, ch.slot);
            std::vector<FnChild> kids;
            double sq = 0;
            for (auto p : pieces) sq += nv2_[p];
            const double norm = std::sqrt(sq);
            for (auto p : pieces) {
                auto child = build_cert(p);
                const double lam = norm > 0 ? nv_[p] / norm : 0.0;
                kids.push_back({QScalar::from_double(lam), child});
            }
            return Functional::make_node(2 * evens_[ch.slot].j_half, std::move(kids));
        }
        // odd choices only arise in the relaxed upper engine, which never
        // emits certificates
        for (std::size_t i = 0; i < N_; ++i)
            if (mask & (1u << i)) return Functional::make_leaf(sgn_[i], vals_[i]);
        throw std::logic_error("certificate reconstruction failed");
    }

    std::vector<std::uint32_t> reconstruct_family(std::uint32_t mask, std::size_t slot) {
        const auto& op = evens_[slot];
        Memo memo; // identical arithmetic reproduces identical doubles
        std::vector<std::uint32_t> pieces;
        std::uint32_t rem = mask;
        PackState st;
        double target = pack_excl_[slot][mask];
        bool first = true;
        while (rem && target > 0) {
            const int low = __builtin_ctz(rem);
            // option: skip lowest
            if (pack_any(rem & (rem - 1), st, op.n_eff, op.unconstrained, memo) == target) {
                rem &= rem - 1;
                continue;
            }
            PackState nxt = st;
            if (!op.unconstrained && !nxt.include(vals_[low], op.n_eff))
                throw std::logic_error("family reconstruction: machine rejected element");
            const std::uint32_t rest = rem & ~(1u << low);
            std::uint32_t sub = rest;
            bool found = false;
            while (true) {
                const std::uint32_t piece = sub | (1u << low);
                if (!(first && piece == mask)) {
                    const double tail =
                        pack_any(rem & ~piece, nxt, op.n_eff, op.unconstrained, memo);
                    if (nv2_[piece] + tail == target) {
                        pieces.push_back(piece);
                        rem &= ~piece;
                        st = nxt;
                        target = tail;
                        found = true;
                        break;
                    }
                }
                if (sub == 0) break;
                sub = (sub - 1) & rest;
            }
            if (!found) throw std::logic_error("family reconstruction: no matching branch");
            first = false;
        }
        if (pieces.empty()) throw std::logic_error("family reconstruction: empty family");
        return pieces;
    }
};

} // namespace detail

struct EvenResult {
    double value = 0;
    FnPtr certificate;
    std::string note;
};

// Exact norm of x under the fragment generated by {+-e_n*} and the even
// weighted operations m_2..m_{2 jmax}. Bottom-up over subsets of the support,
// allowable families searched exhaustively under the budget machine.
inline EvenResult norm_even(const Vec& x, const ParameterSystem& P, const NormOptions& opt = {}) {
    if (x.empty()) return {0, nullptr, "zero vector"};
    detail::Engine eng(x, P, opt, /*allow_odd=*/false);
    return {eng.value(), eng.certificate(), eng.trunc_note()};
}

// Upper bound on the true norm: odd operations admitted with the weight
// pattern of special sequences but without sigma chaining. Monotone in the
// operation set, hence an upper bound.
inline double norm_upper(const Vec& x, const ParameterSystem& P, const NormOptions& opt = {}) {
    if (x.empty()) return 0;
    detail::Engine eng(x, P, opt, /*allow_odd=*/true);
    return eng.value();
}

// ---------------------------------------------------------------------------
// independent brute-force oracle (true sigma chaining via the registry)
// ---------------------------------------------------------------------------

namespace detail {

class Oracle {
public:
    Oracle(const Vec& x, const ParameterSystem& P, const SigmaRegistry& reg,
           const NormOptions& opt, bool allow_odd, int depth)
        : P_(P), reg0_(reg), opt_(opt), allow_odd_(allow_odd), depth_cap_(depth) {
        for (const auto& [i, c] : x.entries()) {
            vals_.push_back(i);
            w_.push_back(std::abs(c.value()));
            sgn_.push_back(c.sign);
        }
        N_ = vals_.size();
        if (N_ > opt.oracle_supp_cap)
            throw std::invalid_argument("norm_oracle: support exceeds the oracle cap");
        if (depth_cap_ < 1 || depth_cap_ > 6)
            throw std::invalid_argument("norm_oracle: depth must lie in [1,6]");
    }

    std::pair<double, FnPtr> best() { return eval_mask(full_mask(), depth_cap_); }

private:
    const ParameterSystem& P_;
    const SigmaRegistry& reg0_;
    const NormOptions& opt_;
    bool allow_odd_;
    int depth_cap_;
    std::vector<std::int64_t> vals_;
    std::vector<double> w_;
    std::vector<int> sgn_;
    std::size_t N_ = 0;
    std::map<std::pair<std::uint32_t, int>, std::pair<double, FnPtr>> memo_;

    std::uint32_t full_mask() const { return (1u << N_) - 1; }

    FiniteSet mask_set(std::uint32_t m) const {
        std::vector<std::int64_t> v;
        for (std::size_t i = 0; i < N_; ++i)
            if (m & (1u << i)) v.push_back(vals_[i]);
        return FiniteSet(std::move(v));
    }

    std::pair<double, FnPtr> eval_mask(std::uint32_t mask, int depth) {
        if (!mask) return {0.0, nullptr};
        const auto key = std::make_pair(mask, depth);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        double best = 0;
        FnPtr cert;
        for (std::size_t i = 0; i < N_; ++i)
            if ((mask & (1u << i)) && w_[i] >= best) {
                best = w_[i];
                cert = Functional::make_leaf(sgn_[i], vals_[i]);
            }
        if (depth >= 2) {
            for (std::int64_t j = 1; j <= opt_.jmax; ++j) {
                if (!P_.has_index(2 * j)) break;
                auto [v, fn] = best_even_node(mask, j, depth, /*allow_full=*/false);
                if (v > best) { best = v; cert = fn; }
            }
            if (allow_odd_ && depth >= 3) {
                for (std::int64_t t = 0; 2 * t + 1 < static_cast<std::int64_t>(P_.levels()) &&
                                         t <= opt_.jmax;
                     ++t) {
                    auto [v, fn] = best_odd_node(mask, t, depth);
                    if (v > best) { best = v; cert = fn; }
                }
            }
        }
        auto out = std::make_pair(best, cert);
        memo_[key] = out;
        return out;
    }

    // families of disjoint pieces with mins in S_n, value^2 = sum of piece
    // values^2; is_member provides the independent allowability check
    void families(std::uint32_t rem, std::uint32_t full, bool allow_full,
                  std::vector<std::int64_t>& mins, std::int64_t n,
                  std::vector<std::uint32_t>& cur,
                  const std::function<void(const std::vector<std::uint32_t>&)>& sink) {
        sink(cur);
        if (!rem) return;
        const int low = __builtin_ctz(rem);
        // low not used by any piece
        families(rem & (rem - 1), full, allow_full, mins, n, cur, sink);
        const std::uint32_t rest = rem & ~(1u << low);
        std::uint32_t sub = rest;
        while (true) {
            const std::uint32_t piece = sub | (1u << low);
            if (allow_full || piece != full) {
                mins.push_back(vals_[low]);
                FiniteSet ms(std::vector<std::int64_t>(mins.begin(), mins.end()));
                if (schreier::is_member(ms, n)) {
                    cur.push_back(piece);
                    families(rem & ~piece, full, allow_full, mins, n, cur, sink);
                    cur.pop_back();
                }
                mins.pop_back();
            }
            if (sub == 0) break;
            sub = (sub - 1) & rest;
        }
    }

    std::pair<double, FnPtr> best_even_node(std::uint32_t mask, std::int64_t j, int depth,
                                            bool allow_full) {
        const double m = P_.m_double(2 * j);
        const std::int64_t n = P_.n_at(2 * j);
        double best = -1;
        std::vector<std::uint32_t> best_fam;
        std::vector<std::int64_t> mins;
        std::vector<std::uint32_t> cur;
        families(mask, mask, allow_full, mins, n, cur,
                 [&](const std::vector<std::uint32_t>& fam) {
                     if (fam.empty()) return;
                     double sq = 0;
                     for (auto p : fam) sq += square(eval_mask(p, depth - 1).first);
                     if (sq > best) { best = sq; best_fam = fam; }
                 });
        if (best <= 0) return {0.0, nullptr};
        std::vector<FnChild> kids;
        const double norm = std::sqrt(best);
        for (auto p : best_fam) {
            auto [v, fn] = eval_mask(p, depth - 1);
            kids.push_back({QScalar::from_double(v / norm), fn});
        }
        return {norm / m, Functional::make_node(2 * j, std::move(kids))};
    }

    static double square(double v) { return v * v; }

    // best even node of prescribed weight m_{2j} over the piece (child of an
    // odd node)
    std::pair<double, FnPtr> weighted_even(std::uint32_t mask, std::int64_t j, int depth) {
        return best_even_node(mask, j, depth, /*allow_full=*/true);
    }

    struct OddSearch {
        double best_sq = -1;
        std::vector<std::uint32_t> fam;
        std::vector<std::int64_t> js;
    };

    void odd_families(std::uint32_t rem, std::uint32_t full, std::vector<std::int64_t>& mins,
                      std::int64_t n, SigmaRegistry& reg, SpecialSequence& seq,
                      std::vector<std::uint32_t>& cur, std::vector<std::int64_t>& js,
                      double acc_sq, int depth, std::int64_t t, OddSearch& out) {
        if (!cur.empty() && acc_sq > out.best_sq) {
            out.best_sq = acc_sq;
            out.fam = cur;
            out.js = js;
        }
        if (!rem) return;
        const int low = __builtin_ctz(rem);
        odd_families(rem & (rem - 1), full, mins, n, reg, seq, cur, js, acc_sq, depth, t, out);
        const std::uint32_t rest = rem & ~(1u << low);
        std::uint32_t sub = rest;
        while (true) {
            const std::uint32_t piece = sub | (1u << low);
            if (piece != full) {
                mins.push_back(vals_[low]);
                FiniteSet ms(std::vector<std::int64_t>(mins.begin(), mins.end()));
                if (schreier::is_member(ms, n)) {
                    std::vector<std::int64_t> j_opts;
                    if (cur.empty()) {
                        for (std::int64_t j = t + 2; j <= opt_.jmax; ++j)
                            if (P_.in_N1(j) && P_.has_index(2 * j)) j_opts.push_back(j);
                    } else {
                        try {
                            j_opts.push_back(reg.assign(seq, P_));
                        } catch (const std::exception&) {
                        }
                    }
                    for (auto j : j_opts) {
                        if (!P_.has_index(2 * j)) continue;
                        auto [v, fn] = weighted_even(piece, j, depth - 1);
                        if (!fn) continue;
                        SpecialSequence saved = seq;
                        SigmaRegistry saved_reg = reg;
                        seq = seq.extended({mask_set(piece), j});
                        cur.push_back(piece);
                        js.push_back(j);
                        odd_families(rem & ~piece, full, mins, n, reg, seq, cur, js,
                                     acc_sq + v * v, depth, t, out);
                        js.pop_back();
                        cur.pop_back();
                        seq = saved;
                        reg = saved_reg;
                    }
                }
                mins.pop_back();
            }
            if (sub == 0) break;
            sub = (sub - 1) & rest;
        }
    }

    std::pair<double, FnPtr> best_odd_node(std::uint32_t mask, std::int64_t t, int depth) {
        const std::int64_t n = P_.n_at(2 * t + 1);
        OddSearch out;
        std::vector<std::int64_t> mins;
        std::vector<std::uint32_t> cur;
        std::vector<std::int64_t> js;
        auto reg = reg0_.clone();
        SpecialSequence seq;
        odd_families(mask, mask, mins, n, reg, seq, cur, js, 0.0, depth, t, out);
        if (out.best_sq <= 0) return {0.0, nullptr};
        // first witness weight must clear 2 j_1 > (2t+1) + 1, ensured by the
        // j_1 >= t+2 enumeration above
        const double norm = std::sqrt(out.best_sq);
        std::vector<FnChild> kids;
        SpecialSequence wit;
        for (std::size_t i = 0; i < out.fam.size(); ++i) {
            auto [v, fn] = weighted_even(out.fam[i], out.js[i], depth - 1);
            kids.push_back({QScalar::from_double(v / norm), fn});
            wit.pairs.push_back({mask_set(out.fam[i]), out.js[i]});
        }
        return {norm / P_.m_double(2 * t + 1),
                Functional::make_node(2 * t + 1, std::move(kids), wit)};
    }
};

} // namespace detail

struct OracleResult {
    double value = 0;
    FnPtr certificate;
};

// Exhaustive enumeration of norming functionals on the support of x with
// bounded tree depth, optimal scalars at every node, and genuine sigma
// chaining through (a clone of) the registry. Independent of the subset DP.
inline OracleResult norm_oracle(const Vec& x, const ParameterSystem& P, const SigmaRegistry& reg,
                                int depth, bool allow_odd = true, const NormOptions& opt = {}) {
    if (x.empty()) return {0, nullptr};
    detail::Oracle orc(x, P, reg, opt, allow_odd, depth);
    auto [v, c] = orc.best();
    return {v, c};
}

// Certified bracket around the true norm.
inline NormBounds norm_bounds(const Vec& x, const ParameterSystem& P, const SigmaRegistry& reg,
                              const NormOptions& opt = {}) {
    if (x.empty()) return NormBounds::zero();
    NormBounds nb;
    if (x.support_size() <= opt.dp_cap) {
        auto even = norm_even(x, P, opt);
        nb.lower = even.value;
        nb.lower_certificate = even.certificate;
        nb.upper = norm_upper(x, P, opt);
        nb.upper_method = "relaxed_odd";
        nb.note = even.note;
        if (opt.use_oracle && x.support_size() <= opt.oracle_supp_cap) {
            auto orc = norm_oracle(x, P, reg, opt.oracle_depth, true, opt);
            if (orc.value > nb.lower) {
                nb.lower = orc.value;
                nb.lower_certificate = orc.certificate;
            }
        }
    } else {
        nb.lower = x.linf();
        std::int64_t arg = 0;
        int sg = 1;
        for (const auto& [i, c] : x.entries())
            if (std::abs(c.value()) == nb.lower) {
                arg = i;
                sg = c.sign;
                break;
            }
        nb.lower_certificate = Functional::make_leaf(sg, arg);
        nb.upper = x.l1(); // every norming functional has sup norm <= 1
        nb.upper_method = "linf";
        nb.note = "support above DP cap; l1 / linf bracket";
    }
    for (const auto& f : opt.extra_certificates) {
        if (!f) continue;
        if (auto v = validate(*f, P, reg, {true}); v.ok) {
            const double val = evaluate(*f, x, P);
            if (val > nb.lower) {
                nb.lower = val;
                nb.lower_certificate = f;
            }
        }
    }
    if (nb.lower > nb.upper + opt.tol)
        throw std::logic_error("norm_bounds: bracket inverted (internal error)");
    nb.exact = nb.upper <= nb.lower + opt.tol * (1 + nb.upper);
    return nb;
}

} // namespace mtn::norm
