#pragma once

#include "mtn/averages.hpp"
#include "mtn/norm_engine.hpp"

#include <string>
#include <vector>

namespace mtn::constructions {

using averages::SccBuild;
using averages::SccWitness;

// ---------------------------------------------------------------------------
// rapidly increasing sequences
// ---------------------------------------------------------------------------

struct RISWitness {
    std::vector<Vec> blocks;
    std::vector<std::int64_t> halves; // weight of block k is m_{2 halves[k]}
    std::vector<SccWitness> sccs;     // per block, parameters (1/m^3, n)
    Rational C = 1;
    bool seminormalized = false;
};

struct CheckReport {
    bool ok = true;
    std::vector<std::string> failures;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            failures.push_back(what);
        }
    }
};

// Re-verify every RIS condition on a witness: norm caps, per-block scc
// parameters, and the weight growth against the previous block's support.
inline CheckReport verify_ris(const RISWitness& w, const ParameterSystem& P,
                              const norm::NormOptions& opt = {}) {
    CheckReport rep;
    rep.require(!w.blocks.empty(), "empty block list");
    rep.require(w.halves.size() == w.blocks.size(), "halves/block size mismatch");
    rep.require(w.sccs.size() == w.blocks.size(), "scc witness/block size mismatch");
    if (!rep.ok) return rep;
    rep.require(Vec::successive(w.blocks), "blocks not successive");
    SigmaRegistry dummy;
    for (std::size_t k = 0; k < w.blocks.size(); ++k) {
        const auto jk = w.halves[k];
        rep.require(k == 0 || w.halves[k] > w.halves[k - 1], "weight halves not increasing");
        if (!P.has_index(2 * jk)) {
            rep.require(false, "m_" + std::to_string(2 * jk) + " missing");
            continue;
        }
        if (w.blocks[k].support_size() <= opt.dp_cap) {
            const auto nb = norm::norm_bounds(w.blocks[k], P, dummy, opt);
            rep.require(nb.upper <= to_double(w.C) * (1 + kRelTol),
                        "block " + std::to_string(k) + " upper bound exceeds C");
            if (w.seminormalized)
                rep.require(nb.lower >= 1 - kRelTol,
                            "block " + std::to_string(k) + " not seminormalized");
        }
        // scc parameters (1/m_{2j_k}^3, n_{2j_k}) on the recorded anchors
        const auto& sw = w.sccs[k];
        const Rational eps(1, P.m_at(2 * jk) * P.m_at(2 * jk) * P.m_at(2 * jk));
        rep.require(sw.n == P.n_at(2 * jk),
                    "block " + std::to_string(k) + " scc level mismatch");
        const auto av = sw.anchor_vector(2);
        const auto bv = averages::is_bscc(av, 2, eps, sw.n);
        rep.require(bv.ok, "block " + std::to_string(k) + " anchor bscc fails: " + bv.reason);
        rep.require(!sw.anchors.empty() &&
                        sw.anchors.back() == w.blocks[k].maxsupp() &&
                        static_cast<std::int64_t>(sw.anchors.front()) <= w.blocks[k].maxsupp(),
                    "block " + std::to_string(k) + " anchors do not match the block");
        if (k + 1 < w.blocks.size() && P.has_index(2 * w.halves[k + 1])) {
            const BigInt t(w.blocks[k].maxsupp());
            rep.require(P.m_at(2 * w.halves[k + 1]) > P.m_at(2 * jk) * t * t,
                        "growth condition fails between blocks " + std::to_string(k) + "," +
                            std::to_string(k + 1));
        }
    }
    return rep;
}

// Greedy RIS builder over prescribed raw blocks: block k is shaped into a
// (1/m_{2j_k}^3, n_{2j_k})-scc via the anchor averages, and the next weight is
// the least half-index satisfying the growth condition.
inline RISWitness build_ris(const std::vector<Vec>& raw_blocks, const Rational& C,
                            std::int64_t start_half, const ParameterSystem& P,
                            const norm::NormOptions& opt = {}) {
    if (raw_blocks.empty()) throw std::invalid_argument("build_ris: no blocks");
    if (!Vec::successive(raw_blocks))
        throw std::invalid_argument("build_ris: blocks must be successive");
    RISWitness w;
    w.C = C;
    std::size_t ptr = 0;
    std::int64_t half = start_half;
    SigmaRegistry dummy;
    while (ptr < raw_blocks.size()) {
        if (!P.has_index(2 * half))
            throw std::out_of_range("build_ris: parameter list too short for condition (3)");
        const Rational eps(1, P.m_at(2 * half) * P.m_at(2 * half) * P.m_at(2 * half));
        std::vector<Vec> window(raw_blocks.begin() + ptr, raw_blocks.end());
        SccBuild sb;
        try {
            sb = averages::make_scc(window, eps, P.n_at(2 * half));
        } catch (const std::invalid_argument&) {
            break; // remaining blocks cannot host another scc
        }
        Vec x = averages::combine(window, sb.coeffs);
        if (x.support_size() <= opt.dp_cap) {
            const auto nb = norm::norm_bounds(x, P, dummy, opt);
            if (nb.upper > to_double(C) * (1 + kRelTol))
                throw std::invalid_argument("build_ris: C smaller than a block's upper bound");
        }
        w.blocks.push_back(std::move(x));
        w.halves.push_back(half);
        w.sccs.push_back(sb.witness);
        ptr += sb.used_blocks;
        // least next weight with m_{2j'} > m_{2j} (maxsupp)^2
        const BigInt t(w.blocks.back().maxsupp());
        const BigInt need = P.m_at(2 * half) * t * t;
        std::int64_t nxt = half + 1;
        while (P.has_index(2 * nxt) && !(P.m_at(2 * nxt) > need)) ++nxt;
        if (ptr < raw_blocks.size() && !P.has_index(2 * nxt))
            throw std::out_of_range("build_ris: parameter list too short for condition (3)");
        half = nxt;
    }
    if (w.blocks.empty()) throw std::invalid_argument("build_ris: no scc fits the blocks");
    auto rep = verify_ris(w, P, opt);
    if (!rep.ok) throw std::logic_error("build_ris: verification failed: " + rep.failures.front());
    return w;
}

// prescribed halves variant (exact control, used by the dependent builder)
inline RISWitness build_ris_with_halves(const std::vector<Vec>& raw_blocks,
                                        const std::vector<std::int64_t>& halves,
                                        const Rational& C, const ParameterSystem& P,
                                        const norm::NormOptions& opt = {}) {
    if (raw_blocks.size() != halves.size())
        throw std::invalid_argument("build_ris_with_halves: size mismatch");
    RISWitness w;
    w.C = C;
    w.blocks = raw_blocks;
    w.halves = halves;
    for (std::size_t k = 0; k < raw_blocks.size(); ++k) {
        SccWitness sw;
        sw.p = 2;
        sw.n = P.n_at(2 * halves[k]);
        sw.eps = Rational(1, P.m_at(2 * halves[k]) * P.m_at(2 * halves[k]) *
                                 P.m_at(2 * halves[k]));
        // single-block scc: the block itself with unit coefficient
        sw.anchors = {raw_blocks[k].maxsupp()};
        sw.b_sq = {Rational(1)};
        sw.anchors_maximal = false;
        w.sccs.push_back(std::move(sw));
    }
    auto rep = verify_ris(w, P, opt);
    if (!rep.ok)
        throw std::logic_error("build_ris_with_halves: verification failed: " +
                               rep.failures.front());
    return w;
}

// ---------------------------------------------------------------------------
// seminormalized special convex combinations
// ---------------------------------------------------------------------------

struct SeminormalizedScc {
    Vec combination;
    std::vector<QScalar> coeffs;
    SccWitness witness;
    norm::NormBounds bounds;
    std::size_t first_block = 0;
};

// Search procedure: slide over the block list until a (eps, n_{2j})-scc with a
// certified lower bound >= 1/2 appears.
inline SeminormalizedScc build_seminormalized_scc(const std::vector<Vec>& blocks,
                                                  const Rational& eps, std::int64_t j_half,
                                                  const ParameterSystem& P,
                                                  const SigmaRegistry& reg,
                                                  const norm::NormOptions& opt = {}) {
    if (blocks.empty()) throw std::invalid_argument("build_seminormalized_scc: no blocks");
    const auto n = P.n_at(2 * j_half);
    std::vector<std::string> diag;
    for (std::size_t start = 0; start < blocks.size(); ++start) {
        std::vector<Vec> window(blocks.begin() + start, blocks.end());
        try {
            auto sb = averages::make_scc(window, eps, n);
            Vec combo = averages::combine(window, sb.coeffs);
            if (combo.support_size() > opt.dp_cap) {
                diag.push_back("window " + std::to_string(start) + ": support too large");
                continue;
            }
            auto nb = norm::norm_bounds(combo, P, reg, opt);
            if (nb.lower >= 0.5 - kRelTol) {
                SeminormalizedScc out;
                out.combination = std::move(combo);
                out.coeffs = std::move(sb.coeffs);
                out.witness = std::move(sb.witness);
                out.bounds = std::move(nb);
                out.first_block = start;
                return out;
            }
            diag.push_back("window " + std::to_string(start) + ": lower bound " +
                           std::to_string(nb.lower) + " below 1/2");
        } catch (const std::invalid_argument& e) {
            diag.push_back("window " + std::to_string(start) + ": " + e.what());
        }
    }
    std::string msg = "build_seminormalized_scc: block list exhausted";
    for (const auto& d : diag) msg += "; " + d;
    throw std::invalid_argument(msg);
}

// ---------------------------------------------------------------------------
// exact vectors
// ---------------------------------------------------------------------------

struct ExactWitness {
    Vec x;                      // m_{2j} * scc combination over RIS blocks
    std::int64_t j_half = 0;
    std::size_t first_block = 0;
    std::size_t used_blocks = 0;
    std::vector<QScalar> coeffs;
    SccWitness scc;
};

inline ExactWitness build_exact(const RISWitness& ris, std::int64_t j_half,
                                const ParameterSystem& P, std::size_t first_block = 0) {
    if (first_block >= ris.blocks.size())
        throw std::invalid_argument("build_exact: block index out of range");
    if (!(j_half < ris.halves[first_block]))
        throw std::invalid_argument("build_exact: scaling index must precede the used weights");
    const Rational eps(1, P.m_at(2 * j_half) * P.m_at(2 * j_half) * P.m_at(2 * j_half));
    std::vector<Vec> window(ris.blocks.begin() + first_block, ris.blocks.end());
    auto sb = averages::make_scc(window, eps, P.n_at(2 * j_half));
    for (std::size_t k = 0; k < sb.used_blocks; ++k)
        if (!(j_half < ris.halves[first_block + k]))
            throw std::invalid_argument("build_exact: scaling index overlaps used weights");
    ExactWitness out;
    out.j_half = j_half;
    out.first_block = first_block;
    out.used_blocks = sb.used_blocks;
    out.coeffs = sb.coeffs;
    out.scc = sb.witness;
    Vec combo = averages::combine(window, sb.coeffs);
    out.x = combo.scaled(QScalar::from_rational(Rational(P.m_at(2 * j_half))));
    return out;
}

// ---------------------------------------------------------------------------
// 0-dependent sequences
// ---------------------------------------------------------------------------

struct DependentWitness {
    std::vector<Vec> zs;                 // the dependent blocks (exact vectors)
    std::vector<std::int64_t> j_halves;  // scaling halves, sigma chained
    std::vector<FnPtr> gs;               // paired functionals, one per z
    SpecialSequence seq;                 // (E_i, 2 j_i)
    std::vector<QScalar> b;              // scc coefficients over the z's
    SccWitness scc;                      // (1/m^2_{2j+2}, n_{2j+1}) witness
    std::vector<SccWitness> window_sccs; // per-z window witnesses
    FnPtr special_functional;            // (1/m_{2j+1}) sum b_i g_i
    std::int64_t target_half = 0;        // j in the (0,C,2j+1) tag
    Rational C = 1;
    std::vector<std::size_t> window_begin, window_size; // block usage
};

// Alternating construction over a RIS and a matching family of functionals
// (one per RIS block, supports disjoint from every block). Windows are shaped
// into exact vectors z_i = m_{2 j_i} (scc), g_i bundles the window's
// functionals under the same coefficients, E_i = supp g_i u {maxsupp z_i + 1},
// and the next weight comes from the registry. Stops when the anchor set
// {maxsupp z_i} is maximal at level n_{2j+1}.
inline DependentWitness build_dependent(SigmaRegistry& reg, const RISWitness& ris,
                                        std::int64_t target_half,
                                        const std::vector<FnPtr>& fns,
                                        const ParameterSystem& P) {
    if (fns.size() != ris.blocks.size())
        throw std::invalid_argument("build_dependent: one functional per RIS block required");
    // the paired functionals must avoid every block support
    FiniteSet all_blocks;
    for (const auto& x : ris.blocks) all_blocks = FiniteSet::unite(all_blocks, x.support());
    FiniteSet all_fns;
    for (std::size_t i = 0; i < fns.size(); ++i) {
        const auto s = fns[i]->support();
        if (!FiniteSet::disjoint(s, all_blocks))
            throw std::invalid_argument(
                "build_dependent: functional support meets a block support");
        if (!FiniteSet::disjoint(s, all_fns))
            throw std::invalid_argument("build_dependent: functional supports overlap");
        all_fns = FiniteSet::unite(all_fns, s);
    }
    const auto n_odd = P.n_at(2 * target_half + 1);

    DependentWitness out;
    out.target_half = target_half;
    out.C = ris.C;

    std::size_t ptr = 0;
    std::int64_t prev_t = 0;
    schreier::RankMachine anchors;
    bool done = false;
    while (!done) {
        std::int64_t j_i;
        if (out.seq.empty()) {
            j_i = target_half + 2;
            while (!P.in_N1(j_i)) ++j_i;
        } else {
            j_i = reg.assign(out.seq, P);
        }
        // advance past blocks that are positionally or weight-wise unusable
        while (ptr < ris.blocks.size() &&
               (ris.halves[ptr] <= j_i || ris.blocks[ptr].minsupp() <= prev_t + 1)) {
            if (ris.halves[ptr] >= j_i)
                throw std::invalid_argument(
                    "build_dependent: skipped block would break the exactness interleaving");
            ++ptr;
        }
        if (ptr >= ris.blocks.size())
            throw std::invalid_argument("build_dependent: RIS exhausted before maximality");
        if (!P.has_index(2 * j_i))
            throw std::out_of_range("build_dependent: parameter list too short");
        const Rational eps(1, P.m_at(2 * j_i) * P.m_at(2 * j_i) * P.m_at(2 * j_i));
        std::vector<Vec> window(ris.blocks.begin() + ptr, ris.blocks.end());
        auto sb = averages::make_scc(window, eps, P.n_at(2 * j_i));
        for (std::size_t k = 0; k < sb.used_blocks; ++k)
            if (!(j_i < ris.halves[ptr + k]))
                throw std::invalid_argument("build_dependent: weight interleaving failed");
        Vec combo = averages::combine(window, sb.coeffs);
        Vec z = combo.scaled(QScalar::from_rational(Rational(P.m_at(2 * j_i))));
        const std::int64_t t_i = z.maxsupp();

        std::vector<FnChild> kids;
        for (std::size_t k = 0; k < sb.used_blocks; ++k)
            kids.push_back({sb.coeffs[k], fns[ptr + k]});
        FnPtr g = Functional::make_node(2 * j_i, std::move(kids));

        FiniteSet E = FiniteSet::unite(g->support(), FiniteSet{t_i + 1});
        out.seq = out.seq.extended({E, j_i});
        out.zs.push_back(std::move(z));
        out.j_halves.push_back(j_i);
        out.gs.push_back(std::move(g));
        out.window_sccs.push_back(sb.witness);
        out.window_begin.push_back(ptr);
        out.window_size.push_back(sb.used_blocks);
        ptr += sb.used_blocks;
        prev_t = t_i;
        if (anchors.include(t_i) > n_odd)
            throw std::logic_error("build_dependent: anchor set left S_{n_{2j+1}}");
        done = anchors.saturated(n_odd);
    }

    // invariants of the (0, C, 2j+1) tag
    if (!(target_half + 1 < out.j_halves.front()) || !P.in_N1(out.j_halves.front()))
        throw std::logic_error("build_dependent: first weight violates j+1 < j_1 in N1");
    FiniteSet all_E;
    for (const auto& p : out.seq.pairs) all_E = FiniteSet::unite(all_E, p.E);
    FiniteSet all_z;
    for (const auto& z : out.zs) all_z = FiniteSet::unite(all_z, z.support());
    if (!FiniteSet::disjoint(all_E, all_z))
        throw std::logic_error("build_dependent: witness sets meet the vectors");
    for (std::size_t i = 0; i < out.zs.size(); ++i)
        if (!(out.zs[i].maxsupp() < out.seq.pairs[i].E.max()))
            throw std::logic_error("build_dependent: maxsupp x_i < maxsupp E_i fails");

    // scc over the dependent blocks
    if (!P.has_index(2 * target_half + 2))
        throw std::out_of_range("build_dependent: parameter list too short for the scc");
    const Rational scc_eps(1, P.m_at(2 * target_half + 2) * P.m_at(2 * target_half + 2));
    auto scc = averages::make_scc(out.zs, scc_eps, n_odd);
    if (scc.used_blocks != out.zs.size() || !scc.witness.anchors_maximal)
        throw std::logic_error("build_dependent: dependent scc does not use the whole chain");
    out.b = scc.coeffs;
    out.scc = scc.witness;

    std::vector<FnChild> kids;
    for (std::size_t i = 0; i < out.zs.size(); ++i) kids.push_back({out.b[i], out.gs[i]});
    out.special_functional =
        Functional::make_node(2 * target_half + 1, std::move(kids), out.seq);
    if (auto v = validate(*out.special_functional, P, reg); !v.ok)
        throw std::logic_error("build_dependent: special functional invalid: " + v.reason +
                               " at " + v.path);
    return out;
}

// The scaled blocks (1/m_{2 j_k}) z_k form a RIS again; re-verify it.
inline CheckReport dependent_scaled_ris_check(const DependentWitness& w,
                                              const ParameterSystem& P,
                                              const norm::NormOptions& opt = {}) {
    RISWitness r;
    r.C = w.C;
    for (std::size_t k = 0; k < w.zs.size(); ++k) {
        r.blocks.push_back(
            w.zs[k].scaled(QScalar::from_rational(Rational(1, P.m_at(2 * w.j_halves[k])))));
        r.halves.push_back(w.j_halves[k]);
        r.sccs.push_back(w.window_sccs[k]);
    }
    return verify_ris(r, P, opt);
}

// ---------------------------------------------------------------------------
// toy-scale gap demonstration
// ---------------------------------------------------------------------------

struct GapReport {
    std::int64_t target_half = 0;
    std::size_t d = 0;
    std::vector<std::int64_t> j_halves;
    double lower = 0;        // special functional on the witness-side vector
    double upper = 0;        // norm upper bound on the same vector
    double upper_z = 0;      // upper bound on the dependent combination
    double star_rhs = 0;     // C / m^2_{2j+1}
    bool star_holds = false; // expected only under strict growth
    double theta_measured = 0;
    double ratio = 0;        // theta / upper_z
    bool strict_growth = false;
    std::vector<std::string> notes;
};

// upper l2 envelope for a combination of disjointly supported pieces
inline double ul2_envelope(const std::vector<Vec>& pieces, const std::vector<QScalar>& coeffs,
                           const ParameterSystem& P, const SigmaRegistry& reg,
                           const norm::NormOptions& opt = {}) {
    double sq = 0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        double up;
        if (pieces[k].support_size() <= opt.dp_cap) {
            up = norm::norm_bounds(pieces[k], P, reg, opt).upper;
        } else {
            up = pieces[k].l1();
        }
        const double c = coeffs[k].value();
        sq += c * c * up * up;
    }
    return std::sqrt(sq);
}

struct GapInstance {
    ParameterSystem P;
    RISWitness ris;
    std::vector<FnPtr> fns;
    std::int64_t target_half = 0;
};

// Deterministic toy instance: basis-vector RIS blocks in three anchor windows,
// paired leaf functionals in high disjoint regions, geometric weight list, and
// window weights interleaved around the dry-run sigma values.
inline GapInstance gap_instance(std::int64_t target_half, std::int64_t scale,
                                const SigmaRegistry& reg_state) {
    if (scale < 1 || scale > 256) throw std::invalid_argument("gap_demo: scale must be in [1,256]");
    if (target_half < 0 || target_half > 4)
        throw std::invalid_argument("gap_demo: target level must be in [0,4]");
    GapInstance inst;
    inst.target_half = target_half;

    // geometric weight list m_idx = 2^{idx+1}, flat levels n = 1
    const std::size_t len = 260 + 16 * static_cast<std::size_t>(target_half);
    std::vector<BigInt> m(len);
    std::vector<std::int64_t> n(len, 1);
    for (std::size_t i = 0; i < len; ++i) m[i] = BigInt(1) << (i + 1);
    inst.P = build_params_toy(std::move(m), std::move(n));

    // block positions: anchor windows {2,3}, {5..9}, {11..21}
    std::vector<std::int64_t> pos;
    for (std::int64_t p : {2, 3}) pos.push_back(p);
    for (std::int64_t p = 5; p <= 9; ++p) pos.push_back(p);
    for (std::int64_t p = 11; p <= 21; ++p) pos.push_back(p);
    const std::size_t w1 = 2, w2 = 5, w3 = 11;

    // functional positions in three high regions
    const std::int64_t H1 = (std::int64_t(1) << 20) * scale;
    const std::int64_t H2 = (std::int64_t(1) << 21) * scale;
    const std::int64_t H3 = (std::int64_t(1) << 22) * scale;
    std::vector<std::int64_t> fpos;
    for (std::size_t i = 0; i < w1; ++i) fpos.push_back(H1 + 2 * static_cast<std::int64_t>(i));
    for (std::size_t i = 0; i < w2; ++i) fpos.push_back(H2 + 2 * static_cast<std::int64_t>(i));
    for (std::size_t i = 0; i < w3; ++i) fpos.push_back(H3 + 2 * static_cast<std::int64_t>(i));
    for (std::size_t i = 0; i < pos.size(); ++i)
        inst.fns.push_back(Functional::make_leaf(+1, fpos[i]));

    // dry-run the sigma chain to learn the window boundaries
    std::int64_t j1 = target_half + 2;
    while (!inst.P.in_N1(j1)) ++j1;
    auto scratch = reg_state.clone();
    SpecialSequence seq;
    std::vector<std::int64_t> js = {j1};
    const std::int64_t anchors[3] = {3, 9, 21};
    std::size_t foff = 0;
    const std::size_t wsizes[3] = {w1, w2, w3};
    for (int i = 0; i < 3; ++i) {
        FiniteSet E{anchors[i] + 1};
        for (std::size_t k = 0; k < wsizes[i]; ++k) E = E.with(fpos[foff + k]);
        foff += wsizes[i];
        seq = seq.extended({E, js.back()});
        if (i < 2) js.push_back(scratch.assign(seq, inst.P));
    }

    // window weights: odd halves strictly between consecutive sigma values
    std::vector<std::int64_t> halves;
    const std::int64_t gaps[3] = {4, 4, 6}; // even strides keep the parity
    for (int i = 0; i < 3; ++i) {
        std::int64_t h = js[i] + 1;
        if (h % 2 == 0) ++h;
        for (std::size_t k = 0; k < wsizes[i]; ++k) {
            halves.push_back(h);
            h += gaps[i];
        }
        if (i < 2 && halves.back() >= js[i + 1])
            throw std::logic_error(
                "gap_demo: window weights collide with the sigma chain (scale too large)");
    }

    std::vector<Vec> blocks;
    for (auto p : pos) blocks.push_back(Vec::basis(p));
    inst.ris = build_ris_with_halves(blocks, halves, Rational(1), inst.P);
    return inst;
}

// Builds the dependent chain, evaluates its special functional against unit
// vectors planted inside the witness sets, and reports both sides of the gap.
inline GapReport gap_demo(SigmaRegistry& reg, std::int64_t target_half, std::int64_t scale,
                          const norm::NormOptions& opt = {}) {
    auto inst = gap_instance(target_half, scale, reg);
    auto dep = build_dependent(reg, inst.ris, target_half, inst.fns, inst.P);

    GapReport rep;
    rep.target_half = target_half;
    rep.d = dep.zs.size();
    rep.j_halves = dep.j_halves;
    rep.strict_growth = inst.P.strict_growth();

    // witness-side vectors: the heaviest coordinate of each g_i
    std::vector<Vec> ys;
    for (const auto& g : dep.gs) {
        const auto coeffs = fn_coefficients(*g, inst.P);
        std::int64_t arg = coeffs.begin()->first;
        double bestc = 0;
        for (const auto& [idx, c] : coeffs)
            if (std::abs(c) > bestc) {
                bestc = std::abs(c);
                arg = idx;
            }
        ys.push_back(Vec::basis(arg, QScalar::from_int(coeffs.at(arg) >= 0 ? 1 : -1)));
    }
    Vec ycombo = averages::combine(ys, dep.b);
    rep.lower = evaluate(*dep.special_functional, ycombo, inst.P);
    if (ycombo.support_size() <= opt.dp_cap) {
        rep.upper = norm::norm_bounds(ycombo, inst.P, reg, opt).upper;
    } else {
        rep.upper = ul2_envelope(ys, dep.b, inst.P, reg, opt);
    }
    if (rep.lower > rep.upper + kRelTol)
        throw std::logic_error("gap_demo: sandwich violated (internal error)");

    rep.upper_z = ul2_envelope(dep.zs, dep.b, inst.P, reg, opt);
    rep.star_rhs = to_double(dep.C) /
                   (inst.P.m_double(2 * target_half + 1) * inst.P.m_double(2 * target_half + 1));
    rep.star_holds = rep.upper_z <= rep.star_rhs * (1 + kRelTol);
    rep.theta_measured = rep.lower * inst.P.m_double(2 * target_half + 1);
    rep.ratio = rep.upper_z > 0 ? rep.theta_measured / rep.upper_z : 0;
    rep.notes.push_back("d = " + std::to_string(rep.d));
    if (!rep.strict_growth)
        rep.notes.push_back("toy growth: the star-side constant is reported, not asserted");
    return rep;
}

} // namespace mtn::constructions
