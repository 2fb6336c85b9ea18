#pragma once

#include "mtn/sigma.hpp"
#include "mtn/vec.hpp"

#include <memory>
#include <string>
#include <vector>

namespace mtn {

// Tree representation of a norming-set element: a signed basis functional at
// the leaves, or a weighted node (1/m_w) sum lambda_i f_i. w is the direct
// index into the weight list; even w means an allowable-family node, odd w a
// coded special node carrying its sequence witness.
struct Functional;
using FnPtr = std::shared_ptr<const Functional>;

struct FnChild {
    QScalar lambda;
    FnPtr fn;
};

struct Functional {
    bool leaf = true;
    int sign = 1;
    std::int64_t index = 1; // leaf basis index

    std::int64_t w = 0; // node weight index (m_w)
    std::vector<FnChild> children;
    std::optional<SpecialSequence> witness; // odd nodes

    static FnPtr make_leaf(int sign, std::int64_t index) {
        auto f = std::make_shared<Functional>();
        f->leaf = true;
        f->sign = sign >= 0 ? 1 : -1;
        f->index = index;
        return f;
    }

    static FnPtr make_node(std::int64_t w, std::vector<FnChild> children,
                           std::optional<SpecialSequence> witness = std::nullopt) {
        auto f = std::make_shared<Functional>();
        f->leaf = false;
        f->w = w;
        f->children = std::move(children);
        f->witness = std::move(witness);
        return f;
    }

    bool odd() const { return !leaf && (w % 2 == 1); }

    FiniteSet support() const {
        if (leaf) return FiniteSet{index};
        FiniteSet s;
        for (const auto& c : children) s = FiniteSet::unite(s, c.fn->support());
        return s;
    }
};

// weight of a functional: m_w for nodes, nothing for leaves
inline std::optional<BigInt> weight(const Functional& f, const ParameterSystem& P) {
    if (f.leaf) return std::nullopt;
    return P.m_at(f.w);
}

struct ValidateOptions {
    bool quarantine = false;      // adopt unknown witnesses into a scratch registry
    double lambda_slack = kLambdaSlack;
};

struct Verdict {
    bool ok = true;
    std::string reason;
    std::string path;
};

namespace detail {

inline Verdict fail(std::string reason, const std::string& path) {
    return {false, std::move(reason), path};
}

inline Verdict validate_rec(const Functional& f, const ParameterSystem& P, SigmaRegistry& reg,
                            const ValidateOptions& opt, const std::string& path) {
    if (f.leaf) {
        if (f.index < 1) return fail("leaf index must be >= 1", path);
        if (f.sign != 1 && f.sign != -1) return fail("leaf sign must be +-1", path);
        return {};
    }
    if (f.children.empty()) return fail("node without children", path);
    if (!P.has_index(f.w)) return fail("weight index m_" + std::to_string(f.w) + " missing", path);
    if (f.w < 1) return fail("node weight index must be >= 1", path);

    // sum lambda^2 <= 1, exact in the rational-square regime
    bool exact = true;
    Rational sq_sum = 0;
    double sq_sum_d = 0;
    for (const auto& c : f.children) {
        if (c.lambda.approx) exact = false;
        sq_sum += c.lambda.sq;
        const double lv = c.lambda.value();
        sq_sum_d += lv * lv;
    }
    if (exact) {
        if (sq_sum > 1) return fail("sum lambda^2 = " + to_string(sq_sum) + " exceeds 1", path);
    } else if (sq_sum_d > 1.0 + opt.lambda_slack) {
        return fail("sum lambda^2 exceeds 1 beyond slack", path);
    }

    // child supports pairwise disjoint
    std::vector<FiniteSet> sup;
    sup.reserve(f.children.size());
    for (const auto& c : f.children) sup.push_back(c.fn->support());
    for (std::size_t i = 0; i < sup.size(); ++i) {
        if (sup[i].empty()) return fail("child with empty support", path);
        for (std::size_t l = i + 1; l < sup.size(); ++l)
            if (!FiniteSet::disjoint(sup[i], sup[l]))
                return fail("children " + std::to_string(i) + "," + std::to_string(l) +
                                " overlap",
                            path);
    }

    if (f.w % 2 == 0) {
        if (f.witness) return fail("even node carries a witness", path);
        SetFamily fam;
        fam.mode = FamilyMode::allowable;
        fam.members = sup;
        const auto fv = schreier::check_family(fam, P.n_at(f.w));
        if (!fv.ok) return fail("even node family not S_{n_w}-allowable: " + fv.violation, path);
    } else {
        if (!f.witness) return fail("odd node missing its sequence witness", path);
        const auto& wit = *f.witness;
        if (wit.size() != f.children.size())
            return fail("witness length differs from child count", path);
        if (auto v = sigma_membership_violation(wit, P); !v.empty())
            return fail("witness not in Sigma: " + v, path);
        // chained through the registry; quarantine mode adopts unknown links
        for (std::size_t i = 1; i < wit.size(); ++i) {
            const auto pre = wit.prefix(i);
            auto got = reg.lookup(pre);
            if (!got) {
                if (!opt.quarantine)
                    return fail("witness prefix " + std::to_string(i) + " not registered", path);
                try {
                    reg.adopt(pre, wit.pairs[i].j, P);
                } catch (const std::exception& e) {
                    return fail(std::string("witness rejected by quarantine registry: ") +
                                    e.what(),
                                path);
                }
            } else if (*got != wit.pairs[i].j) {
                return fail("witness breaks sigma chaining at " + std::to_string(i), path);
            }
        }
        // S_{n_w} qualification: mins in S_{n_w} and 2 j_1 > w + 1
        FiniteSet mins;
        for (const auto& p : wit.pairs) mins = FiniteSet::unite(mins, FiniteSet{p.E.min()});
        if (!schreier::is_member(mins, P.n_at(f.w)))
            return fail("witness mins not in S_{n_w}", path);
        if (!(2 * wit.pairs[0].j > f.w + 1))
            return fail("first witness weight 2 j_1 must exceed " + std::to_string(f.w + 1),
                        path);
        for (std::size_t i = 0; i < wit.size(); ++i) {
            if (!sup[i].subset_of(wit.pairs[i].E))
                return fail("child " + std::to_string(i) + " support not inside witness set",
                            path);
            const auto& ch = *f.children[i].fn;
            if (ch.leaf || ch.w != 2 * wit.pairs[i].j)
                return fail("child " + std::to_string(i) + " must carry weight m_" +
                                std::to_string(2 * wit.pairs[i].j),
                            path);
        }
    }

    for (std::size_t i = 0; i < f.children.size(); ++i) {
        auto v = validate_rec(*f.children[i].fn, P, reg, opt,
                              path + ".children[" + std::to_string(i) + "]");
        if (!v.ok) return v;
    }
    return {};
}

} // namespace detail

// Certifies membership in the norming set: every structural invariant above,
// plus registered sigma-special witnesses on odd nodes. Returns the first
// violated condition with its node path.
inline Verdict validate(const Functional& f, const ParameterSystem& P, const SigmaRegistry& reg,
                        const ValidateOptions& opt = {}) {
    auto scratch = reg.clone(); // adoption, when allowed, stays in the scratch copy
    return detail::validate_rec(f, P, scratch, opt, "root");
}

// f(x) in binary64, bottom-up.
inline double evaluate(const Functional& f, const Vec& x, const ParameterSystem& P) {
    if (f.leaf) return f.sign * x.coeff(f.index).value();
    double s = 0;
    for (const auto& c : f.children) s += c.lambda.value() * evaluate(*c.fn, x, P);
    return s / to_double(P.m_at(f.w));
}

// coefficient sequence of the functional as an element of c_00
inline void fn_coefficients(const Functional& f, const ParameterSystem& P, double scale,
                            std::map<std::int64_t, double>& out) {
    if (f.leaf) {
        out[f.index] += scale * f.sign;
        return;
    }
    const double inv = 1.0 / to_double(P.m_at(f.w));
    for (const auto& c : f.children)
        fn_coefficients(*c.fn, P, scale * inv * c.lambda.value(), out);
}

inline std::map<std::int64_t, double> fn_coefficients(const Functional& f,
                                                      const ParameterSystem& P) {
    std::map<std::int64_t, double> out;
    fn_coefficients(f, P, 1.0, out);
    return out;
}

// Scalar collapse on an even node: reweights the children so that
// g(x) = (1/m_w) (sum f_i(x)^2)^{1/2}. When every child evaluates to zero the
// node is returned unchanged.
inline FnPtr collapse_lambda(const FnPtr& f, const Vec& x, const ParameterSystem& P) {
    if (f->leaf) throw std::invalid_argument("collapse_lambda: leaf");
    if (f->odd()) throw std::invalid_argument("collapse_lambda: odd node scalars are fixed");
    std::vector<double> v;
    v.reserve(f->children.size());
    double sq = 0;
    for (const auto& c : f->children) {
        const double t = evaluate(*c.fn, x, P);
        v.push_back(t);
        sq += t * t;
    }
    if (sq == 0) return f;
    const double norm = std::sqrt(sq);
    std::vector<FnChild> kids;
    kids.reserve(f->children.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        kids.push_back({QScalar::from_double(v[i] / norm), f->children[i].fn});
    return Functional::make_node(f->w, std::move(kids));
}

// ---------------------------------------------------------------------------
// tree annotations: cumulative weight products m(a) and scalar products
// lambda(a) over a tree representation sum_l lambda_l f_l
// ---------------------------------------------------------------------------

struct AnnotatedNode {
    const Functional* fn = nullptr;
    int parent = -1;
    int root = 0;          // index of the representation root this node hangs off
    BigInt m_prod = 1;     // product of ancestor weights, root excluded from itself
    double lambda_prod = 1;
    Rational lambda_sq = 1; // exact square of lambda_prod when exact
    bool exact = true;
    int depth = 0;
};

struct TreeAnnotations {
    std::vector<AnnotatedNode> nodes;

    std::vector<int> children_of(int idx) const {
        std::vector<int> out;
        for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
            if (nodes[i].parent == idx) out.push_back(i);
        return out;
    }

    bool is_antichain(const std::vector<int>& d) const {
        for (auto a : d)
            for (auto b : d) {
                if (a == b) continue;
                int cur = nodes[b].parent;
                while (cur != -1) {
                    if (cur == a) return false;
                    cur = nodes[cur].parent;
                }
            }
        return true;
    }

    double lambda_sq_sum(const std::vector<int>& d) const {
        double s = 0;
        for (auto i : d) s += nodes[i].lambda_prod * nodes[i].lambda_prod;
        return s;
    }

    // sum over D of (lambda(a)/m(a)) f_a (x)
    double antichain_eval(const std::vector<int>& d, const Vec& x,
                          const ParameterSystem& P) const {
        double s = 0;
        for (auto i : d)
            s += nodes[i].lambda_prod / to_double(nodes[i].m_prod) * evaluate(*nodes[i].fn, x, P);
        return s;
    }

    std::vector<int> leaves() const {
        std::vector<int> out;
        for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
            if (nodes[i].fn->leaf) out.push_back(i);
        return out;
    }

    // nodes a with every strict ancestor of weight <= m_{j-1} and cumulative
    // ancestor weight product below m_j^3; the depth bound |{b < a}| <
    // 3 log2(m_j) is checked by the caller
    std::vector<int> shallow_filter(std::int64_t j, const ParameterSystem& P) const {
        std::vector<int> out;
        const BigInt mj3 = P.m_at(j) * P.m_at(j) * P.m_at(j);
        for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
            bool ok = nodes[i].m_prod < mj3;
            int cur = nodes[i].parent;
            while (ok && cur != -1) {
                const auto& anc = *nodes[cur].fn;
                if (!anc.leaf && P.m_at(anc.w) > P.m_at(j - 1)) ok = false;
                cur = nodes[cur].parent;
            }
            if (ok) out.push_back(i);
        }
        return out;
    }
};

namespace detail {

inline void annotate_rec(const Functional& f, const ParameterSystem& P, int parent, int root,
                         const BigInt& m_prod, double lambda_prod, const Rational& lambda_sq,
                         bool exact, int depth, TreeAnnotations& out) {
    AnnotatedNode n;
    n.fn = &f;
    n.parent = parent;
    n.root = root;
    n.m_prod = m_prod;
    n.lambda_prod = lambda_prod;
    n.lambda_sq = lambda_sq;
    n.exact = exact;
    n.depth = depth;
    const int idx = static_cast<int>(out.nodes.size());
    out.nodes.push_back(n);
    if (f.leaf) return;
    const BigInt next_m = m_prod * P.m_at(f.w);
    for (const auto& c : f.children)
        annotate_rec(*c.fn, P, idx, root, next_m, lambda_prod * c.lambda.value(),
                     lambda_sq * c.lambda.sq, exact && !c.lambda.approx, depth + 1, out);
}

} // namespace detail

// Annotate sum_l lambda_l f_l. For a single tree analysis pass one root with
// lambda = 1.
inline TreeAnnotations annotate(const std::vector<FnChild>& roots, const ParameterSystem& P) {
    TreeAnnotations out;
    for (std::size_t l = 0; l < roots.size(); ++l)
        detail::annotate_rec(*roots[l].fn, P, -1, static_cast<int>(l), 1,
                             roots[l].lambda.value(), roots[l].lambda.sq,
                             !roots[l].lambda.approx, 0, out);
    return out;
}

inline TreeAnnotations annotate(const FnPtr& f, const ParameterSystem& P) {
    return annotate({FnChild{QScalar::from_int(1), f}}, P);
}

} // namespace mtn
