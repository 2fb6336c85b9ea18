#pragma once

#include "mtn/estimates.hpp"

#include <json.hpp>

#include <fstream>
#include <string>

namespace mtn::io {

using nlohmann::json;

// ---- scalars ---------------------------------------------------------------

inline json to_json(const Rational& r) { return to_string(r); }

inline Rational rational_from(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    throw std::invalid_argument("expected a rational string");
}

inline json to_json(const QScalar& q) {
    if (q.has_rational() && !q.approx) return to_string(q.rational_value());
    json o;
    if (q.approx) {
        o["approx"] = q.value();
    } else {
        o["sign"] = q.sign;
        o["sq"] = to_string(q.sq);
    }
    return o;
}

inline QScalar qscalar_from(const json& j) {
    if (j.is_string() || j.is_number_integer())
        return QScalar::from_rational(rational_from(j));
    if (j.is_number_float()) return QScalar::from_double(j.get<double>());
    if (j.is_object()) {
        if (j.contains("approx")) return QScalar::from_double(j["approx"].get<double>());
        return QScalar::from_square(rational_from(j.at("sq")),
                                    j.value("sign", 1));
    }
    throw std::invalid_argument("bad scalar encoding");
}

// ---- sets and vectors -------------------------------------------------------

inline json to_json(const FiniteSet& F) { return F.elems; }

inline FiniteSet finite_set_from(const json& j) {
    return FiniteSet(j.get<std::vector<std::int64_t>>());
}

inline json to_json(const Vec& v) {
    json coeffs = json::array();
    for (const auto& [i, c] : v.entries()) coeffs.push_back(json::array({i, to_json(c)}));
    return json{{"coeffs", coeffs}};
}

inline Vec vec_from(const json& j) {
    Vec v;
    for (const auto& e : j.at("coeffs"))
        v.set(e.at(0).get<std::int64_t>(), qscalar_from(e.at(1)));
    return v;
}

// ---- parameters --------------------------------------------------------------

inline json to_json(const ParameterSystem& P) {
    json m = json::array(), n = json::array();
    for (const auto& v : P.m) m.push_back(to_string(v));
    for (const auto& v : P.n) n.push_back(v);
    return json{{"mode", P.strict_mode ? "strict" : "toy"},
                {"m", m},
                {"n", n},
                {"violations", P.violations}};
}

inline ParameterSystem params_from(const json& j) {
    if (j.contains("mode") && j["mode"] == "strict" && j.contains("levels"))
        return build_params_strict(j["levels"].get<std::size_t>());
    std::vector<BigInt> m;
    std::vector<std::int64_t> n;
    for (const auto& v : j.at("m"))
        m.push_back(v.is_string() ? BigInt(v.get<std::string>()) : BigInt(v.get<long long>()));
    for (const auto& v : j.at("n")) n.push_back(v.get<std::int64_t>());
    return build_params_toy(std::move(m), std::move(n));
}

// ---- sigma machinery ----------------------------------------------------------

inline json to_json(const SpecialSequence& s) {
    json pairs = json::array();
    for (const auto& p : s.pairs) pairs.push_back(json::array({to_json(p.E), p.j}));
    return pairs;
}

inline SpecialSequence sequence_from(const json& j) {
    SpecialSequence s;
    for (const auto& p : j)
        s.pairs.push_back({finite_set_from(p.at(0)), p.at(1).get<std::int64_t>()});
    return s;
}

inline json to_json(const SigmaRegistry& reg) {
    json entries = json::array();
    for (const auto& e : reg.log())
        entries.push_back(json{{"seq", to_json(e.seq)}, {"sigma", e.sigma}});
    return json{{"assignments", entries}};
}

inline SigmaRegistry registry_from(const json& j, const ParameterSystem& P) {
    SigmaRegistry reg;
    for (const auto& e : j.at("assignments"))
        reg.adopt(sequence_from(e.at("seq")), e.at("sigma").get<std::int64_t>(), P);
    return reg;
}

// ---- functionals ----------------------------------------------------------------

inline json to_json(const Functional& f) {
    if (f.leaf) return json{{"leaf", json::array({f.sign, f.index})}};
    json children = json::array();
    for (const auto& c : f.children) {
        json lam_sq;
        if (c.lambda.approx)
            lam_sq = c.lambda.value() * c.lambda.value();
        else
            lam_sq = to_string(c.lambda.sq);
        children.push_back(json::array({lam_sq, c.lambda.sign, to_json(*c.fn)}));
    }
    json node{{"parity", f.w % 2 == 0 ? "even" : "odd"}, {"j", f.w}, {"children", children}};
    if (f.witness) node["witness"] = to_json(*f.witness);
    return json{{"node", node}};
}

inline FnPtr functional_from(const json& j) {
    if (j.contains("leaf")) {
        const auto& l = j["leaf"];
        return Functional::make_leaf(l.at(0).get<int>(), l.at(1).get<std::int64_t>());
    }
    const auto& nd = j.at("node");
    std::vector<FnChild> kids;
    for (const auto& c : nd.at("children")) {
        QScalar lam;
        const auto& sq = c.at(0);
        const int sign = c.at(1).get<int>();
        if (sq.is_number_float()) {
            const double s = sq.get<double>();
            lam = QScalar::from_double((sign >= 0 ? 1 : -1) * std::sqrt(std::max(0.0, s)));
        } else {
            lam = QScalar::from_square(rational_from(sq), sign);
        }
        kids.push_back({lam, functional_from(c.at(2))});
    }
    const std::int64_t w = nd.at("j").get<std::int64_t>();
    const std::string parity = nd.value("parity", w % 2 == 0 ? "even" : "odd");
    if ((parity == "even") != (w % 2 == 0))
        throw std::invalid_argument("functional: parity does not match the weight index");
    std::optional<SpecialSequence> wit;
    if (nd.contains("witness")) wit = sequence_from(nd["witness"]);
    return Functional::make_node(w, std::move(kids), std::move(wit));
}

// ---- norm bounds -----------------------------------------------------------------

inline json to_json(const norm::NormBounds& nb) {
    json o{{"lower", nb.lower},
           {"upper", nb.upper},
           {"upper_method", nb.upper_method},
           {"exact", nb.exact},
           {"note", nb.note}};
    if (nb.lower_certificate) o["lower_certificate"] = to_json(*nb.lower_certificate);
    return o;
}

// ---- scc / construction witnesses ---------------------------------------------------

inline json to_json(const averages::SccWitness& w) {
    json b = json::array();
    for (const auto& v : w.b_sq) b.push_back(to_string(v));
    return json{{"p", w.p},          {"eps", to_string(w.eps)},
                {"n", w.n},          {"anchors", w.anchors},
                {"b_sq", b},         {"anchors_maximal", w.anchors_maximal}};
}

inline averages::SccWitness scc_witness_from(const json& j) {
    averages::SccWitness w;
    w.p = j.at("p").get<int>();
    w.eps = rational_from(j.at("eps"));
    w.n = j.at("n").get<std::int64_t>();
    w.anchors = j.at("anchors").get<std::vector<std::int64_t>>();
    for (const auto& v : j.at("b_sq")) w.b_sq.push_back(rational_from(v));
    w.anchors_maximal = j.value("anchors_maximal", false);
    return w;
}

inline json to_json(const constructions::RISWitness& w) {
    json blocks = json::array(), sccs = json::array();
    for (const auto& b : w.blocks) blocks.push_back(to_json(b));
    for (const auto& s : w.sccs) sccs.push_back(to_json(s));
    return json{{"blocks", blocks},
                {"halves", w.halves},
                {"sccs", sccs},
                {"C", to_string(w.C)},
                {"seminormalized", w.seminormalized}};
}

inline constructions::RISWitness ris_from(const json& j) {
    constructions::RISWitness w;
    for (const auto& b : j.at("blocks")) w.blocks.push_back(vec_from(b));
    w.halves = j.at("halves").get<std::vector<std::int64_t>>();
    for (const auto& s : j.at("sccs")) w.sccs.push_back(scc_witness_from(s));
    w.C = rational_from(j.at("C"));
    w.seminormalized = j.value("seminormalized", false);
    return w;
}

inline json to_json(const constructions::DependentWitness& w) {
    json zs = json::array(), gs = json::array(), b = json::array(), wsccs = json::array();
    for (const auto& z : w.zs) zs.push_back(to_json(z));
    for (const auto& g : w.gs) gs.push_back(to_json(*g));
    for (const auto& c : w.b) b.push_back(to_json(c));
    for (const auto& s : w.window_sccs) wsccs.push_back(to_json(s));
    return json{{"zs", zs},
                {"j_halves", w.j_halves},
                {"gs", gs},
                {"seq", to_json(w.seq)},
                {"b", b},
                {"scc", to_json(w.scc)},
                {"window_sccs", wsccs},
                {"special_functional", to_json(*w.special_functional)},
                {"target_half", w.target_half},
                {"C", to_string(w.C)}};
}

// ---- estimates -------------------------------------------------------------------

inline json to_json(const estimates::Instance& inst) {
    json fns = json::array(), xs = json::array(), lambdas = json::array(), b = json::array(),
         c = json::array(), sccs = json::array();
    for (const auto& f : inst.fns) fns.push_back(to_json(*f));
    for (const auto& x : inst.xs) xs.push_back(to_json(x));
    for (const auto& l : inst.lambdas) lambdas.push_back(to_json(l));
    for (const auto& v : inst.b) b.push_back(to_json(v));
    for (const auto& v : inst.c) c.push_back(to_string(v));
    for (const auto& s : inst.scc_witnesses) sccs.push_back(to_json(s));
    return json{{"kind", estimates::kind_name(inst.kind)},
                {"params", to_json(inst.P)},
                {"functionals", fns},
                {"lambdas", lambdas},
                {"vectors", xs},
                {"b", b},
                {"c", c},
                {"C", to_string(inst.C)},
                {"q", inst.q},
                {"j0", inst.j0},
                {"eps", to_string(inst.eps)},
                {"halves", inst.halves},
                {"target_half", inst.target_half},
                {"scc_witnesses", sccs},
                {"seq", to_json(inst.seq)},
                {"seed", inst.seed}};
}

inline estimates::Instance instance_from(const json& j) {
    estimates::Instance inst;
    inst.kind = estimates::kind_from(j.at("kind").get<std::string>());
    inst.P = params_from(j.at("params"));
    for (const auto& f : j.at("functionals")) inst.fns.push_back(functional_from(f));
    for (const auto& l : j.at("lambdas")) inst.lambdas.push_back(qscalar_from(l));
    for (const auto& x : j.at("vectors")) inst.xs.push_back(vec_from(x));
    for (const auto& v : j.at("b")) inst.b.push_back(qscalar_from(v));
    for (const auto& v : j.at("c")) inst.c.push_back(rational_from(v));
    inst.C = rational_from(j.at("C"));
    inst.q = j.value("q", std::int64_t(0));
    inst.j0 = j.value("j0", std::int64_t(0));
    if (j.contains("eps")) inst.eps = rational_from(j["eps"]);
    if (j.contains("halves")) inst.halves = j["halves"].get<std::vector<std::int64_t>>();
    inst.target_half = j.value("target_half", std::int64_t(0));
    if (j.contains("scc_witnesses"))
        for (const auto& s : j["scc_witnesses"]) inst.scc_witnesses.push_back(scc_witness_from(s));
    if (j.contains("seq")) inst.seq = sequence_from(j["seq"]);
    inst.seed = j.value("seed", std::uint64_t(0));
    return inst;
}

inline json to_json(const estimates::CountingInstance& inst) {
    json T = json::array(), x = json::array();
    for (const auto& row : inst.T) {
        json r = json::array();
        for (const auto& v : row) r.push_back(to_string(v));
        T.push_back(r);
    }
    for (const auto& v : inst.x) x.push_back(to_string(v));
    return json{{"A", inst.A}, {"T", T}, {"x", x}};
}

inline estimates::CountingInstance counting_from(const json& j) {
    estimates::CountingInstance inst;
    inst.A = j.at("A").get<std::vector<std::int64_t>>();
    for (const auto& row : j.at("T")) {
        std::vector<Rational> r;
        for (const auto& v : row) r.push_back(rational_from(v));
        inst.T.push_back(std::move(r));
    }
    for (const auto& v : j.at("x")) inst.x.push_back(rational_from(v));
    return inst;
}

// ---- file helpers -------------------------------------------------------------------

inline json load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
    }
}

inline void save_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

} // namespace mtn::io
