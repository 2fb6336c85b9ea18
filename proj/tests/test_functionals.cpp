#include "mtn/functionals.hpp"
#include "mtn/json_io.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace mtn;

namespace {

ParameterSystem flat_params() { return toy_params_flat(10); }

FnPtr even_pair(std::int64_t a, std::int64_t b, const Rational& la_sq, const Rational& lb_sq,
                std::int64_t w = 2) {
    return Functional::make_node(w, {{QScalar::from_square(la_sq), Functional::make_leaf(1, a)},
                                     {QScalar::from_square(lb_sq), Functional::make_leaf(1, b)}});
}

// small random even-only tree over disjoint leaves
FnPtr random_tree(std::mt19937_64& rng, std::int64_t& next, int depth) {
    std::uniform_int_distribution<int> kid(1, 3), coin(0, 1);
    if (depth <= 1) {
        return Functional::make_leaf(coin(rng) ? 1 : -1, next += 1 + coin(rng));
    }
    const int k = kid(rng);
    std::vector<FnPtr> kids;
    for (int i = 0; i < k; ++i) kids.push_back(random_tree(rng, next, depth - 1));
    std::vector<FnChild> ch;
    for (int i = 0; i < k; ++i)
        ch.push_back({QScalar::from_square(Rational(1, k), coin(rng) ? 1 : -1), kids[i]});
    return Functional::make_node(2, std::move(ch));
}

} // namespace

TEST_CASE("validation") {
    const auto P = flat_params();
    SigmaRegistry reg;
    CHECK(validate(*Functional::make_leaf(1, 7), P, reg).ok);

    // lambda = (3/5, 4/5): unit ball, family {{4},{6}} allowable at n_2 = 1
    auto f = even_pair(4, 6, Rational(9, 25), Rational(16, 25));
    CHECK(validate(*f, P, reg).ok);

    auto too_heavy = even_pair(4, 6, Rational(1), Rational(1));
    const auto v = validate(*too_heavy, P, reg);
    CHECK_FALSE(v.ok);
    CHECK(v.reason.find("lambda") != std::string::npos);

    // overlapping children
    auto overlap = Functional::make_node(
        2, {{QScalar::from_square(Rational(1, 2)), Functional::make_leaf(1, 4)},
            {QScalar::from_square(Rational(1, 2)), Functional::make_leaf(1, 4)}});
    CHECK_FALSE(validate(*overlap, P, reg).ok);

    // mins {1,2} cannot be allowable at any level
    auto bad_family = Functional::make_node(
        2, {{QScalar::from_square(Rational(1, 2)), Functional::make_leaf(1, 1)},
            {QScalar::from_square(Rational(1, 2)), Functional::make_leaf(1, 2)}});
    CHECK_FALSE(validate(*bad_family, P, reg).ok);
}

TEST_CASE("odd node validation needs a registered witness") {
    const auto P = flat_params();
    SigmaRegistry reg;
    // witness ((E1, 2), (E2, 4)) with E1 = {4,5}, E2 = {8,9}; chain through
    // the registry
    SpecialSequence s;
    // N1 requires an odd first index with 2 j_1 > w + 1 = 2
    s = extend_special(reg, s, FiniteSet{4, 5}, P, 3);
    auto child1 = Functional::make_node(
        6, {{QScalar::from_int(1), Functional::make_leaf(1, 4)}});
    const auto j2 = *reg.lookup(s);
    s = s.extended({FiniteSet{8, 9}, j2});
    reg.assign(s.prefix(1), P);
    auto child2 = Functional::make_node(
        2 * j2, {{QScalar::from_int(1), Functional::make_leaf(1, 9)}});
    auto odd = Functional::make_node(
        1,
        {{QScalar::from_square(Rational(1, 2)), child1},
         {QScalar::from_square(Rational(1, 2)), child2}},
        s);
    CHECK(validate(*odd, P, reg).ok);

    // a fresh registry rejects it without quarantine and accepts with it
    SigmaRegistry fresh;
    CHECK_FALSE(validate(*odd, P, fresh).ok);
    CHECK(validate(*odd, P, fresh, {true}).ok);

    // wrong child weight
    auto wrong = Functional::make_node(
        1,
        {{QScalar::from_square(Rational(1, 2)), child1},
         {QScalar::from_square(Rational(1, 2)), child1 /* weight m_6, not m_{2 j2} */}},
        s);
    CHECK_FALSE(validate(*wrong, P, fresh, {true}).ok);
}

TEST_CASE("evaluation and weights") {
    const auto P = flat_params();
    CHECK(evaluate(*Functional::make_leaf(1, 5), Vec::basis(5), P) == 1.0);
    auto f = even_pair(4, 6, Rational(1, 2), Rational(1, 2));
    Vec x = Vec::basis(4) + Vec::basis(6);
    CHECK_THAT(evaluate(*f, x, P),
               Catch::Matchers::WithinAbs(std::sqrt(2.0) / 2.0, 1e-12));

    CHECK_FALSE(weight(*Functional::make_leaf(1, 3), P).has_value());
    const auto Q = build_params_toy({2, 2, 8, 512}, {1, 1, 2, 3});
    CHECK(weight(*even_pair(4, 6, Rational(1, 2), Rational(1, 2), 2), Q).value() == 8);
    // odd node of direct index 3 carries m_3
    SpecialSequence dummy;
    auto odd = Functional::make_node(
        3, {{QScalar::from_int(1),
             Functional::make_node(6, {{QScalar::from_int(1), Functional::make_leaf(1, 5)}})}},
        dummy);
    CHECK(weight(*odd, Q).value() == 512);
}

TEST_CASE("scalar collapse") {
    const auto P = flat_params();
    // children evaluating to 3 and 4 under weight 2 collapse to 5/2
    auto f = even_pair(4, 6, Rational(1, 2), Rational(1, 2));
    Vec x;
    x.set(4, QScalar::from_rational(Rational(3)));
    x.set(6, QScalar::from_rational(Rational(4)));
    auto g = collapse_lambda(f, x, P);
    CHECK_THAT(evaluate(*g, x, P), Catch::Matchers::WithinAbs(2.5, 1e-12));
    SigmaRegistry reg;
    CHECK(validate(*g, P, reg).ok);
    CHECK(evaluate(*g, x, P) >= evaluate(*f, x, P) - 1e-12);

    // all-zero children: unchanged
    Vec zero;
    CHECK(collapse_lambda(f, zero, P) == f);
    CHECK_THROWS_AS(collapse_lambda(Functional::make_leaf(1, 2), x, P), std::invalid_argument);
}

TEST_CASE("collapse dominates on random trees") {
    const auto P = flat_params();
    SigmaRegistry reg;
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> cf(1, 5), coin(0, 1), dep(2, 3);
    for (int t = 0; t < 100; ++t) {
        std::int64_t next = 3;
        auto f = random_tree(rng, next, dep(rng));
        if (f->leaf) continue;
        REQUIRE(validate(*f, P, reg).ok);
        Vec x;
        for (auto idx : f->support().elems) {
            Rational c(cf(rng), cf(rng));
            if (coin(rng)) c = -c;
            x.set(idx, QScalar::from_rational(c));
        }
        auto g = collapse_lambda(f, x, P);
        CHECK(validate(*g, P, reg).ok);
        CHECK(evaluate(*g, x, P) >= evaluate(*f, x, P) - 1e-9);
    }
}

TEST_CASE("annotations: antichain mass and reconstruction") {
    const auto P = flat_params();
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> cf(1, 5), coin(0, 1), dep(2, 4);
    for (int t = 0; t < 200; ++t) {
        std::int64_t next = 3;
        auto f = random_tree(rng, next, dep(rng));
        auto ann = annotate(f, P);
        // leaves form a maximal antichain
        const auto leaves = ann.leaves();
        REQUIRE(ann.is_antichain(leaves));
        CHECK(ann.lambda_sq_sum(leaves) <= 1.0 + std::pow(2.0, -40));
        Vec x;
        for (auto idx : f->support().elems) {
            Rational c(cf(rng), cf(rng));
            if (coin(rng)) c = -c;
            x.set(idx, QScalar::from_rational(c));
        }
        const double direct = evaluate(*f, x, P);
        const double vialeaves = ann.antichain_eval(leaves, x, P);
        CHECK_THAT(vialeaves, Catch::Matchers::WithinRel(direct, 1e-9) ||
                                  Catch::Matchers::WithinAbs(direct, 1e-12));
        // depth-1 cut (children of the root) is also maximal when present
        const auto kids = ann.children_of(0);
        if (!kids.empty()) {
            CHECK(ann.lambda_sq_sum(kids) <= 1.0 + std::pow(2.0, -40));
        }
    }
}

TEST_CASE("shallow filter matches the depth bound") {
    const auto Q = build_params_toy({2, 2, 4, 8, 64, 64}, {1, 1, 1, 2, 2, 3});
    std::mt19937_64 rng(23);
    for (int t = 0; t < 50; ++t) {
        std::int64_t next = 3;
        auto f = random_tree(rng, next, 3); // weights m_2 = 4
        auto ann = annotate(f, Q);
        // j = 4: ancestors must have weight <= m_3 = 8 and products < m_4^3
        const auto F = ann.shallow_filter(4, Q);
        for (auto idx : F) {
            // node-count bound along the ancestor chain
            int count = 0;
            int cur = ann.nodes[idx].parent;
            while (cur != -1) {
                ++count;
                cur = ann.nodes[cur].parent;
            }
            CHECK(count < 3 * std::log2(to_double(Q.m_at(4))));
        }
        // any sub-antichain of F built from leaves stays allowable at n_4 - 1
        std::vector<int> pick;
        for (auto idx : F)
            if (ann.nodes[idx].fn->leaf) pick.push_back(idx);
        if (!pick.empty()) {
            SetFamily fam;
            fam.mode = FamilyMode::allowable;
            for (auto idx : pick) fam.members.push_back(ann.nodes[idx].fn->support());
            CHECK(schreier::check_family(fam, Q.n_at(4) - 1).ok);
        }
    }
}

TEST_CASE("functional JSON round trip") {
    const auto P = flat_params();
    auto f = even_pair(4, 6, Rational(9, 25), Rational(16, 25));
    const auto j = io::to_json(*f);
    auto g = io::functional_from(j);
    SigmaRegistry reg;
    CHECK(validate(*g, P, reg).ok);
    Vec x = Vec::basis(4) + Vec::basis(6);
    CHECK(evaluate(*f, x, P) == evaluate(*g, x, P));
}
