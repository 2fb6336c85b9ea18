#include "mtn/json_io.hpp"
#include "mtn/sigma.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace mtn;

namespace {

ParameterSystem geometric_params(std::size_t len = 64) {
    std::vector<BigInt> m(len);
    std::vector<std::int64_t> n(len, 1);
    for (std::size_t i = 0; i < len; ++i) m[i] = BigInt(1) << (i + 1);
    return build_params_toy(std::move(m), std::move(n));
}

} // namespace

TEST_CASE("strict parameter generation") {
    const auto P = build_params_strict(4);
    REQUIRE(P.m.size() == 4);
    CHECK(P.m[0] == 2);
    CHECK(P.m[1] == 2);
    CHECK(P.m[2] == 8);
    CHECK(P.m[3] == 512);
    REQUIRE(P.n.size() == 4);
    CHECK(P.n[0] == 1);
    CHECK(P.n[1] == 9);    // ell_1 = 4, minimal above 4*2
    CHECK(P.n[2] == 101);  // ell_2 = 10, minimal above 10*10
    CHECK(P.n[3] == 2857); // ell_3 = 28, minimal above 28*102
    CHECK(P.strict_growth());
}

TEST_CASE("toy parameter validation") {
    const auto P = build_params_toy({2, 2, 2, 2}, {1, 1, 1, 1});
    CHECK_FALSE(P.strict_growth());
    CHECK(P.violations.size() >= 2);
    CHECK_THROWS_AS(build_params_toy({2, 0, 2}, {1, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(build_params_toy({2, 2, 1}, {1, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(build_params_toy({4, 2, 2}, {1, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(build_params_toy({2, 2, 4}, {1, 1, 0}), std::invalid_argument);
}

TEST_CASE("sigma assignment rule is pinned") {
    const auto P = geometric_params();
    SigmaRegistry reg;
    SpecialSequence s;
    s.pairs.push_back({FiniteSet{4, 5}, 1}); // j_1 = 1 in N1, maxsupp E = 5
    // threshold: m_0 * 25 = 50; candidates j in N2 above 1: m_4 = 32 <= 50,
    // m_8 = 512 > 50, so sigma = 4
    const auto j = reg.assign(s, P);
    CHECK(j == 4);
    CHECK(reg.assign(s, P) == 4); // idempotent
    SpecialSequence bad;
    bad.pairs.push_back({FiniteSet{4, 5}, 1});
    bad.pairs.push_back({FiniteSet{5, 9}, 4}); // overlaps E_1
    CHECK_THROWS_AS(reg.assign(bad, P), std::invalid_argument);
}

TEST_CASE("extend_special") {
    const auto P = geometric_params();
    SigmaRegistry reg;
    SpecialSequence s;
    auto s1 = extend_special(reg, s, FiniteSet{4, 5}, P, 1);
    REQUIRE(s1.size() == 1);
    auto s2 = extend_special(reg, s1, FiniteSet{7, 9}, P);
    REQUIRE(s2.size() == 2);
    CHECK(sigma_membership_violation(s2, P).empty());
    CHECK(reg.chain_violation(s2).empty());
    auto s3 = extend_special(reg, s2, FiniteSet{11}, P);
    REQUIRE(s3.size() == 3);
    CHECK(reg.chain_violation(s3).empty());
    CHECK_THROWS_AS(extend_special(reg, s2, FiniteSet{5, 20}, P), std::invalid_argument);
    CHECK_THROWS_AS(extend_special(reg, SpecialSequence{}, FiniteSet{3}, P, 2),
                    std::invalid_argument); // j_1 must be in N1
}

TEST_CASE("sigma growth along chains") {
    const auto P = geometric_params();
    SigmaRegistry reg;
    SpecialSequence s;
    s = extend_special(reg, s, FiniteSet{2, 6}, P, 3);
    s = extend_special(reg, s, FiniteSet{8, 12}, P);
    s = extend_special(reg, s, FiniteSet{20}, P);
    for (const auto& e : reg.log()) {
        std::int64_t parent = 0;
        if (e.seq.size() > 1) parent = *reg.lookup(e.seq.prefix(e.seq.size() - 1));
        const BigInt t(e.seq.pairs.back().E.max());
        CHECK(P.m_at(2 * e.sigma) > P.m_at(2 * parent) * t * t);
    }
}

TEST_CASE("tree-like verdicts") {
    const auto P = geometric_params(128);
    SigmaRegistry reg;
    SpecialSequence root;
    auto base = extend_special(reg, root, FiniteSet{4, 5}, P, 1);
    base = extend_special(reg, base, FiniteSet{8, 9}, P);
    // two extensions of the same prefix diverging in the set
    auto left = extend_special(reg, base, FiniteSet{30, 31}, P);
    auto right = extend_special(reg, base, FiniteSet{40, 41}, P);
    // the diverging sets share sigma(base), so the branch sits at position 3
    auto v = check_treelike(left, right, reg, P);
    REQUIRE(v.kind == TreelikeVerdict::Kind::branch);
    CHECK(v.d == 3);

    auto self = check_treelike(left, left, reg, P);
    CHECK(self.kind == TreelikeVerdict::Kind::prefix_equal);
    CHECK(self.d == left.size() + 1);

    // chains started from different N1 roots never share a weight
    auto other = extend_special(reg, root, FiniteSet{6, 7}, P, 3);
    other = extend_special(reg, other, FiniteSet{10, 11}, P);
    auto w = check_treelike(left, other, reg, P);
    CHECK(w.kind == TreelikeVerdict::Kind::disjoint_weights);
}

TEST_CASE("registry persistence replays bit-exactly") {
    const auto P = geometric_params(128);
    SigmaRegistry reg;
    std::mt19937_64 rng(5);
    std::vector<SpecialSequence> pool;
    std::int64_t hi = 1;
    for (int t = 0; t < 40; ++t) {
        std::uniform_int_distribution<int> coin(0, 3);
        FiniteSet E{hi + 1, hi + 2};
        hi += 3;
        if (pool.empty() || coin(rng) == 0) {
            pool.push_back(extend_special(reg, SpecialSequence{}, E, P, 1 + 2 * coin(rng)));
        } else {
            std::uniform_int_distribution<std::size_t> pi(0, pool.size() - 1);
            const auto& b = pool[pi(rng)];
            if (b.size() >= 3) continue;
            pool.push_back(extend_special(reg, b, E, P));
        }
    }
    const auto dumped = io::to_json(reg);
    auto loaded = io::registry_from(dumped, P);
    REQUIRE(loaded.size() == reg.size());
    for (const auto& e : reg.log()) REQUIRE(loaded.lookup(e.seq) == e.sigma);
    // deterministic reassignment in the original order
    SigmaRegistry fresh;
    for (const auto& e : reg.log()) REQUIRE(fresh.assign(e.seq, P) == e.sigma);
}

TEST_CASE("registry too short throws") {
    auto P = build_params_toy({2, 2, 2, 2}, {1, 1, 1, 1});
    SigmaRegistry reg;
    SpecialSequence s;
    s.pairs.push_back({FiniteSet{4, 5}, 1});
    CHECK_THROWS_AS(reg.assign(s, P), std::out_of_range);
}
