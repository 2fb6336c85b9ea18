#include "mtn/averages.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace mtn;

namespace {

// subset-enumeration oracle for the Schreier mass maximum
Rational brute_mass(const Vec& x, int p, std::int64_t k) {
    std::vector<std::int64_t> vals;
    std::vector<Rational> mass;
    for (const auto& [i, c] : x.entries()) {
        vals.push_back(i);
        mass.push_back(p == 1 ? Rational(boost::multiprecision::abs(c.rational_value()))
                              : c.sq);
    }
    Rational best = 0;
    const std::uint32_t lim = 1u << vals.size();
    for (std::uint32_t m = 0; m < lim; ++m) {
        std::vector<std::int64_t> g;
        Rational tot = 0;
        for (std::size_t i = 0; i < vals.size(); ++i)
            if (m & (1u << i)) {
                g.push_back(vals[i]);
                tot += mass[i];
            }
        if (!schreier::is_member(FiniteSet(g), k)) continue;
        if (tot > best) best = tot;
    }
    return best;
}

std::vector<std::int64_t> iota_from(std::int64_t lo, std::size_t len) {
    std::vector<std::int64_t> v(len);
    for (std::size_t i = 0; i < len; ++i) v[i] = lo + static_cast<std::int64_t>(i);
    return v;
}

} // namespace

TEST_CASE("repeated averages, explicit values") {
    const auto a0 = averages::repeated_average(0, {5, 9, 14});
    REQUIRE(a0.support() == FiniteSet{5});
    REQUIRE(a0.coeff(5).rational_value() == 1);

    const auto a1 = averages::repeated_average(1, {2, 3, 4});
    REQUIRE(a1.support() == FiniteSet{2, 3});
    REQUIRE(a1.coeff(2).rational_value() == Rational(1, 2));
    REQUIRE(a1.coeff(3).rational_value() == Rational(1, 2));

    const auto a2 = averages::repeated_average(2, iota_from(2, 8));
    REQUIRE(a2.support() == FiniteSet{2, 3, 4, 5, 6, 7});
    REQUIRE(a2.coeff(2).rational_value() == Rational(1, 4));
    REQUIRE(a2.coeff(3).rational_value() == Rational(1, 4));
    for (std::int64_t i = 4; i <= 7; ++i)
        REQUIRE(a2.coeff(i).rational_value() == Rational(1, 8));
    REQUIRE(a2.l1_exact() == 1);

    CHECK_THROWS_AS(averages::repeated_average(2, {2, 3}), std::invalid_argument);
}

TEST_CASE("repeated averages, l1 mass and support shape") {
    for (std::int64_t n = 0; n <= 2; ++n) {
        for (std::int64_t lo = 2; lo <= 5; ++lo) {
            const std::size_t len = 40;
            Vec a;
            try {
                a = averages::repeated_average(n, iota_from(lo, len));
            } catch (const std::invalid_argument&) {
                continue; // list too short at this order
            }
            REQUIRE(a.l1_exact() == 1);
            const auto supp = a.support();
            REQUIRE(schreier::is_member(supp, n));
            // maximal initial segment: the next list element does not extend
            REQUIRE_FALSE(schreier::is_member(supp.with(supp.max() + 1), n));
            for (const auto& [i, c] : a.entries()) REQUIRE(c.rational_value() > 0);
        }
    }
}

TEST_CASE("max schreier weight against the subset oracle") {
    const auto a2 = averages::repeated_average(2, iota_from(2, 8));
    const auto m1 = averages::max_schreier_weight(a2, 1, 1);
    REQUIRE(m1.mass_p == Rational(1, 2));
    REQUIRE(brute_mass(a2, 1, 1) == Rational(1, 2));

    const auto e7 = Vec::basis(7);
    REQUIRE(averages::max_schreier_weight(e7, 2, 1).mass_p == 1);

    Vec half;
    for (std::int64_t i : {2, 3, 4, 5}) half.set(i, QScalar::from_rational(Rational(1, 2)));
    const auto m2 = averages::max_schreier_weight(half, 2, 1);
    REQUIRE(m2.mass_p == Rational(3, 4)); // {3,4,5}, squares 1/4 each
    REQUIRE(brute_mass(half, 2, 1) == Rational(3, 4));

    // randomized agreement, p in {1,2}, k in {1,2}
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> sz(1, 7), cf(1, 5), pos(2, 16);
    for (int t = 0; t < 200; ++t) {
        Vec x;
        const int s = sz(rng);
        while (x.support_size() < static_cast<std::size_t>(s))
            x.set(pos(rng), QScalar::from_rational(Rational(cf(rng), cf(rng))));
        for (int p : {1, 2})
            for (std::int64_t k : {1, 2}) {
                INFO("trial " << t << " p " << p << " k " << k);
                REQUIRE(averages::max_schreier_weight(x, p, k).mass_p == brute_mass(x, p, k));
            }
    }
}

TEST_CASE("bscc checks") {
    const auto a2 = averages::repeated_average(2, iota_from(2, 8));
    CHECK(averages::is_bscc(a2, 1, Rational(3, 5), 2).ok);
    CHECK_FALSE(averages::is_bscc(a2, 1, Rational(2, 5), 2).ok);
    CHECK(averages::is_bscc(Vec::basis(4), 2, Rational(1, 100), 0).ok);
    // single blocks are valid at order 1 (no interior levels to weigh)
    CHECK(averages::is_bscc(Vec::basis(4), 2, Rational(1, 100), 1).ok);
    CHECK_FALSE(averages::is_bscc(Vec::basis(4), 2, Rational(1, 100), 2).ok);
}

TEST_CASE("make_bscc") {
    // p = 1 reduces to the repeated average itself
    const auto b1 = averages::make_bscc(1, Rational(1), 1, iota_from(4, 8));
    REQUIRE(b1.x.l1_exact() == 1);
    // p = 2: entrywise square roots (3/6 = 1/2 < (4/5)^2)
    const auto b2 = averages::make_bscc(2, Rational(4, 5), 2, iota_from(6, 400));
    CHECK(averages::is_bscc(b2.x, 2, Rational(4, 5), 2).ok);
    for (const auto& [i, c] : b2.x.entries()) REQUIRE(c.sq > 0);
    CHECK_THROWS_AS(averages::make_bscc(2, Rational(2, 5), 2, iota_from(2, 200)),
                    std::invalid_argument);
}

TEST_CASE("make_scc") {
    std::vector<Vec> blocks = {Vec::basis(2), Vec::basis(3)};
    auto sb = averages::make_scc(blocks, Rational(2), 1);
    REQUIRE(sb.used_blocks == 2);
    REQUIRE(sb.witness.anchors == std::vector<std::int64_t>{2, 3});
    REQUIRE(sb.witness.anchors_maximal);
    REQUIRE(sb.coeffs[0].sq == Rational(1, 2));
    REQUIRE(sb.coeffs[1].sq == Rational(1, 2));

    auto single = averages::make_scc({Vec::basis(6)}, Rational(1, 10), 0);
    REQUIRE(single.used_blocks == 1);
    REQUIRE(single.coeffs[0].rational_value() == 1);

    CHECK_THROWS_AS(averages::make_scc({Vec::basis(5)}, Rational(2), 2), std::invalid_argument);
}

TEST_CASE("expbscc round trip") {
    // whenever the precondition 3/min L < eps^p holds, the built vector passes
    for (std::int64_t lo : {7, 9, 12}) {
        const Rational eps(2, 3);
        const auto got = averages::make_bscc(2, eps, 1, iota_from(lo, 60));
        CHECK(averages::is_bscc(got.x, 2, eps, 1).ok);
    }
}

TEST_CASE("average mass report") {
    const auto a2 = averages::repeated_average(2, iota_from(4, 70));
    const auto reps = averages::check_average_mass(a2, 4, 2);
    REQUIRE(reps.size() == 2);
    for (const auto& r : reps) CHECK(r.holds);
    // the S_1 portion of a_2^{4,...} is exactly 1/4 + small tail; in any case
    // strictly below 3/4
    CHECK(reps[1].max_mass < Rational(3, 4));
}
