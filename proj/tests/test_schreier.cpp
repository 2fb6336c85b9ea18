#include "mtn/schreier.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>

using namespace mtn;

namespace {

// Naive membership straight from the recursive definition: split into
// successive chunks, each a member one level down, chunk minima in S_1.
bool naive_member(const std::vector<std::int64_t>& F, std::int64_t n,
                  std::map<std::pair<std::vector<std::int64_t>, std::int64_t>, bool>& memo) {
    if (F.size() <= 1) return true;
    if (n == 0) return false;
    if (n == 1) return static_cast<std::int64_t>(F.size()) <= F.front();
    const auto key = std::make_pair(F, n);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    // chunkings: first block is a prefix, rest recursively
    std::function<bool(std::size_t, std::vector<std::int64_t>&)> split =
        [&](std::size_t from, std::vector<std::int64_t>& mins) -> bool {
        if (from == F.size()) {
            if (static_cast<std::int64_t>(mins.size()) <= mins.front()) return true;
            return false;
        }
        for (std::size_t to = from + 1; to <= F.size(); ++to) {
            std::vector<std::int64_t> chunk(F.begin() + from, F.begin() + to);
            if (!naive_member(chunk, n - 1, memo)) continue;
            mins.push_back(F[from]);
            if (split(to, mins)) {
                mins.pop_back();
                return true;
            }
            mins.pop_back();
        }
        return false;
    };
    std::vector<std::int64_t> mins;
    const bool ok = split(0, mins);
    memo.emplace(key, ok);
    return ok;
}

bool naive_member(const FiniteSet& F, std::int64_t n) {
    std::map<std::pair<std::vector<std::int64_t>, std::int64_t>, bool> memo;
    return naive_member(F.elems, n, memo);
}

FiniteSet from_mask(std::uint32_t mask, int bits) {
    std::vector<std::int64_t> v;
    for (int i = 0; i < bits; ++i)
        if (mask & (1u << i)) v.push_back(i + 1);
    return FiniteSet(std::move(v));
}

} // namespace

TEST_CASE("membership basics") {
    CHECK(schreier::is_member(FiniteSet{1}, 1));
    CHECK_FALSE(schreier::is_member(FiniteSet{1, 2}, 2));
    CHECK(schreier::is_member(FiniteSet{2, 3, 4, 5}, 2));
    CHECK_FALSE(schreier::is_member(FiniteSet{3, 4, 5, 6}, 1));
    CHECK(schreier::is_member(FiniteSet{}, 0));
    CHECK(schreier::is_member(FiniteSet{9}, 0));
    // verified against the naive oracle as well
    CHECK_FALSE(naive_member(FiniteSet{1, 2}, 2));
    CHECK(naive_member(FiniteSet{2, 3, 4, 5}, 2));
}

TEST_CASE("membership stabilizes above the set size") {
    const FiniteSet F{2, 5, 9, 11};
    CHECK(schreier::is_member(F, 1000000));
    CHECK(schreier::is_member(F, 1000000, schreier::Variant::modified));
    CHECK_FALSE(schreier::is_member(FiniteSet{1, 2}, 1000000));
    CHECK_FALSE(schreier::is_member(FiniteSet{1, 2}, 1000000, schreier::Variant::modified));
}

TEST_CASE("greedy agrees with the naive decomposition oracle") {
    for (std::uint32_t mask = 0; mask < (1u << 10); ++mask) {
        const auto F = from_mask(mask, 10);
        for (std::int64_t n = 0; n <= 3; ++n) {
            INFO("F = " << F.str() << ", n = " << n);
            REQUIRE(schreier::is_member(F, n) == naive_member(F, n));
        }
    }
}

TEST_CASE("standard equals modified on a small universe") {
    for (std::uint32_t mask = 0; mask < (1u << 10); ++mask) {
        const auto F = from_mask(mask, 10);
        for (std::int64_t n = 0; n <= 3; ++n) {
            INFO("F = " << F.str() << ", n = " << n);
            REQUIRE(schreier::is_member(F, n) ==
                    schreier::is_member(F, n, schreier::Variant::modified));
        }
    }
}

TEST_CASE("hereditary on subsets") {
    for (std::uint32_t mask = 0; mask < (1u << 10); ++mask) {
        const auto F = from_mask(mask, 10);
        for (std::int64_t n = 0; n <= 3; ++n) {
            if (!schreier::is_member(F, n)) continue;
            // drop one element at a time
            for (std::size_t i = 0; i < F.size(); ++i) {
                auto v = F.elems;
                v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
                REQUIRE(schreier::is_member(FiniteSet(v), n));
            }
        }
    }
}

TEST_CASE("spreading on randomized spreads") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> bump(0, 2);
    for (int t = 0; t < 4000; ++t) {
        std::uniform_int_distribution<std::uint32_t> md(0, (1u << 10) - 1);
        const auto F = from_mask(md(rng), 10);
        if (F.empty()) continue;
        std::vector<std::int64_t> g;
        std::int64_t prev = 0;
        for (auto v : F.elems) {
            const auto nv = std::max(prev + 1, v + bump(rng));
            g.push_back(std::min<std::int64_t>(nv, 14));
            prev = g.back();
        }
        bool strict = true;
        for (std::size_t i = 0; i + 1 < g.size(); ++i) strict = strict && g[i] < g[i + 1];
        bool dominates = true;
        for (std::size_t i = 0; i < g.size(); ++i) dominates = dominates && g[i] >= F.elems[i];
        if (!strict || !dominates) continue;
        const FiniteSet G(g);
        for (std::int64_t n = 0; n <= 3; ++n)
            if (schreier::is_member(F, n)) {
                INFO("F = " << F.str() << " G = " << G.str() << " n = " << n);
                REQUIRE(schreier::is_member(G, n));
            }
    }
}

TEST_CASE("maximality") {
    CHECK(schreier::is_maximal(FiniteSet{2, 3}, 1));
    CHECK_FALSE(schreier::is_maximal(FiniteSet{3, 4}, 1));
    CHECK(schreier::is_maximal(FiniteSet{1}, 2));
    CHECK_THROWS_AS(schreier::is_maximal(FiniteSet{1, 2}, 1), std::invalid_argument);
    // exhaustive probe agreement on small extensions
    for (std::int64_t m = 2; m <= 20; ++m)
        CHECK_FALSE(schreier::is_member(FiniteSet{1}.with(m), 2));
}

TEST_CASE("family checks") {
    SetFamily fam;
    fam.mode = FamilyMode::allowable;
    fam.members = {FiniteSet{2, 5}, FiniteSet{3, 6}};
    CHECK(schreier::check_family(fam, 1).ok);
    fam.mode = FamilyMode::admissible;
    const auto v = schreier::check_family(fam, 1);
    CHECK_FALSE(v.ok);
    CHECK(v.violation.find("successive") != std::string::npos);
    SetFamily fam2;
    fam2.mode = FamilyMode::allowable;
    fam2.members = {FiniteSet{1}, FiniteSet{2}, FiniteSet{3}};
    CHECK_FALSE(schreier::check_family(fam2, 1).ok);
}

TEST_CASE("enumeration") {
    const auto s1 = schreier::enumerate(1, 3);
    std::vector<FiniteSet> expect = {FiniteSet{}, FiniteSet{1}, FiniteSet{2}, FiniteSet{3},
                                     FiniteSet{2, 3}};
    REQUIRE(s1 == expect);
    const auto s0 = schreier::enumerate(0, 2);
    REQUIRE(s0 == std::vector<FiniteSet>{FiniteSet{}, FiniteSet{1}, FiniteSet{2}});
    const auto s2 = schreier::enumerate(2, 2);
    REQUIRE(s2 == std::vector<FiniteSet>{FiniteSet{}, FiniteSet{1}, FiniteSet{2}});
    CHECK_THROWS_AS(schreier::enumerate(1, 20), std::invalid_argument);
}

TEST_CASE("convolutions") {
    CHECK(schreier::convolution_member(FiniteSet{2, 3, 4, 5}, 1, 1, false));
    CHECK(schreier::convolution_member(FiniteSet{}, 2, 1, false));
    CHECK(schreier::convolution_member(FiniteSet{}, 2, 1, true));
    for (std::uint32_t mask = 0; mask < (1u << 10); ++mask) {
        const auto F = from_mask(mask, 10);
        for (std::int64_t k = 0; k <= 2; ++k)
            for (std::int64_t l = 0; k + l <= 3 && l <= 2; ++l) {
                INFO("F = " << F.str() << " k = " << k << " l = " << l);
                REQUIRE(schreier::is_member(F, k + l) ==
                        schreier::convolution_member(F, k, l, false));
            }
    }
}
