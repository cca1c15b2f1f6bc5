#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "spacing/rhythm.hpp"  // draw_below
#include "spacing/semantics.hpp"

using namespace spacing;

namespace {

// assignment with value d at the given 1-based positions, 0 elsewhere
std::vector<Value> sparse(int n, Value d, const std::vector<int>& positions) {
    std::vector<Value> x(n, dummy_value);
    for (int q : positions)
        x[q - 1] = d;
    return x;
}

std::uint64_t count_supports_recursive(
    const std::vector<std::vector<Value>>& domains, const Checker& ok,
    std::vector<Value>& prefix) {
    if (prefix.size() == domains.size())
        return ok(prefix) ? 1 : 0;
    std::uint64_t total = 0;
    auto sorted = domains[prefix.size()];
    std::sort(sorted.begin(), sorted.end());
    for (Value v : sorted) {
        prefix.push_back(v);
        total += count_supports_recursive(domains, ok, prefix);
        prefix.pop_back();
    }
    return total;
}

}  // namespace

TEST_CASE("occ counts occurrences", "[semantics]") {
    std::vector<Value> x{1, 2, 1};
    REQUIRE(occ(1, x) == 2);
    REQUIRE(occ(3, std::vector<Value>{}) == 0);
    std::vector<Value> prefix{4, 1, 3, 2, 4};
    REQUIRE(occ(4, prefix) == 2);
}

TEST_CASE("occ is additive over concatenation", "[semantics][property]") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Value> a, b;
        for (int i = 0; i < draw_range(rng, 0, 8); ++i)
            a.push_back(draw_range(rng, 0, 3));
        for (int i = 0; i < draw_range(rng, 0, 8); ++i)
            b.push_back(draw_range(rng, 0, 3));
        std::vector<Value> ab = a;
        ab.insert(ab.end(), b.begin(), b.end());
        for (Value d = 0; d <= 3; ++d)
            REQUIRE(occ(d, ab) == occ(d, a) + occ(d, b));
    }
}

TEST_CASE("spacing accepts the radio playlist schedule", "[semantics]") {
    SpacingSpec spec({1}, {30, 30, 30}, {90, 90, 90}, 4, 360);
    REQUIRE(check_spacing(sparse(360, 1, {1, 40, 80, 120}), spec));
    // a gap of 19 violates the minimum distance
    REQUIRE_FALSE(check_spacing(sparse(360, 1, {1, 20, 80, 120}), spec));
    // absent values are unconstrained
    REQUIRE(check_spacing(sparse(360, 1, {}), spec));
    // fewer than k occurrences
    REQUIRE_FALSE(check_spacing(sparse(360, 1, {1, 40}), spec));
    // occurrences beyond the k-th are unconstrained
    REQUIRE(check_spacing(sparse(360, 1, {1, 40, 80, 120, 121}), spec));
}

TEST_CASE("forced variant requires every tracked value", "[semantics]") {
    SpacingSpec spec({1}, {1}, {5}, 2, 6);
    REQUIRE_FALSE(check_spacing_forced(sparse(6, 1, {}), spec));
    REQUIRE(check_spacing_forced(sparse(6, 1, {2, 4}), spec));
    REQUIRE(check_spacing(sparse(6, 1, {}), spec));
}

TEST_CASE("one-voice checker", "[semantics]") {
    // a=1 b=2 c=3, filler 4; period 5 repeated three times
    std::vector<Value> good{4, 1, 3, 2, 4, 4, 1, 3, 2, 4, 4, 1, 3, 2, 4};
    std::vector<Value> s{1, 2, 3};
    REQUIRE(check_spacing1(good, s, 5, 3));
    std::vector<Value> drifted = good;
    std::swap(drifted[8], drifted[9]);  // b moved inside period 2
    REQUIRE_FALSE(check_spacing1(drifted, s, 5, 3));
    REQUIRE(check_spacing1(good, std::vector<Value>{}, 5, 3));
    // extra occurrence past k*p
    std::vector<Value> extra = good;
    extra.push_back(1);
    REQUIRE_FALSE(check_spacing1(extra, s, 5, 3));
}

TEST_CASE("counting checker", "[semantics]") {
    REQUIRE(check_spacing_sb(sparse(10, 7, {1, 3, 6, 8}), 7, 2, 5, 2));
    REQUIRE_FALSE(check_spacing_sb(sparse(10, 7, {1, 3, 6, 9}), 7, 2, 5, 2));
    REQUIRE(check_spacing_sb(sparse(10, 7, {}), 7, 0, 5, 2));
}

TEST_CASE("multi-voice checker", "[semantics]") {
    std::vector<VoiceSpec> voices{{{1, 2}, 5, 4}, {{3, 4}, 7, 3}};
    // voice 1: a@1 b@3 each period of 5; voice 2: c@5 d@7 each period of 7
    std::vector<Value> x(21, dummy_value);
    for (int j = 0; j < 4; ++j) {
        x[0 + 5 * j] = 1;
        x[2 + 5 * j] = 2;
    }
    for (int j = 0; j < 3; ++j) {
        x[4 + 7 * j] = 3;
        x[6 + 7 * j] = 4;
    }
    REQUIRE(check_spacing_h(x, voices));
    std::vector<Value> bad = x;
    bad[4] = dummy_value;  // voice 2 loses an occurrence
    REQUIRE_FALSE(check_spacing_h(bad, voices));
    std::vector<VoiceSpec> overlapping{{{1, 2}, 5, 4}, {{2, 3}, 7, 3}};
    REQUIRE_THROWS_AS(check_spacing_h(x, overlapping), std::invalid_argument);
}

TEST_CASE("enumerate_supports basics", "[semantics]") {
    auto nothing = [](std::span<const Value>) { return false; };
    REQUIRE(enumerate_supports({{1, 2}, {1}}, nothing).empty());

    auto all = [](std::span<const Value>) { return true; };
    auto sup = enumerate_supports({{2, 1}, {3}}, all);
    REQUIRE(sup == std::vector<std::vector<Value>>{{1, 3}, {2, 3}});

    std::vector<std::vector<Value>> big(30, {1, 2, 3});
    REQUIRE_THROWS_AS(enumerate_supports(big, all), OversizeError);
}

TEST_CASE("enumeration count agrees with independent recursion",
          "[semantics][property]") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        int n = draw_range(rng, 1, 6);
        std::vector<std::vector<Value>> doms(n);
        for (auto& d : doms) {
            for (Value v = 1; v <= 3; ++v)
                if (draw_below(rng, 2))
                    d.push_back(v);
            if (d.empty())
                d.push_back(1);
        }
        Value needle = draw_range(rng, 1, 3);
        Checker ok = [needle](std::span<const Value> x) {
            return occ(needle, x) % 2 == 0;
        };
        std::vector<Value> prefix;
        REQUIRE(enumerate_supports(doms, ok).size() ==
                count_supports_recursive(doms, ok, prefix));
    }
}

TEST_CASE("dc oracle basics", "[semantics]") {
    auto all = [](std::span<const Value>) { return true; };
    std::vector<std::vector<Value>> doms{{1, 2}, {2, 3}};
    DcResult r = dc_oracle(doms, all);
    REQUIRE_FALSE(r.failed);
    REQUIRE(r.domains == doms);

    auto nothing = [](std::span<const Value>) { return false; };
    REQUIRE(dc_oracle(doms, nothing).failed);
}

TEST_CASE("dc oracle is idempotent and monotone", "[semantics][property]") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        int n = draw_range(rng, 1, 5);
        std::vector<std::vector<Value>> doms(n);
        for (auto& d : doms) {
            for (Value v = 1; v <= 3; ++v)
                if (draw_below(rng, 100) < 70)
                    d.push_back(v);
            if (d.empty())
                d.push_back(draw_range(rng, 1, 3));
        }
        Value needle = draw_range(rng, 1, 3);
        Checker ok = [&, needle](std::span<const Value> x) {
            return occ(needle, x) <= 2;
        };
        DcResult once = dc_oracle(doms, ok);
        if (once.failed)
            continue;
        DcResult twice = dc_oracle(once.domains, ok);
        REQUIRE_FALSE(twice.failed);
        REQUIRE(twice.domains == once.domains);

        // monotonicity: shrinking the input never grows the output
        auto smaller = doms;
        int var = draw_range(rng, 0, n - 1);
        if (smaller[var].size() > 1)
            smaller[var].erase(smaller[var].begin());
        DcResult shrunk = dc_oracle(smaller, ok);
        if (!shrunk.failed)
            for (int i = 0; i < n; ++i)
                for (Value v : shrunk.domains[i])
                    REQUIRE(std::find(once.domains[i].begin(),
                                      once.domains[i].end(),
                                      v) != once.domains[i].end());
    }
}

TEST_CASE("one-voice implies the general constraint with constant gaps",
          "[semantics][property]") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 200; ++trial) {
        int p = draw_range(rng, 1, 3);
        int k = draw_range(rng, 1, 3);
        int n = draw_range(rng, p * k, 10);
        std::vector<Value> x(n);
        for (auto& v : x)
            v = draw_range(rng, 0, 3);
        std::vector<Value> s;
        for (Value d = 1; d <= 2; ++d)
            if (draw_below(rng, 2))
                s.push_back(d);
        if (!check_spacing1(x, s, p, k))
            continue;
        SpacingSpec general(s, std::vector<int>(k - 1, p),
                            std::vector<int>(k - 1, p), k, n);
        REQUIRE(check_spacing(x, general));
        for (Value d : s)
            REQUIRE(occ(d, x) == k);
    }
}
