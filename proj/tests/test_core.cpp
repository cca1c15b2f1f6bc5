#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "spacing/alldifferent.hpp"
#include "spacing/rhythm.hpp"  // draw_below
#include "spacing/search.hpp"
#include "spacing/semantics.hpp"

using namespace spacing;

TEST_CASE("domain construction", "[core]") {
    Domain d(std::vector<Value>{1, 2, 3}, 8);
    REQUIRE(d.size() == 3);
    REQUIRE(d.contains(2));
    REQUIRE_FALSE(d.contains(4));
    REQUIRE_THROWS_AS(Domain(std::vector<Value>{}, 8), std::invalid_argument);
    Domain dummy_only(std::vector<Value>{0}, 4);
    REQUIRE(dummy_only.is_singleton());
    REQUIRE(dummy_only.sole_value() == dummy_value);
}

TEST_CASE("remove and assign events", "[core]") {
    VariableStore store({{1, 2}, {1, 2, 3}});
    SECTION("remove present value") {
        REQUIRE(store.remove(0, 2) == ChangeEvent::changed);
        REQUIRE(store.domain(0).values() == std::vector<Value>{1});
    }
    SECTION("remove absent value") {
        REQUIRE(store.remove(0, 3) == ChangeEvent::no_change);
    }
    SECTION("removing the last value is refused") {
        REQUIRE(store.remove(0, 2) == ChangeEvent::changed);
        REQUIRE(store.remove(0, 1) == ChangeEvent::would_empty);
        REQUIRE(store.domain(0).size() == 1);
    }
    SECTION("assign") {
        REQUIRE(store.assign(1, 2) == ChangeEvent::changed);
        REQUIRE(store.domain(1).values() == std::vector<Value>{2});
        REQUIRE(store.assign(1, 2) == ChangeEvent::no_change);
        REQUIRE(store.assign(1, 3) == ChangeEvent::would_empty);
    }
}

TEST_CASE("checkpoint and rollback", "[core]") {
    VariableStore store({{1, 2, 3}, {1, 2}});
    auto before = store.snapshot();

    auto mark = store.checkpoint();
    SECTION("mutations are undone") {
        store.remove(0, 2);
        store.assign(1, 1);
        store.rollback(mark);
        REQUIRE(store.snapshot() == before);
    }
    SECTION("identity rollback") {
        store.rollback(mark);
        REQUIRE(store.snapshot() == before);
    }
    SECTION("nested marks restore in LIFO order") {
        store.remove(0, 1);
        auto inner = store.checkpoint();
        store.remove(0, 2);
        store.rollback(inner);
        REQUIRE(store.domain(0).values() == std::vector<Value>{2, 3});
        store.rollback(mark);
        REQUIRE(store.snapshot() == before);
    }
    SECTION("rollback past a consumed mark") {
        auto inner = store.checkpoint();
        store.rollback(mark);  // consumes inner as well
        REQUIRE_THROWS_AS(store.rollback(inner), std::logic_error);
    }
}

TEST_CASE("trail round-trip on random mutation sequences", "[core][property]") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        int n = draw_range(rng, 1, 6);
        std::vector<std::vector<Value>> doms(n);
        for (auto& d : doms)
            for (Value v = 0; v < 5; ++v)
                if (draw_below(rng, 2))
                    d.push_back(v);
        for (auto& d : doms)
            if (d.empty())
                d.push_back(draw_range(rng, 0, 4));
        VariableStore store(doms);

        std::vector<std::pair<VariableStore::Mark,
                              std::vector<std::vector<Value>>>> stack;
        for (int step = 0; step < 40; ++step) {
            int action = draw_range(rng, 0, 3);
            if (action == 0) {
                stack.emplace_back(store.checkpoint(), store.snapshot());
            } else if (action == 1 && !stack.empty()) {
                store.rollback(stack.back().first);
                REQUIRE(store.snapshot() == stack.back().second);
                stack.pop_back();
            } else if (action == 2) {
                store.remove(draw_range(rng, 0, n - 1), draw_range(rng, 0, 4));
            } else {
                store.assign(draw_range(rng, 0, n - 1), draw_range(rng, 0, 4));
            }
        }
        while (!stack.empty()) {
            store.rollback(stack.back().first);
            REQUIRE(store.snapshot() == stack.back().second);
            stack.pop_back();
        }
    }
}

TEST_CASE("fixpoint with no propagators", "[core]") {
    VariableStore store({{1, 2}, {2, 3}});
    auto before = store.snapshot();
    REQUIRE(propagate_fixpoint(store, {}) == PropStatus::consistent);
    REQUIRE(store.snapshot() == before);
}

TEST_CASE("fixpoint with a single disequality", "[core]") {
    VariableStore store({{1}, {1, 2}});
    NeqOffsetPropagator neq(0, 0, 1, 0);
    std::vector<Propagator*> props{&neq};
    REQUIRE(propagate_fixpoint(store, props) == PropStatus::consistent);
    REQUIRE(store.domain(1).values() == std::vector<Value>{2});
}

TEST_CASE("fixpoint stability", "[core][property]") {
    VariableStore store({{1, 2, 3}, {1, 2, 3}, {1, 2}});
    AllDifferentPropagator alldiff({0, 1, 2});
    NeqOffsetPropagator neq(0, 1, 1, 0);
    std::vector<Propagator*> props{&alldiff, &neq};
    REQUIRE(propagate_fixpoint(store, props) == PropStatus::consistent);
    auto once = store.snapshot();
    REQUIRE(propagate_fixpoint(store, props) == PropStatus::consistent);
    REQUIRE(store.snapshot() == once);
}

TEST_CASE("search enumerates exhaustively", "[core]") {
    VariableStore store({{1, 2}, {1, 2}});
    NeqOffsetPropagator neq(0, 0, 1, 0);
    std::vector<Propagator*> props{&neq};
    SearchOutcome out = search(store, props);
    REQUIRE(out.solution_count == 2);
    REQUIRE(out.solutions[0] == std::vector<Value>{1, 2});
    REQUIRE(out.solutions[1] == std::vector<Value>{2, 1});
    REQUIRE(out.backtracks <= out.nodes);
}

TEST_CASE("search vs brute force on random binary instances",
          "[core][property]") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        int n = draw_range(rng, 2, 5);
        std::vector<std::vector<Value>> doms(n);
        for (auto& d : doms) {
            for (Value v = 1; v <= 4; ++v)
                if (draw_below(rng, 100) < 60)
                    d.push_back(v);
            if (d.empty())
                d.push_back(draw_range(rng, 1, 4));
        }
        std::vector<std::unique_ptr<NeqOffsetPropagator>> neqs;
        std::vector<std::pair<int, int>> pairs;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (draw_below(rng, 2)) {
                    neqs.push_back(std::make_unique<NeqOffsetPropagator>(a, 0, b, 0));
                    pairs.emplace_back(a, b);
                }
        std::vector<Propagator*> props;
        for (auto& p : neqs)
            props.push_back(p.get());

        VariableStore store(doms);
        SearchOutcome out = search(store, props);

        auto expected = enumerate_supports(doms, [&](std::span<const Value> x) {
            for (auto [a, b] : pairs)
                if (x[a] == x[b])
                    return false;
            return true;
        });
        REQUIRE(out.solution_count == expected.size());
        // depth-first with lexicographic value order visits supports in
        // lexicographic order
        SearchOptions lex;
        lex.var_rule = VarHeuristic::lexicographic;
        lex.value_rule = ValueOrder::ascending;
        VariableStore store2(doms);
        SearchOutcome out2 = search(store2, props, lex);
        REQUIRE(out2.solutions == expected);
    }
}

TEST_CASE("adding a sound propagator never increases backtracks",
          "[core][property]") {
    // fixed lexicographic orders; the stronger propagator set explores a
    // subset of the weaker set's assignment regions
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 40; ++trial) {
        int n = draw_range(rng, 3, 5);
        std::vector<std::vector<Value>> doms(n);
        for (auto& d : doms) {
            for (Value v = 1; v <= 3; ++v)
                if (draw_below(rng, 100) < 70)
                    d.push_back(v);
            if (d.empty())
                d.push_back(draw_range(rng, 1, 3));
        }
        std::vector<std::unique_ptr<NeqOffsetPropagator>> neqs;
        std::vector<std::pair<int, int>> pairs;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (draw_below(rng, 2)) {
                    neqs.push_back(
                        std::make_unique<NeqOffsetPropagator>(a, 0, b, 0));
                    pairs.emplace_back(a, b);
                }
        if (neqs.empty())
            continue;
        std::vector<Propagator*> base;
        for (auto& p : neqs)
            base.push_back(p.get());
        // an AllDifferent over one constrained pair restates that pair's
        // disequality, so adding it is sound for the same model
        auto [a, b] = pairs[draw_below(rng, pairs.size())];
        AllDifferentPropagator redundant(std::vector<VarId>{a, b});
        std::vector<Propagator*> reinforced = base;
        reinforced.push_back(&redundant);

        SearchOptions lex;
        lex.var_rule = VarHeuristic::lexicographic;
        lex.value_rule = ValueOrder::ascending;
        lex.record_solutions = false;

        VariableStore s1(doms), s2(doms);
        SearchOutcome base_out = search(s1, base, lex);
        SearchOutcome reinforced_out = search(s2, reinforced, lex);
        REQUIRE(reinforced_out.solution_count == base_out.solution_count);
        REQUIRE(reinforced_out.backtracks <= base_out.backtracks);
    }
}

TEST_CASE("search timeout sets the flag", "[core]") {
    // 12 queens by pure disequalities, enumerating everything: plenty of
    // work to outlast a zero-ish budget
    const int n = 12;
    std::vector<std::vector<Value>> doms(n);
    for (auto& d : doms)
        for (Value v = 1; v <= n; ++v)
            d.push_back(v);
    std::vector<std::unique_ptr<NeqOffsetPropagator>> neqs;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            neqs.push_back(std::make_unique<NeqOffsetPropagator>(a, 0, b, 0));
            neqs.push_back(std::make_unique<NeqOffsetPropagator>(a, a, b, b));
            neqs.push_back(std::make_unique<NeqOffsetPropagator>(a, -a, b, -b));
        }
    std::vector<Propagator*> props;
    for (auto& p : neqs)
        props.push_back(p.get());
    VariableStore store(doms);
    SearchOptions opts;
    opts.timeout_seconds = 0.05;
    opts.record_solutions = false;
    SearchOutcome out = search(store, props, opts);
    REQUIRE(out.timed_out);
}

TEST_CASE("alldifferent pigeonhole fails", "[core][alldifferent]") {
    VariableStore store({{1, 2}, {1, 2}, {1, 2}});
    AllDifferentPropagator prop({0, 1, 2});
    std::vector<Propagator*> props{&prop};
    REQUIRE(propagate_fixpoint(store, props) == PropStatus::failed);
}

TEST_CASE("alldifferent singleton forces the other variable", "[core]") {
    VariableStore store({{1}, {1, 2}});
    AllDifferentPropagator prop({0, 1});
    std::vector<Propagator*> props{&prop};
    REQUIRE(propagate_fixpoint(store, props) == PropStatus::consistent);
    REQUIRE(store.domain(1).values() == std::vector<Value>{2});
}

TEST_CASE("alldifferent equals the brute-force oracle", "[core][oracle]") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 300; ++trial) {
        int n = draw_range(rng, 2, 5);
        std::vector<std::vector<Value>> doms(n);
        for (auto& d : doms) {
            for (Value v = 1; v <= 5; ++v)
                if (draw_below(rng, 100) < 55)
                    d.push_back(v);
            if (d.empty())
                d.push_back(draw_range(rng, 1, 5));
        }
        DcResult expect = dc_oracle(doms, [&](std::span<const Value> x) {
            for (std::size_t i = 0; i < x.size(); ++i)
                for (std::size_t j = i + 1; j < x.size(); ++j)
                    if (x[i] == x[j])
                        return false;
            return true;
        });
        VariableStore store(doms);
        std::vector<VarId> vars(n);
        for (int i = 0; i < n; ++i)
            vars[i] = i;
        AllDifferentPropagator prop(vars);
        std::vector<Propagator*> props{&prop};
        bool failed = propagate_fixpoint(store, props) == PropStatus::failed;
        REQUIRE(failed == expect.failed);
        if (!failed)
            for (int i = 0; i < n; ++i)
                REQUIRE(store.domain(i).values() == expect.domains[i]);
    }
}

TEST_CASE("disequality honours its offsets", "[core]") {
    // x + 0 != y + 2 with x = 3 rules 1 out of y
    VariableStore store({{3}, {1, 5}});
    NeqOffsetPropagator prop(0, 0, 1, 2);
    std::vector<Propagator*> props{&prop};
    REQUIRE(propagate_fixpoint(store, props) == PropStatus::consistent);
    REQUIRE(store.domain(1).values() == std::vector<Value>{5});

    // both sides open: no filtering
    VariableStore store2({{1, 3}, {1, 5}});
    NeqOffsetPropagator prop2(0, 0, 1, 2);
    std::vector<Propagator*> props2{&prop2};
    REQUIRE(propagate_fixpoint(store2, props2) == PropStatus::consistent);
    REQUIRE(store2.domain(0).values() == std::vector<Value>{1, 3});
    REQUIRE(store2.domain(1).values() == std::vector<Value>{1, 5});

    // violated fixed pair
    VariableStore store3({{3}, {1}});
    NeqOffsetPropagator prop3(0, 0, 1, 2);
    std::vector<Propagator*> props3{&prop3};
    REQUIRE(propagate_fixpoint(store3, props3) == PropStatus::failed);
}
