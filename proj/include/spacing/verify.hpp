#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spacing/bounded.hpp"
#include "spacing/cnf.hpp"
#include "spacing/intervoice.hpp"
#include "spacing/reductions.hpp"
#include "spacing/rhythm.hpp"
#include "spacing/semantics.hpp"
#include "spacing/spacing1.hpp"
#include "spacing/spacing_sb.hpp"

namespace spacing {

/// Result of one propagator-vs-oracle suite.
struct CheckReport {
    std::string suite;
    std::uint64_t trials = 0;
    std::uint64_t failures = 0;
    std::string first_counterexample;

    bool ok() const { return failures == 0; }

    void fail(const std::string& what) {
        ++failures;
        if (first_counterexample.empty())
            first_counterexample = what;
    }
};

namespace detail {

inline std::string show_domains(const std::vector<std::vector<Value>>& doms) {
    std::ostringstream os;
    for (std::size_t i = 0; i < doms.size(); ++i) {
        os << (i ? " " : "") << "x" << i + 1 << "={";
        for (std::size_t j = 0; j < doms[i].size(); ++j)
            os << (j ? "," : "") << doms[i][j];
        os << "}";
    }
    return os.str();
}

inline std::vector<std::vector<Value>> random_domains(std::mt19937_64& rng,
                                                      int n, int universe,
                                                      std::uint64_t max_product) {
    while (true) {
        std::vector<std::vector<Value>> doms(n);
        for (auto& d : doms) {
            for (Value v = 1; v <= universe; ++v)
                if (draw_below(rng, 100) < 55)
                    d.push_back(v);
            if (d.empty())
                d.push_back(1 + static_cast<Value>(draw_below(rng, universe)));
        }
        if (domain_product(doms) <= max_product)
            return doms;
    }
}

inline std::vector<Value> random_subset(std::mt19937_64& rng, int universe,
                                        int size) {
    std::vector<Value> pool(universe);
    for (int i = 0; i < universe; ++i)
        pool[i] = i + 1;
    for (int i = 0; i < size; ++i) {
        std::size_t j = i + draw_below(rng, pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(size);
    std::sort(pool.begin(), pool.end());
    return pool;
}

inline bool same_domains(const VariableStore& store,
                         const std::vector<std::vector<Value>>& expect) {
    if (store.num_vars() != static_cast<int>(expect.size()))
        return false;
    for (int i = 0; i < store.num_vars(); ++i)
        if (store.domain(i).values() != expect[i])
            return false;
    return true;
}

}  // namespace detail

/// Random one-voice instances: the filtering fixpoint must match the
/// brute-force domain-consistency oracle bit for bit.
inline CheckReport check_spacing1_suite(std::uint64_t trials,
                                        std::uint64_t seed) {
    CheckReport report;
    report.suite = "spacing1";
    std::mt19937_64 rng(seed);
    for (std::uint64_t t = 0; t < trials; ++t) {
        ++report.trials;
        int p = draw_range(rng, 1, 4);
        int k = draw_range(rng, 1, 3);
        int n = draw_range(rng, p * k, 12);
        int universe = draw_range(rng, 2, 5);
        int ns = static_cast<int>(draw_below(rng, std::min(p, universe) + 1));
        std::vector<Value> s = detail::random_subset(rng, universe, ns);
        auto doms = detail::random_domains(rng, n, universe, 30'000);

        DcResult expect = dc_oracle(doms, [&](std::span<const Value> x) {
            return check_spacing1(x, s, p, k);
        });
        VariableStore store(doms);
        Spacing1Propagator prop(Spacing1Spec(s, p, k, n));
        std::vector<Propagator*> props{&prop};
        bool failed = propagate_fixpoint(store, props) == PropStatus::failed;

        bool agree = failed == expect.failed &&
                     (failed || detail::same_domains(store, expect.domains));
        if (!agree) {
            std::ostringstream os;
            os << "spacing1 p=" << p << " k=" << k << " n=" << n << " s={";
            for (Value d : s)
                os << d << ",";
            os << "} " << detail::show_domains(doms);
            report.fail(os.str());
        }
    }
    return report;
}

/// Random counting instances against check_spacing_sb.
inline CheckReport check_sb_suite(std::uint64_t trials, std::uint64_t seed) {
    CheckReport report;
    report.suite = "sb";
    std::mt19937_64 rng(seed);
    for (std::uint64_t t = 0; t < trials; ++t) {
        ++report.trials;
        int p = draw_range(rng, 1, 4);
        int k = draw_range(rng, 1, 3);
        int n = draw_range(rng, p * k, 12);
        int universe = draw_range(rng, 2, 5);
        Value d = draw_range(rng, 1, universe);
        int m = static_cast<int>(draw_below(rng, p + 1));
        auto doms = detail::random_domains(rng, n, universe, 30'000);

        DcResult expect = dc_oracle(doms, [&](std::span<const Value> x) {
            return check_spacing_sb(x, d, m, p, k);
        });
        VariableStore store(doms);
        SpacingSbPropagator prop(SbSpec(d, m, p, k, n));
        std::vector<Propagator*> props{&prop};
        bool failed = propagate_fixpoint(store, props) == PropStatus::failed;

        bool agree = failed == expect.failed &&
                     (failed || detail::same_domains(store, expect.domains));
        if (!agree) {
            std::ostringstream os;
            os << "sb d=" << d << " m=" << m << " p=" << p << " k=" << k
               << " n=" << n << " " << detail::show_domains(doms);
            report.fail(os.str());
        }
    }
    return report;
}

/// Random bounded-size instances against check_spacing.
inline CheckReport check_bounded_suite(std::uint64_t trials,
                                       std::uint64_t seed) {
    CheckReport report;
    report.suite = "bounded";
    std::mt19937_64 rng(seed);
    for (std::uint64_t t = 0; t < trials; ++t) {
        ++report.trials;
        int n = draw_range(rng, 1, 8);
        int k = draw_range(rng, 1, 3);
        int universe = draw_range(rng, 2, 4);
        int ns = draw_range(rng, 1, std::min(2, universe));
        std::vector<Value> s = detail::random_subset(rng, universe, ns);
        std::vector<int> a(k - 1), b(k - 1);
        for (int i = 0; i + 1 < k; ++i) {
            a[i] = draw_range(rng, 1, n);
            b[i] = draw_range(rng, a[i], n);
        }
        auto doms = detail::random_domains(rng, n, universe, 100'000);
        SpacingSpec spec(s, a, b, k, n);

        DcResult expect = dc_oracle(doms, [&](std::span<const Value> x) {
            return check_spacing(x, spec);
        });
        VariableStore store(doms);
        BoundedSpacingPropagator prop(spec);
        std::vector<Propagator*> props{&prop};
        bool failed = propagate_fixpoint(store, props) == PropStatus::failed;

        bool agree = failed == expect.failed &&
                     (failed || detail::same_domains(store, expect.domains));
        if (!agree) {
            std::ostringstream os;
            os << "bounded n=" << n << " k=" << k << " s={";
            for (Value d : s)
                os << d << ",";
            os << "} a/b=";
            for (int i = 0; i + 1 < k; ++i)
                os << "[" << a[i] << "," << b[i] << "]";
            os << " " << detail::show_domains(doms);
            report.fail(os.str());
        }
    }
    return report;
}

// ---- two-voice support oracle ---------------------------------------------

/// Per-position supported values of a conjunction of two one-voice
/// constraints, by direct enumeration of pattern placements. Independent
/// of the propagators. nullopt when the conjunction has no support.
inline std::optional<std::vector<std::vector<Value>>> two_voice_support_table(
    const std::vector<std::vector<Value>>& domains, const VoiceSpec& v1,
    const VoiceSpec& v2) {
    const int n = static_cast<int>(domains.size());
    if (n > 32)
        throw std::invalid_argument("two_voice_support_table: n too large");

    auto contains = [&](int pos, Value d) {  // pos 1-based
        const auto& dom = domains[pos - 1];
        return std::find(dom.begin(), dom.end(), d) != dom.end();
    };
    auto is_onset = [&](Value d) {
        return std::find(v1.tracked.begin(), v1.tracked.end(), d) !=
                   v1.tracked.end() ||
               std::find(v2.tracked.begin(), v2.tracked.end(), d) !=
                   v2.tracked.end();
    };

    // positions that must be covered by a pattern (no non-onset value)
    std::uint32_t must_cover = 0;
    for (int pos = 1; pos <= n; ++pos) {
        bool has_free = false;
        for (Value d : domains[pos - 1])
            if (!is_onset(d))
                has_free = true;
        if (!has_free)
            must_cover |= std::uint32_t{1} << (pos - 1);
    }

    struct Placement {
        std::vector<int> place;  // class per tracked value, 1-based
        std::uint32_t beats = 0;
    };
    auto enumerate = [&](const VoiceSpec& voice) {
        std::vector<Placement> out;
        const int m = static_cast<int>(voice.tracked.size());
        std::vector<int> place(m);
        std::vector<char> used(voice.period + 1, 0);
        auto rec = [&](auto&& self, int idx) -> void {
            if (idx == m) {
                Placement pl;
                pl.place = place;
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < voice.repeats; ++j)
                        pl.beats |= std::uint32_t{1}
                                    << (place[i] + j * voice.period - 1);
                out.push_back(std::move(pl));
                return;
            }
            Value d = voice.tracked[idx];
            for (int cls = 1; cls <= voice.period; ++cls) {
                if (used[cls])
                    continue;
                bool ok = true;
                for (int j = 0; j < voice.repeats && ok; ++j)
                    ok = contains(cls + j * voice.period, d);
                if (!ok)
                    continue;
                used[cls] = 1;
                place[idx] = cls;
                self(self, idx + 1);
                used[cls] = 0;
            }
        };
        rec(rec, 0);
        return out;
    };

    std::vector<Placement> all1 = enumerate(v1);
    std::vector<Placement> all2 = enumerate(v2);

    std::vector<char> used1(all1.size(), 0), used2(all2.size(), 0);
    std::uint32_t ever_free = 0;
    bool any = false;
    for (std::size_t i = 0; i < all1.size(); ++i) {
        for (std::size_t j = 0; j < all2.size(); ++j) {
            if (all1[i].beats & all2[j].beats)
                continue;
            std::uint32_t covered = all1[i].beats | all2[j].beats;
            if (must_cover & ~covered)
                continue;
            any = true;
            used1[i] = 1;
            used2[j] = 1;
            ever_free |= ~covered;
        }
    }
    if (!any)
        return std::nullopt;

    std::vector<std::set<Value>> supported(n);
    auto credit = [&](const VoiceSpec& voice, const Placement& pl) {
        for (std::size_t i = 0; i < voice.tracked.size(); ++i)
            for (int j = 0; j < voice.repeats; ++j)
                supported[pl.place[i] + j * voice.period - 1].insert(
                    voice.tracked[i]);
    };
    for (std::size_t i = 0; i < all1.size(); ++i)
        if (used1[i])
            credit(v1, all1[i]);
    for (std::size_t j = 0; j < all2.size(); ++j)
        if (used2[j])
            credit(v2, all2[j]);
    for (int pos = 1; pos <= n; ++pos)
        if ((ever_free >> (pos - 1)) & 1)
            for (Value d : domains[pos - 1])
                if (!is_onset(d))
                    supported[pos - 1].insert(d);

    std::vector<std::vector<Value>> out(n);
    for (int pos = 0; pos < n; ++pos)
        out[pos].assign(supported[pos].begin(), supported[pos].end());
    return out;
}

/// Soundness of the inter-voice rule: every value the rule (and the
/// filtering it triggers) removes on top of the two one-voice fixpoints
/// must be unsupported in the conjunction. Incompleteness is expected
/// and not checked.
inline CheckReport check_soundr_suite(std::uint64_t trials,
                                      std::uint64_t seed) {
    CheckReport report;
    report.suite = "soundr";
    std::mt19937_64 rng(seed);
    for (std::uint64_t t = 0; t < trials; ++t) {
        ++report.trials;
        int p1 = draw_range(rng, 2, 5);
        int p2 = draw_range(rng, 2, 7);
        int n = draw_range(rng, std::max(p1, p2), 20);
        int k1 = n / p1, k2 = n / p2;
        int m1 = draw_range(rng, 1, std::min(3, p1));
        int m2 = draw_range(rng, 1, std::min(3, p2));
        std::vector<Value> s1, s2;
        for (int i = 1; i <= m1; ++i)
            s1.push_back(i);
        for (int i = 1; i <= m2; ++i)
            s2.push_back(m1 + i);

        std::vector<Value> full;
        for (Value v = 0; v <= m1 + m2; ++v)
            full.push_back(v);
        std::vector<std::vector<Value>> doms(n, full);
        int removals = static_cast<int>(draw_below(rng, n));
        for (int r = 0; r < removals; ++r) {
            int pos = draw_range(rng, 1, n);
            Value val = static_cast<Value>(draw_below(rng, m1 + m2 + 1));
            auto& d = doms[pos - 1];
            if (d.size() > 1)
                d.erase(std::remove(d.begin(), d.end(), val), d.end());
        }

        Spacing1Spec spec1(s1, p1, k1, n), spec2(s2, p2, k2, n);
        VariableStore store(doms);
        Spacing1Propagator prop1(spec1), prop2(spec2);
        std::vector<Propagator*> dc_props{&prop1, &prop2};
        if (propagate_fixpoint(store, dc_props) == PropStatus::failed)
            continue;  // nothing for the rule to act on
        auto sm_domains = store.snapshot();

        InterVoicePropagator rule12(spec1, spec2), rule21(spec2, spec1);
        std::vector<Propagator*> sr_props{&prop1, &prop2, &rule12, &rule21};
        bool sr_failed =
            propagate_fixpoint(store, sr_props) == PropStatus::failed;

        VoiceSpec voice1{s1, p1, k1}, voice2{s2, p2, k2};
        auto oracle = two_voice_support_table(sm_domains, voice1, voice2);

        if (sr_failed) {
            if (oracle.has_value()) {
                std::ostringstream os;
                os << "rule failed a satisfiable conjunction: p1=" << p1
                   << " k1=" << k1 << " p2=" << p2 << " k2=" << k2 << " n=" << n
                   << " " << detail::show_domains(sm_domains);
                report.fail(os.str());
            }
            continue;
        }
        for (int i = 0; i < n; ++i) {
            for (Value v : sm_domains[i]) {
                if (store.domain(i).contains(v))
                    continue;  // not pruned
                bool supported =
                    oracle.has_value() &&
                    std::find((*oracle)[i].begin(), (*oracle)[i].end(), v) !=
                        (*oracle)[i].end();
                if (supported) {
                    std::ostringstream os;
                    os << "unsound pruning of value " << v << " at position "
                       << i + 1 << ": p1=" << p1 << " k1=" << k1
                       << " p2=" << p2 << " k2=" << k2 << " n=" << n << " "
                       << detail::show_domains(sm_domains);
                    report.fail(os.str());
                }
            }
        }
    }
    return report;
}

// ---- matching filter oracle -------------------------------------------

/// Edges appearing in at least one maximum matching, by exhaustive
/// enumeration of all matchings.
inline std::pair<int, std::vector<std::pair<int, int>>>
brute_max_matching_edges(const BipartiteGraph& g) {
    int best = 0;
    std::vector<std::vector<char>> in_best;  // in_best[u][v]
    in_best.assign(g.nu, std::vector<char>(g.nv, 0));
    std::vector<int> match_u(g.nu, -1);
    std::vector<char> taken_v(g.nv, 0);

    auto record = [&](int size) {
        if (size > best) {
            best = size;
            for (auto& row : in_best)
                std::fill(row.begin(), row.end(), 0);
        }
        if (size == best)
            for (int u = 0; u < g.nu; ++u)
                if (match_u[u] >= 0)
                    in_best[u][match_u[u]] = 1;
    };
    auto rec = [&](auto&& self, int u, int size) -> void {
        if (u == g.nu) {
            record(size);
            return;
        }
        self(self, u + 1, size);  // leave u unmatched
        for (int v : g.adj[u]) {
            if (taken_v[v])
                continue;
            taken_v[v] = 1;
            match_u[u] = v;
            self(self, u + 1, size + 1);
            match_u[u] = -1;
            taken_v[v] = 0;
        }
    };
    rec(rec, 0, 0);

    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < g.nu; ++u)
        for (int v = 0; v < g.nv; ++v)
            if (in_best[u][v])
                edges.emplace_back(u, v);
    return {best, edges};
}

/// Random small bipartite graphs: matching size must equal the brute
/// force count and, when the matching covers U, the filtered edge set
/// must equal the edges on no maximum matching.
inline CheckReport check_matching_suite(std::uint64_t trials,
                                        std::uint64_t seed) {
    CheckReport report;
    report.suite = "matching";
    std::mt19937_64 rng(seed);
    for (std::uint64_t t = 0; t < trials; ++t) {
        ++report.trials;
        int nu = draw_range(rng, 1, 7);
        int nv = draw_range(rng, 1, 7);
        BipartiteGraph g(nu, nv);
        for (int u = 0; u < nu; ++u)
            for (int v = 0; v < nv; ++v)
                if (draw_below(rng, 100) < 40)
                    g.add_edge(u, v);

        auto [expect_size, expect_edges] = brute_max_matching_edges(g);
        Matching m;
        int got_size = maximum_matching(g, m);
        if (got_size != expect_size) {
            std::ostringstream os;
            os << "matching size " << got_size << " != " << expect_size
               << " on nu=" << nu << " nv=" << nv;
            report.fail(os.str());
            continue;
        }
        if (got_size < nu)
            continue;  // the filter requires U to be covered
        auto removed = unsupported_edges(g, m);
        std::set<std::pair<int, int>> removed_set(removed.begin(),
                                                  removed.end());
        std::set<std::pair<int, int>> keep(expect_edges.begin(),
                                           expect_edges.end());
        bool bad = false;
        for (int u = 0; u < nu && !bad; ++u)
            for (int v : g.adj[u]) {
                bool kept = !removed_set.count({u, v});
                if (kept != keep.count({u, v})) {
                    bad = true;
                    break;
                }
            }
        if (bad) {
            std::ostringstream os;
            os << "filter mismatch on nu=" << nu << " nv=" << nv << " edges:";
            for (int u = 0; u < nu; ++u)
                for (int v : g.adj[u])
                    os << " (" << u << "," << v << ")";
            report.fail(os.str());
        }
    }
    return report;
}

// ---- reduction round-trips ----------------------------------------------

/// Exhaustive small formulas plus seeded samples: satisfiability of the
/// formula must coincide with support existence for every applicable
/// reduction, and every found support must decode into a genuine model.
inline CheckReport check_reductions_suite(int max_v, int max_c,
                                          std::uint64_t samples,
                                          std::uint64_t seed,
                                          double per_instance_timeout = 60.0) {
    CheckReport report;
    report.suite = "reductions";

    auto run_one = [&](const Cnf& cnf, ReductionKind kind) {
        ++report.trials;
        bool expect;
        try {
            expect = brute_sat(cnf);
        } catch (const std::exception&) {
            return;
        }
        ReducedInstance red;
        try {
            red = reduce(cnf, kind);
        } catch (const ReductionError&) {
            return;  // rejected layouts (e.g. two-voice with c = 1)
        }
        ReductionSolve got = solve_reduction(red, per_instance_timeout);
        std::ostringstream id;
        id << reduction_name(kind) << " on v=" << cnf.num_vars << " clauses:";
        for (const auto& cl : cnf.clauses) {
            id << " (";
            for (int lit : cl)
                id << lit << " ";
            id << ")";
        }
        if (got.status == SolveStatus::timeout) {
            report.fail("timeout: " + id.str());
            return;
        }
        bool found = got.status == SolveStatus::sat;
        if (found != expect) {
            report.fail((expect ? "missed support: " : "phantom support: ") +
                        id.str());
            return;
        }
        if (found) {
            try {
                extract_model(got.support, red, cnf);
            } catch (const ExtractionError& e) {
                report.fail(std::string(e.what()) + " " + id.str());
            }
        }
    };

    auto run_all_kinds = [&](const Cnf& cnf) {
        run_one(cnf, ReductionKind::spacing);
        run_one(cnf, ReductionKind::spacing_f);
        run_one(cnf, ReductionKind::spacing_f_nomax);
        if (cnf.num_vars <= 2 && cnf.num_clauses() >= 2 &&
            cnf.num_clauses() <= 3)
            run_one(cnf, ReductionKind::spacing_h);
    };

    // exhaustive: every clause list over <= max_v variables with width <= 2
    for (int v = 1; v <= std::min(max_v, 2); ++v) {
        std::vector<std::vector<int>> clause_pool;
        std::vector<int> lits;
        for (int i = 1; i <= v; ++i) {
            lits.push_back(i);
            lits.push_back(-i);
        }
        for (std::size_t i = 0; i < lits.size(); ++i) {
            clause_pool.push_back({lits[i]});
            for (std::size_t j = i + 1; j < lits.size(); ++j)
                clause_pool.push_back({lits[i], lits[j]});
        }
        for (std::size_t c1 = 0; c1 < clause_pool.size(); ++c1) {
            Cnf one;
            one.num_vars = v;
            one.clauses = {clause_pool[c1]};
            run_all_kinds(one);
            if (max_c < 2)
                continue;
            for (std::size_t c2 = c1; c2 < clause_pool.size(); ++c2) {
                Cnf two;
                two.num_vars = v;
                two.clauses = {clause_pool[c1], clause_pool[c2]};
                run_all_kinds(two);
            }
        }
    }

    // seeded samples over the larger box
    std::mt19937_64 rng(seed);
    for (std::uint64_t t = 0; t < samples; ++t) {
        Cnf cnf;
        cnf.num_vars = draw_range(rng, 1, std::max(max_v, 1));
        int c = draw_range(rng, 1, std::max(max_c, 1));
        for (int j = 0; j < c; ++j) {
            int width = draw_range(rng, 1, std::min(3, cnf.num_vars * 2));
            std::set<int> clause;
            while (static_cast<int>(clause.size()) < width) {
                int var = draw_range(rng, 1, cnf.num_vars);
                clause.insert(draw_below(rng, 2) ? var : -var);
            }
            cnf.clauses.emplace_back(clause.begin(), clause.end());
        }
        run_all_kinds(cnf);
    }
    return report;
}

}  // namespace spacing
