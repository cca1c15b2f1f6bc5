#pragma once

#include <algorithm>
#include <chrono>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "spacing/bounded.hpp"
#include "spacing/cnf.hpp"
#include "spacing/search.hpp"
#include "spacing/semantics.hpp"
#include "spacing/spacing1.hpp"

namespace spacing {

struct ReductionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ExtractionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ReductionKind { spacing, spacing_f, spacing_f_nomax, spacing_h };

inline const char* reduction_name(ReductionKind k) {
    switch (k) {
        case ReductionKind::spacing: return "spacing";
        case ReductionKind::spacing_f: return "spacing_f";
        case ReductionKind::spacing_f_nomax: return "spacing_f_nomax";
        case ReductionKind::spacing_h: return "spacing_h";
    }
    return "?";
}

/// A CNF compiled into a constraint-finding problem. Depending on the
/// kind this is a single (possibly forced) Spacing constraint or a
/// two-voice conjunction, over explicit per-position domains.
struct ReducedInstance {
    ReductionKind kind = ReductionKind::spacing;
    int num_props = 0;    // v of the source formula
    int num_clauses = 0;  // c of the source formula
    int n = 0;
    std::vector<std::vector<Value>> domains;

    // single-constraint kinds
    std::vector<Value> s;
    std::vector<int> a, b;
    int k = 1;
    bool forced = false;

    // spacing_h
    struct HVoice {
        std::vector<Value> s;
        int p = 1;
        int k = 1;
    };
    std::vector<HVoice> voices;

    SpacingSpec spacing_spec() const {
        return SpacingSpec(s, a, b, k, n);
    }
};

// ---- literal <-> value-id mapping ----------------------------------------
// base:       p_i -> i, ~p_i -> v+i                (1 .. 2v)
// primed:     l'  -> 2v + base(l)                  (2v+1 .. 4v)
// clause j:   l^j -> 2v(1+j) + base(l)             (j = 1..c)

inline Value lit_base_value(int lit, int v) {
    return lit > 0 ? lit : v - lit;
}

inline Value lit_primed_value(int lit, int v) {
    return 2 * v + lit_base_value(lit, v);
}

inline Value lit_indexed_value(int lit, int v, int j) {
    return 2 * v * (1 + j) + lit_base_value(lit, v);
}

/// Inverse of lit_base_value; 0 for ids outside 1..2v.
inline int base_value_lit(Value id, int v) {
    if (id >= 1 && id <= v)
        return id;
    if (id > v && id <= 2 * v)
        return -(id - v);
    return 0;
}

inline std::string lit_to_string(int lit) {
    return (lit < 0 ? "~p" : "p") + std::to_string(std::abs(lit));
}

// ---- encoders -------------------------------------------------------------

/// Sequence of vc+v+c variables: a (c+1) x (v+1) table whose first v
/// columns carry {p_i, ~p_i} and whose last column carries the clauses;
/// window [1, v+1] with k = c+1 repetitions.
inline ReducedInstance reduce_spacing(const Cnf& cnf) {
    const int v = cnf.num_vars;
    const int c = cnf.num_clauses();
    ReducedInstance red;
    red.kind = ReductionKind::spacing;
    red.num_props = v;
    red.num_clauses = c;
    red.k = c + 1;
    red.a.assign(red.k - 1, 1);
    red.b.assign(red.k - 1, v + 1);
    red.n = v * c + v + c;
    for (Value id = 1; id <= 2 * v; ++id)
        red.s.push_back(id);

    red.domains.resize(red.n);
    for (int j = 1; j <= c + 1; ++j) {
        for (int i = 1; i <= v + 1; ++i) {
            int pos = (j - 1) * (v + 1) + i;
            if (pos > red.n)
                break;  // the very last cell stays empty
            auto& dom = red.domains[pos - 1];
            if (i <= v) {
                dom = {i, v + i};
            } else {
                for (int lit : cnf.clauses[j - 1])
                    dom.push_back(lit_base_value(lit, v));
                std::sort(dom.begin(), dom.end());
                dom.erase(std::unique(dom.begin(), dom.end()), dom.end());
            }
        }
    }
    return red;
}

/// Forced variant: the same table extended with a dummy-only row and a
/// mirrored block of variable columns, (2c+3)(v+1) variables in total.
inline ReducedInstance reduce_spacing_f(const Cnf& cnf) {
    const int v = cnf.num_vars;
    const int c = cnf.num_clauses();
    ReducedInstance red = reduce_spacing(cnf);
    red.kind = ReductionKind::spacing_f;
    red.forced = true;
    red.n = (2 * c + 3) * (v + 1);
    red.domains.resize(red.n);
    for (int j = c + 1; j <= 2 * c + 3; ++j) {
        for (int i = 1; i <= v + 1; ++i) {
            int pos = (j - 1) * (v + 1) + i;
            auto& dom = red.domains[pos - 1];
            if (i == v + 1 || j == c + 2)
                dom = {dummy_value};
            else
                dom = {i, v + i};
        }
    }
    return red;
}

/// Variant with no maximum distance condition: c rows of width 7v+1
/// (clause, optional satisfied literals, padding, complementary pairs,
/// padding), window [5v+1, (7v+1)c] with k = c repetitions.
inline ReducedInstance reduce_spacing_f_nomax(const Cnf& cnf) {
    const int v = cnf.num_vars;
    const int c = cnf.num_clauses();
    if (c == 0)
        throw ReductionError("spacing_f_nomax reduction: empty formula");
    ReducedInstance red;
    red.kind = ReductionKind::spacing_f_nomax;
    red.num_props = v;
    red.num_clauses = c;
    red.forced = true;
    red.k = c;
    red.n = (7 * v + 1) * c;
    red.a.assign(std::max(red.k - 1, 0), 5 * v + 1);
    red.b.assign(std::max(red.k - 1, 0), red.n);
    for (Value id = 1; id <= 2 * v; ++id)
        red.s.push_back(id);

    red.domains.resize(red.n);
    const int width = 7 * v + 1;
    for (int j = 1; j <= c; ++j) {
        auto cell = [&](int col) -> std::vector<Value>& {
            return red.domains[(j - 1) * width + col - 1];
        };
        auto& clause_dom = cell(1);
        for (int lit : cnf.clauses[j - 1])
            clause_dom.push_back(lit_base_value(lit, v));
        std::sort(clause_dom.begin(), clause_dom.end());
        clause_dom.erase(std::unique(clause_dom.begin(), clause_dom.end()),
                         clause_dom.end());
        for (int i = 1; i <= v; ++i)
            cell(1 + i) = {dummy_value, i};
        for (int i = 1; i <= v; ++i)
            cell(1 + v + i) = {dummy_value, v + i};
        for (int i = 1; i <= 2 * v; ++i)
            cell(1 + 2 * v + i) = {dummy_value};
        for (int i = 1; i <= v; ++i)
            cell(1 + 4 * v + i) = {i, v + i};
        for (int i = 1; i <= 2 * v; ++i)
            cell(1 + 5 * v + i) = {dummy_value};
    }
    return red;
}

/// Two-voice conjunction: clause choices sit on the diagonal of the first
/// voice, and the period difference of 2v beats aligns clause-indexed
/// copies with the plain literal values that represent the model.
inline ReducedInstance reduce_spacing_h(const Cnf& cnf) {
    const int v = cnf.num_vars;
    const int c = cnf.num_clauses();
    if (c == 1)
        throw ReductionError(
            "spacing_h reduction: single-clause formulas are trivially "
            "satisfiable and the layout is undefined for c = 1");
    if (c == 0)
        throw ReductionError("spacing_h reduction: empty formula");
    ReducedInstance red;
    red.kind = ReductionKind::spacing_h;
    red.num_props = v;
    red.num_clauses = c;
    const int p1 = c + 6 * c * v;
    const int p2 = p1 + 2 * v;
    red.n = p2 * c;

    ReducedInstance::HVoice voice1, voice2;
    voice1.p = p1;
    voice1.k = c;
    for (int x = 1; x <= v; ++x) {
        voice1.s.push_back(lit_primed_value(x, v));
        voice1.s.push_back(lit_primed_value(-x, v));
    }
    for (int j = 1; j <= c; ++j)
        for (int x = 1; x <= v; ++x) {
            voice1.s.push_back(lit_indexed_value(x, v, j));
            voice1.s.push_back(lit_indexed_value(-x, v, j));
        }
    std::sort(voice1.s.begin(), voice1.s.end());
    voice2.p = p2;
    voice2.k = c;
    for (Value id = 1; id <= 2 * v; ++id)
        voice2.s.push_back(id);
    red.voices = {voice1, voice2};

    std::vector<std::set<Value>> dom(red.n);
    std::vector<char> no_dummy(red.n, 0);

    // first voice, rows of length p1
    auto pos1 = [&](int j, int i) { return (j - 1) * p1 + i; };
    for (int j = 1; j <= c; ++j) {
        for (int i = 1; i <= c; ++i) {
            int pos = pos1(j, i);
            no_dummy[pos - 1] = 1;
            if (i == j) {
                for (int lit : cnf.clauses[j - 1])
                    dom[pos - 1].insert(lit_indexed_value(lit, v, i));
            } else {
                for (int x = 1; x <= v; ++x) {
                    dom[pos - 1].insert(lit_indexed_value(x, v, i));
                    dom[pos - 1].insert(lit_indexed_value(-x, v, i));
                }
            }
        }
        for (int copy = 0; copy < 2; ++copy) {
            int block = c + copy * 2 * c * v;
            for (int i = 1; i <= c; ++i)
                for (int y = 0; y <= 1; ++y)
                    for (int x = 1; x <= v; ++x) {
                        int col = block + (i - 1) * 2 * v + v * y + x;
                        int lit = y == 0 ? x : -x;
                        dom[pos1(j, col) - 1].insert(
                            lit_indexed_value(lit, v, i));
                    }
        }
        int cons = c + 4 * c * v;
        for (int x = 1; x <= v; ++x) {
            dom[pos1(j, cons + x) - 1].insert(lit_primed_value(x, v));
            dom[pos1(j, cons + v + x) - 1].insert(lit_primed_value(-x, v));
            dom[pos1(j, cons + (2 * c * v - 2 * v) + x) - 1].insert(
                lit_primed_value(-x, v));
            dom[pos1(j, cons + (2 * c * v - v) + x) - 1].insert(
                lit_primed_value(x, v));
        }
        // the consistency part carries the dummy on its middle columns
        // itself; the generic fill below skips second-voice places
        for (int x = 1; x <= 2 * c * v - 4 * v; ++x)
            dom[pos1(j, cons + 2 * v + x) - 1].insert(dummy_value);
    }

    // second voice, rows of length p2
    auto pos2 = [&](int j, int i) { return (j - 1) * p2 + i; };
    for (int j = 1; j <= c; ++j) {
        for (int x = 1; x <= v; ++x) {
            dom[pos2(j, c + x) - 1].insert(x);
            dom[pos2(j, c + v + x) - 1].insert(v + x);
            dom[pos2(j, c + 4 * c * v + x) - 1].insert(x);
            dom[pos2(j, c + 4 * c * v + v + x) - 1].insert(v + x);
        }
        for (int x = 1; x <= 2 * v; ++x) {
            no_dummy[pos2(j, c + x) - 1] = 1;
            no_dummy[pos2(j, c + 4 * c * v + x) - 1] = 1;
        }
    }

    red.domains.resize(red.n);
    for (int i = 0; i < red.n; ++i) {
        if (!no_dummy[i])
            dom[i].insert(dummy_value);
        red.domains[i].assign(dom[i].begin(), dom[i].end());
    }
    return red;
}

inline ReducedInstance reduce(const Cnf& cnf, ReductionKind kind) {
    switch (kind) {
        case ReductionKind::spacing: return reduce_spacing(cnf);
        case ReductionKind::spacing_f: return reduce_spacing_f(cnf);
        case ReductionKind::spacing_f_nomax: return reduce_spacing_f_nomax(cnf);
        case ReductionKind::spacing_h: return reduce_spacing_h(cnf);
    }
    throw std::logic_error("reduce: bad kind");
}

/// Checker matching the reduced instance's constraint semantics.
inline Checker reduction_checker(const ReducedInstance& red) {
    if (red.kind == ReductionKind::spacing_h) {
        std::vector<VoiceSpec> voices;
        for (const auto& hv : red.voices)
            voices.push_back({hv.s, hv.p, hv.k});
        return [voices](std::span<const Value> x) {
            return check_spacing_h(x, voices);
        };
    }
    SpacingSpec spec = red.spacing_spec();
    bool forced = red.forced;
    return [spec, forced](std::span<const Value> x) {
        return forced ? check_spacing_forced(x, spec) : check_spacing(x, spec);
    };
}

/// Reads the encoded model back out of a support: the construction region
/// holding one literal choice per propositional variable. The result is
/// checked to be consistent and to satisfy every clause of `cnf`.
inline std::vector<int> extract_model(const std::vector<Value>& support,
                                      const ReducedInstance& red,
                                      const Cnf& cnf) {
    if (static_cast<int>(support.size()) != red.n)
        throw ExtractionError("extract_model: support length mismatch");
    const int v = red.num_props;
    std::set<int> lits;
    auto take = [&](Value id) {
        int lit = base_value_lit(id, v);
        if (lit != 0)
            lits.insert(lit);
    };
    switch (red.kind) {
        case ReductionKind::spacing:
        case ReductionKind::spacing_f:
            for (int i = 0; i < v; ++i)
                take(support[i]);
            break;
        case ReductionKind::spacing_f_nomax:
            // the clause columns hold the satisfied-literal choices and
            // repeat consistently across rows
            for (int j = 0; j < red.num_clauses; ++j)
                take(support[j * (7 * v + 1)]);
            break;
        case ReductionKind::spacing_h:
            for (int x = 1; x <= 2 * v; ++x)
                take(support[red.num_clauses + x - 1]);
            break;
    }
    for (int lit : lits)
        if (lits.count(-lit))
            throw ExtractionError("extract_model: inconsistent literal set");
    for (const auto& clause : cnf.clauses) {
        bool sat = false;
        for (int lit : clause)
            sat = sat || lits.count(lit);
        if (!sat)
            throw ExtractionError("extract_model: clause left unsatisfied");
    }
    return {lits.begin(), lits.end()};
}

// ---- finding supports of reduced instances --------------------------------

enum class SolveStatus { sat, unsat, timeout };

struct ReductionSolve {
    SolveStatus status = SolveStatus::unsat;
    std::vector<Value> support;
    std::uint64_t nodes = 0;
};

namespace detail {

/// Position-by-position DFS guided by prefix-checkable consequences of
/// the constraint (distance windows, expired deadlines, remaining
/// capacity). Complete; leaves are validated by the real checker.
class PrefixSupportSearch {
  public:
    PrefixSupportSearch(const ReducedInstance& red, double timeout_seconds)
        : red_(&red),
          spec_(red.spacing_spec()),
          ok_(reduction_checker(red)),
          timeout_(timeout_seconds) {
        const int ns = static_cast<int>(spec_.tracked.size());
        const int n = red.n;
        suffix_.assign(ns, std::vector<int>(n + 1, 0));
        for (int d = 0; d < ns; ++d)
            for (int i = n - 1; i >= 0; --i) {
                const auto& dom = red.domains[i];
                bool has = std::find(dom.begin(), dom.end(),
                                     spec_.tracked[d]) != dom.end();
                suffix_[d][i] = suffix_[d][i + 1] + (has ? 1 : 0);
            }
        count_.assign(ns, 0);
        last_.assign(ns, 0);
        cur_.assign(n, dummy_value);
    }

    ReductionSolve run() {
        start_ = std::chrono::steady_clock::now();
        out_ = ReductionSolve{};
        out_.status = SolveStatus::unsat;
        dfs(0);
        return out_;
    }

  private:
    bool expired() {
        if (timeout_ <= 0)
            return false;
        if ((out_.nodes & 1023) != 0)
            return false;
        auto elapsed = std::chrono::duration<double>(
            std::chrono::steady_clock::now() - start_);
        return elapsed.count() >= timeout_;
    }

    // returns false to stop the whole search
    bool dfs(int pos) {
        ++out_.nodes;
        if (expired()) {
            out_.status = SolveStatus::timeout;
            return false;
        }
        const int n = red_->n;
        if (pos == n) {
            if (ok_(cur_)) {
                out_.status = SolveStatus::sat;
                out_.support = cur_;
                return false;
            }
            return true;
        }
        const int q = pos + 1;  // 1-based position being assigned
        const int ns = static_cast<int>(spec_.tracked.size());
        const int k = spec_.repeats;

        // tracked values first, then the rest, ascending
        std::vector<Value> order;
        for (Value val : red_->domains[pos])
            if (tracked_index(val) >= 0)
                order.push_back(val);
        for (Value val : red_->domains[pos])
            if (tracked_index(val) < 0)
                order.push_back(val);

        for (Value val : order) {
            int hit = tracked_index(val);
            if (hit >= 0 && count_[hit] >= 1 && count_[hit] < k) {
                int gap = q - last_[hit];
                if (gap < spec_.min_gap[count_[hit] - 1] ||
                    gap > spec_.max_gap[count_[hit] - 1])
                    continue;
            }
            bool feasible = true;
            for (int d = 0; d < ns && feasible; ++d) {
                if (d == hit)
                    continue;
                // expired maximum-distance deadline
                if (count_[d] >= 1 && count_[d] < k &&
                    q >= last_[d] + spec_.max_gap[count_[d] - 1])
                    feasible = false;
                // not enough remaining places for the required occurrences
                int have = count_[d] + suffix_[d][q];
                if ((count_[d] >= 1 || red_->forced) && count_[d] < k &&
                    have < k)
                    feasible = false;
            }
            if (!feasible)
                continue;

            int saved_count = 0, saved_last = 0;
            if (hit >= 0) {
                saved_count = count_[hit];
                saved_last = last_[hit];
                ++count_[hit];
                last_[hit] = q;
            }
            cur_[pos] = val;
            bool keep_going = dfs(pos + 1);
            if (hit >= 0) {
                count_[hit] = saved_count;
                last_[hit] = saved_last;
            }
            if (!keep_going)
                return false;
        }
        return true;
    }

    int tracked_index(Value v) const {
        auto it =
            std::lower_bound(spec_.tracked.begin(), spec_.tracked.end(), v);
        if (it != spec_.tracked.end() && *it == v)
            return static_cast<int>(it - spec_.tracked.begin());
        return -1;
    }

    const ReducedInstance* red_;
    SpacingSpec spec_;
    Checker ok_;
    double timeout_;
    std::vector<std::vector<int>> suffix_;
    std::vector<int> count_, last_;
    std::vector<Value> cur_;
    ReductionSolve out_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// Searches a reduced instance for one support. The two-voice kind runs
/// on the solver with its one-voice filters; a plain Spacing with a tiny
/// tracked set runs on the solver with the automaton filter; everything
/// else falls back to the checker-guided prefix search.
inline ReductionSolve solve_reduction(const ReducedInstance& red,
                                      double timeout_seconds) {
    ReductionSolve out;
    Checker ok = reduction_checker(red);

    auto run_solver = [&](std::vector<std::unique_ptr<Propagator>> props) {
        VariableStore store(red.domains);
        std::vector<Propagator*> raw;
        for (auto& p : props)
            raw.push_back(p.get());
        SearchOptions opts;
        opts.max_solutions = 1;
        opts.timeout_seconds = timeout_seconds;
        opts.var_rule = VarHeuristic::first_fail;
        SearchOutcome res = search(store, raw, opts);
        out.nodes = res.nodes;
        if (res.solution_count > 0) {
            if (!ok(res.solutions[0]))
                throw std::logic_error(
                    "solve_reduction: solver produced a non-support");
            out.status = SolveStatus::sat;
            out.support = res.solutions[0];
        } else {
            out.status =
                res.timed_out ? SolveStatus::timeout : SolveStatus::unsat;
        }
        return out;
    };

    if (red.kind == ReductionKind::spacing_h) {
        std::vector<std::unique_ptr<Propagator>> props;
        for (const auto& hv : red.voices)
            props.push_back(std::make_unique<Spacing1Propagator>(
                Spacing1Spec(hv.s, hv.p, hv.k, red.n)));
        return run_solver(std::move(props));
    }
    if (!red.forced && static_cast<int>(red.s.size()) <=
                           BoundedSpacingGraph::default_cap) {
        std::vector<std::unique_ptr<Propagator>> props;
        props.push_back(
            std::make_unique<BoundedSpacingPropagator>(red.spacing_spec()));
        return run_solver(std::move(props));
    }
    detail::PrefixSupportSearch dfs(red, timeout_seconds);
    return dfs.run();
}

// ---- reduced instance files ------------------------------------------------

inline nlohmann::ordered_json reduced_to_json(const ReducedInstance& red) {
    nlohmann::ordered_json j;
    j["kind"] = reduction_name(red.kind);
    j["num_props"] = red.num_props;
    j["num_clauses"] = red.num_clauses;
    j["n"] = red.n;
    if (red.kind == ReductionKind::spacing_h) {
        j["voices"] = nlohmann::ordered_json::array();
        for (const auto& hv : red.voices)
            j["voices"].push_back({{"s", hv.s}, {"p", hv.p}, {"k", hv.k}});
    } else {
        j["s"] = red.s;
        j["a"] = red.a;
        j["b"] = red.b;
        j["k"] = red.k;
        j["forced"] = red.forced;
    }
    j["domains"] = red.domains;
    return j;
}

inline ReducedInstance reduced_from_json(const nlohmann::json& j) {
    ReducedInstance red;
    try {
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "spacing")
            red.kind = ReductionKind::spacing;
        else if (kind == "spacing_f")
            red.kind = ReductionKind::spacing_f;
        else if (kind == "spacing_f_nomax")
            red.kind = ReductionKind::spacing_f_nomax;
        else if (kind == "spacing_h")
            red.kind = ReductionKind::spacing_h;
        else
            throw DataError("unknown kind: " + kind);
        red.num_props = j.value("num_props", 0);
        red.num_clauses = j.value("num_clauses", 0);
        red.n = j.at("n").get<int>();
        red.domains = j.at("domains").get<std::vector<std::vector<Value>>>();
        if (red.kind == ReductionKind::spacing_h) {
            for (const auto& hv : j.at("voices"))
                red.voices.push_back({hv.at("s").get<std::vector<Value>>(),
                                      hv.at("p").get<int>(),
                                      hv.at("k").get<int>()});
        } else {
            red.s = j.at("s").get<std::vector<Value>>();
            red.a = j.at("a").get<std::vector<int>>();
            red.b = j.at("b").get<std::vector<int>>();
            red.k = j.at("k").get<int>();
            red.forced = j.at("forced").get<bool>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("reduced instance: ") + e.what());
    }
    if (static_cast<int>(red.domains.size()) != red.n)
        throw DataError("reduced instance: domain count mismatch");
    return red;
}

/// Literal/value correspondence, emitted next to the instance so the
/// encoding can be audited.
inline nlohmann::ordered_json mapping_to_json(const ReducedInstance& red) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    const int v = red.num_props;
    auto add = [&](Value id, const std::string& text) {
        rows.push_back({{"value", id}, {"literal", text}});
    };
    for (int x = 1; x <= v; ++x) {
        add(lit_base_value(x, v), lit_to_string(x));
        add(lit_base_value(-x, v), lit_to_string(-x));
    }
    if (red.kind == ReductionKind::spacing_h) {
        for (int x = 1; x <= v; ++x) {
            add(lit_primed_value(x, v), lit_to_string(x) + "'");
            add(lit_primed_value(-x, v), lit_to_string(-x) + "'");
        }
        for (int j = 1; j <= red.num_clauses; ++j)
            for (int x = 1; x <= v; ++x) {
                add(lit_indexed_value(x, v, j),
                    lit_to_string(x) + "^" + std::to_string(j));
                add(lit_indexed_value(-x, v, j),
                    lit_to_string(-x) + "^" + std::to_string(j));
            }
    }
    nlohmann::ordered_json j;
    j["num_props"] = red.num_props;
    j["num_clauses"] = red.num_clauses;
    j["dummy"] = dummy_value;
    j["values"] = std::move(rows);
    return j;
}

}  // namespace spacing
