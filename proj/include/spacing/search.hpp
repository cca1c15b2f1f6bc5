#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <vector>

#include "spacing/propagation.hpp"

namespace spacing {

enum class VarHeuristic {
    first_fail,    // smallest current domain, lexicographic tie-break
    lexicographic  // first unassigned variable in index order
};

enum class ValueOrder {
    preferred_first,  // preferred values ascending, then the rest ascending
    ascending
};

struct SearchOptions {
    VarHeuristic var_rule = VarHeuristic::first_fail;
    ValueOrder value_rule = ValueOrder::preferred_first;
    /// Per value id: nonzero marks a preferred value (typically the union
    /// of the tracked sets). May be shorter than the universe.
    std::vector<char> preferred;
    std::uint64_t max_solutions = std::numeric_limits<std::uint64_t>::max();
    double timeout_seconds = 0;  // 0 = none
    bool record_solutions = true;
};

struct SearchOutcome {
    std::vector<std::vector<Value>> solutions;
    std::uint64_t solution_count = 0;
    std::uint64_t backtracks = 0;
    std::uint64_t nodes = 0;
    double wall_time = 0;
    bool timed_out = false;
};

/// Depth-first search with binary branching (x = v, then x != v).
/// Every dead-end below the root counts as one backtrack; a failed root
/// fixpoint reports unsatisfiable with zero backtracks.
class DfsSearch {
  public:
    DfsSearch(VariableStore& store, std::vector<Propagator*> props,
              SearchOptions options)
        : store_(&store),
          engine_(store, std::move(props)),
          options_(std::move(options)) {}

    SearchOutcome run() {
        using clock = std::chrono::steady_clock;
        start_ = clock::now();
        outcome_ = SearchOutcome{};
        engine_.seed_all();
        descend(0);
        outcome_.wall_time =
            std::chrono::duration<double>(clock::now() - start_).count();
        return outcome_;
    }

  private:
    // Returns false when the search must stop (limit or timeout).
    bool descend(int depth) {
        ++outcome_.nodes;
        if (timed_out()) {
            outcome_.timed_out = true;
            return false;
        }
        if (engine_.propagate() == PropStatus::failed) {
            if (depth > 0)
                ++outcome_.backtracks;
            return true;
        }
        VarId x = pick_variable();
        if (x < 0) {
            ++outcome_.solution_count;
            if (options_.record_solutions)
                outcome_.solutions.push_back(store_->assignment());
            return outcome_.solution_count < options_.max_solutions;
        }
        Value v = pick_value(x);

        VariableStore::Mark m = store_->checkpoint();
        store_->assign(x, v);
        store_->clear_changed();
        engine_.seed_watchers_of(x);
        bool keep_going = descend(depth + 1);
        store_->rollback(m);
        if (!keep_going)
            return false;

        m = store_->checkpoint();
        store_->remove(x, v);
        store_->clear_changed();
        engine_.seed_watchers_of(x);
        keep_going = descend(depth + 1);
        store_->rollback(m);
        return keep_going;
    }

    VarId pick_variable() const {
        VarId best = -1;
        int best_size = std::numeric_limits<int>::max();
        for (VarId x = 0; x < store_->num_vars(); ++x) {
            int sz = store_->domain(x).size();
            if (sz <= 1)
                continue;
            if (options_.var_rule == VarHeuristic::lexicographic)
                return x;
            if (sz < best_size) {
                best_size = sz;
                best = x;
            }
        }
        return best;
    }

    Value pick_value(VarId x) const {
        const Domain& d = store_->domain(x);
        if (options_.value_rule == ValueOrder::preferred_first &&
            !options_.preferred.empty()) {
            Value first_preferred = -1;
            d.for_each([&](Value v) {
                if (first_preferred < 0 && is_preferred(v))
                    first_preferred = v;
            });
            if (first_preferred >= 0)
                return first_preferred;
        }
        return d.min_value();
    }

    bool is_preferred(Value v) const {
        return v >= 0 &&
               static_cast<std::size_t>(v) < options_.preferred.size() &&
               options_.preferred[v];
    }

    bool timed_out() const {
        if (options_.timeout_seconds <= 0)
            return false;
        auto elapsed = std::chrono::duration<double>(
            std::chrono::steady_clock::now() - start_);
        return elapsed.count() >= options_.timeout_seconds;
    }

    VariableStore* store_;
    PropagationEngine engine_;
    SearchOptions options_;
    SearchOutcome outcome_;
    std::chrono::steady_clock::time_point start_;
};

inline SearchOutcome search(VariableStore& store,
                            const std::vector<Propagator*>& props,
                            const SearchOptions& options = {}) {
    DfsSearch s(store, props, options);
    return s.run();
}

}  // namespace spacing
