#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "spacing/bipartite.hpp"
#include "spacing/propagation.hpp"

namespace spacing {

/// Periodic one-voice constraint: the values of S sit on distinct places
/// of the first p positions and that placement repeats k times.
struct Spacing1Spec {
    std::vector<Value> tracked;  // S, sorted, dummy excluded
    int period = 1;              // p
    int repeats = 1;             // k
    int length = 0;              // n

    Spacing1Spec(std::vector<Value> s, int p, int k, int n)
        : tracked(std::move(s)), period(p), repeats(k), length(n) {
        if (p < 1 || k < 1 || p > n || p * k > n)
            throw std::invalid_argument("Spacing1Spec: need 1 <= p <= n and p*k <= n");
        std::sort(tracked.begin(), tracked.end());
        tracked.erase(std::unique(tracked.begin(), tracked.end()),
                      tracked.end());
        for (Value d : tracked)
            if (d <= dummy_value)
                throw std::invalid_argument(
                    "Spacing1Spec: tracked values must be positive");
    }

    bool tracks(Value v) const {
        return std::binary_search(tracked.begin(), tracked.end(), v);
    }
};

/// Channeled view of one domain: values of S kept as-is, everything else
/// collapsed onto the dummy id 0. Sorted, dummy first when present.
inline std::vector<Value> channel_values(const Domain& dom,
                                         const Spacing1Spec& spec) {
    std::vector<Value> out;
    bool has_other = false;
    dom.for_each([&](Value v) {
        if (spec.tracks(v))
            out.push_back(v);
        else
            has_other = true;
    });
    if (has_other)
        out.insert(out.begin(), dummy_value);
    return out;
}

/// Folded domains P_i: intersection of the channeled domains of the k
/// positions aligned at place i of the period. classes[i] is sorted with
/// the dummy first when present; an empty class means inconsistency.
struct FoldedDomains {
    std::vector<std::vector<Value>> classes;  // size p, place i -> classes[i-1]

    bool any_empty() const {
        for (const auto& c : classes)
            if (c.empty())
                return true;
        return false;
    }
};

inline FoldedDomains fold_domains(const VariableStore& store,
                                  const Spacing1Spec& spec, int offset = 0) {
    FoldedDomains folded;
    folded.classes.resize(spec.period);
    for (int i = 0; i < spec.period; ++i) {
        std::vector<Value> acc =
            channel_values(store.domain(offset + i), spec);
        for (int j = 1; j < spec.repeats && !acc.empty(); ++j) {
            std::vector<Value> next = channel_values(
                store.domain(offset + j * spec.period + i), spec);
            std::vector<Value> merged;
            std::set_intersection(acc.begin(), acc.end(), next.begin(),
                                  next.end(), std::back_inserter(merged));
            acc = std::move(merged);
        }
        folded.classes[i] = std::move(acc);
    }
    return folded;
}

/// Value graph of the matching theorem: U holds the values of S followed
/// by p-|S| interchangeable dummy copies, V holds the p period places.
struct SpacingValueGraph {
    BipartiteGraph graph;
    std::vector<Value> u_values;  // size |S|; U nodes >= |S| are dummies
    int num_dummies = 0;
};

inline std::optional<SpacingValueGraph> build_value_graph(
    const FoldedDomains& folded, const Spacing1Spec& spec) {
    const int p = spec.period;
    const int ns = static_cast<int>(spec.tracked.size());
    if (ns > p)
        return std::nullopt;
    SpacingValueGraph vg;
    vg.u_values = spec.tracked;
    vg.num_dummies = p - ns;
    vg.graph = BipartiteGraph(p, p);
    for (int i = 0; i < p; ++i) {
        for (Value v : folded.classes[i]) {
            if (v == dummy_value) {
                for (int j = 0; j < vg.num_dummies; ++j)
                    vg.graph.add_edge(ns + j, i);
            } else {
                int u = static_cast<int>(
                    std::lower_bound(spec.tracked.begin(), spec.tracked.end(),
                                     v) -
                    spec.tracked.begin());
                vg.graph.add_edge(u, i);
            }
        }
    }
    return vg;
}

/// Domain-consistent filtering for Spacing1. Keeps its matching across
/// invocations as a warm start; stale pairs are dropped and re-augmented,
/// which also repairs the matching after a rollback.
class Spacing1Propagator : public Propagator {
  public:
    Spacing1Propagator(Spacing1Spec spec, int first_var = 0)
        : spec_(std::move(spec)) {
        watched_.resize(spec_.length);
        for (int i = 0; i < spec_.length; ++i)
            watched_[i] = first_var + i;
        offset_ = first_var;
    }

    const std::vector<VarId>& watched() const override { return watched_; }
    const Spacing1Spec& spec() const { return spec_; }

    PropStatus propagate(VariableStore& store) override {
        const int p = spec_.period;
        const int k = spec_.repeats;
        const int ns = static_cast<int>(spec_.tracked.size());
        if (ns > p)
            return PropStatus::failed;

        // tracked values cannot occur past the k-th period
        for (int x = p * k; x < spec_.length; ++x) {
            for (Value d : spec_.tracked)
                if (store.remove(offset_ + x, d) == ChangeEvent::would_empty)
                    return PropStatus::failed;
        }

        if (store.universe_size() <= 64)
            return propagate_masked(store);
        return propagate_generic(store);
    }

  private:
    // Single-word fast path: the channeled view of a domain is
    // (bits & tracked) plus bit 0 whenever some untracked value remains,
    // and folding is a plain AND across the aligned positions.
    PropStatus propagate_masked(VariableStore& store) {
        const int p = spec_.period;
        const int k = spec_.repeats;
        const int ns = static_cast<int>(spec_.tracked.size());

        std::uint64_t tracked_bits = 0;
        for (Value d : spec_.tracked)
            tracked_bits |= std::uint64_t{1} << d;

        auto channel = [&](std::uint64_t w) {
            return (w & tracked_bits) |
                   std::uint64_t{(w & ~tracked_bits) != 0};
        };

        folded_.assign(p, 0);
        for (int i = 0; i < p; ++i) {
            std::uint64_t m = channel(store.domain(offset_ + i).word(0));
            for (int j = 1; j < k && m; ++j)
                m &= channel(store.domain(offset_ + j * p + i).word(0));
            if (!m)
                return PropStatus::failed;
            folded_[i] = m;
        }

        graph_.reset(p, p);
        for (int i = 0; i < p; ++i) {
            std::uint64_t bits = folded_[i] & tracked_bits;
            while (bits) {
                Value d = std::countr_zero(bits);
                bits &= bits - 1;
                graph_.add_edge(tracked_index(d), i);
            }
            if (folded_[i] & 1)
                for (int u = ns; u < p; ++u)
                    graph_.add_edge(u, i);
        }
        if (maximum_matching(graph_, matching_) < p)
            return PropStatus::failed;

        // per place: tracked values with no surviving edge, and whether
        // any filler can still sit there (dummy copies are symmetric)
        std::vector<std::uint64_t> drop(p);
        std::vector<char> keep_dummy(p, 0);
        for (int i = 0; i < p; ++i)
            drop[i] = tracked_bits & ~folded_[i];
        for (auto [u, i] : unsupported_edges(graph_, matching_)) {
            if (u < ns)
                drop[i] |= std::uint64_t{1} << spec_.tracked[u];
            else
                folded_[i] &= ~std::uint64_t{1};  // filler lost this place
        }
        for (int i = 0; i < p; ++i)
            keep_dummy[i] = ns < p && (folded_[i] & 1);

        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < k; ++j) {
                VarId x = offset_ + j * p + i;
                std::uint64_t doomed = store.domain(x).word(0) & drop[i];
                if (!keep_dummy[i])
                    doomed |= store.domain(x).word(0) & ~tracked_bits;
                while (doomed) {
                    Value v = std::countr_zero(doomed);
                    doomed &= doomed - 1;
                    if (store.remove(x, v) == ChangeEvent::would_empty)
                        return PropStatus::failed;
                }
            }
        }
        return PropStatus::consistent;
    }

    PropStatus propagate_generic(VariableStore& store) {
        const int p = spec_.period;
        const int k = spec_.repeats;
        const int ns = static_cast<int>(spec_.tracked.size());

        FoldedDomains folded = fold_domains(store, spec_, offset_);
        if (folded.any_empty())
            return PropStatus::failed;
        auto vg = build_value_graph(folded, spec_);
        if (!vg)
            return PropStatus::failed;
        if (maximum_matching(vg->graph, matching_) < p)
            return PropStatus::failed;

        // dummy copies share their adjacency, so one unsupported dummy
        // edge at a place means no filler can sit there
        std::vector<std::vector<char>> drop(p);
        std::vector<char> drop_dummy(p, 0);
        for (auto& c : drop)
            c.assign(ns, 0);
        for (auto [u, i] : unsupported_edges(vg->graph, matching_)) {
            if (u < ns)
                drop[i][u] = 1;
            else
                drop_dummy[i] = 1;
        }
        // values absent from a folded class must leave the aligned domains
        for (int i = 0; i < p; ++i) {
            std::vector<char> present(ns, 0);
            bool dummy_present = false;
            for (Value v : folded.classes[i]) {
                if (v == dummy_value)
                    dummy_present = true;
                else
                    present[tracked_index(v)] = 1;
            }
            for (int u = 0; u < ns; ++u)
                if (!present[u])
                    drop[i][u] = 1;
            if (!dummy_present || vg->num_dummies == 0)
                drop_dummy[i] = 1;
        }

        for (int i = 0; i < p; ++i) {
            for (int u = 0; u < ns; ++u) {
                if (!drop[i][u])
                    continue;
                Value d = spec_.tracked[u];
                for (int j = 0; j < k; ++j)
                    if (store.remove(offset_ + j * p + i, d) ==
                        ChangeEvent::would_empty)
                        return PropStatus::failed;
            }
            if (drop_dummy[i]) {
                for (int j = 0; j < k; ++j) {
                    VarId x = offset_ + j * p + i;
                    std::vector<Value> others;
                    store.domain(x).for_each([&](Value v) {
                        if (!spec_.tracks(v))
                            others.push_back(v);
                    });
                    for (Value v : others)
                        if (store.remove(x, v) == ChangeEvent::would_empty)
                            return PropStatus::failed;
                }
            }
        }
        return PropStatus::consistent;
    }

    int tracked_index(Value v) const {
        return static_cast<int>(
            std::lower_bound(spec_.tracked.begin(), spec_.tracked.end(), v) -
            spec_.tracked.begin());
    }

    Spacing1Spec spec_;
    std::vector<VarId> watched_;
    int offset_ = 0;
    Matching matching_;
    BipartiteGraph graph_;               // reused across invocations
    std::vector<std::uint64_t> folded_;  // scratch for the fast path
};

}  // namespace spacing
