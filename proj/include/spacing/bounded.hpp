#pragma once

#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "spacing/propagation.hpp"
#include "spacing/semantics.hpp"

namespace spacing {

/// Layered transition graph accepting exactly the sequences that satisfy
/// a Spacing constraint with a small tracked set. A state records, per
/// tracked value, how many occurrences were seen (capped at k) and the
/// gap since the last one; states that can no longer meet a maximum
/// distance are never created.
class BoundedSpacingGraph {
  public:
    static constexpr int default_cap = 3;

    BoundedSpacingGraph(const SpacingSpec& spec,
                        const std::vector<std::vector<Value>>& domains,
                        int tracked_cap = default_cap)
        : spec_(&spec) {
        const int ns = static_cast<int>(spec.tracked.size());
        if (ns > tracked_cap)
            throw std::invalid_argument(
                "BoundedSpacingGraph: tracked set larger than configured cap");
        if (static_cast<int>(domains.size()) != spec.length)
            throw std::invalid_argument(
                "BoundedSpacingGraph: domain count does not match n");

        // per-value state codes: 0 = not seen, 1 = done (>= k occurrences),
        // 2 + offset(t) + g for t in 1..k-1, g in 0..b_t-1
        strides_.assign(ns + 1, 0);
        gap_offset_.assign(spec.repeats, 0);
        int per_value = 2;
        for (int t = 1; t < spec.repeats; ++t) {
            gap_offset_[t] = per_value;
            per_value += spec.max_gap[t - 1];
        }
        per_value_states_ = per_value;
        strides_[0] = 1;
        for (int d = 0; d < ns; ++d)
            strides_[d + 1] = strides_[d] * per_value;

        build(domains);
    }

    bool satisfiable() const { return satisfiable_; }

    /// supported(i, u): some accepted path consumes value u at position
    /// i+1. u indexes spec.tracked; u == |S| stands for any untracked value.
    bool supported(int layer, int label) const {
        return supported_[layer][label];
    }

    const SpacingSpec& spec() const { return *spec_; }

  private:
    struct Edge {
        int from, to;  // state indices within adjacent layers
        int label;     // index into tracked, or |S| for "untracked"
    };

    void build(const std::vector<std::vector<Value>>& domains) {
        const int n = spec_->length;
        const int ns = static_cast<int>(spec_->tracked.size());
        const int k = spec_->repeats;

        std::vector<std::unordered_map<std::uint64_t, int>> index(n + 1);
        std::vector<std::vector<std::uint64_t>> states(n + 1);
        std::vector<std::vector<Edge>> edges(n);

        auto intern = [&](int layer, std::uint64_t code) {
            auto [it, fresh] = index[layer].try_emplace(
                code, static_cast<int>(states[layer].size()));
            if (fresh)
                states[layer].push_back(code);
            return it->second;
        };
        intern(0, 0);  // nothing seen yet

        auto unpack = [&](std::uint64_t code, int d) {
            return static_cast<int>((code / strides_[d]) % per_value_states_);
        };
        auto with = [&](std::uint64_t code, int d, int part) {
            return code - (std::uint64_t)unpack(code, d) * strides_[d] +
                   (std::uint64_t)part * strides_[d];
        };

        for (int i = 0; i < n; ++i) {
            bool has_untracked = false;
            std::vector<int> present;  // tracked indices present at X_{i+1}
            for (Value v : domains[i]) {
                auto it = std::lower_bound(spec_->tracked.begin(),
                                           spec_->tracked.end(), v);
                if (it != spec_->tracked.end() && *it == v)
                    present.push_back(
                        static_cast<int>(it - spec_->tracked.begin()));
                else
                    has_untracked = true;
            }
            for (int si = 0; si < static_cast<int>(states[i].size()); ++si) {
                std::uint64_t code = states[i][si];
                // consume an occurrence of tracked value d
                for (int d : present) {
                    int part = unpack(code, d);
                    int next_part;
                    if (part == 0) {
                        next_part = k == 1 ? 1 : gap_offset_[1];
                    } else if (part == 1) {
                        next_part = 1;  // occurrences beyond k are free
                    } else {
                        int t = occ_count(part);
                        int g = part - gap_offset_[t];
                        int delta = g + 1;
                        if (delta < spec_->min_gap[t - 1] ||
                            delta > spec_->max_gap[t - 1])
                            continue;
                        next_part = t + 1 == k ? 1 : gap_offset_[t + 1];
                    }
                    std::uint64_t next = advance_others(code, d, unpack, with);
                    if (next == dead_code)
                        continue;
                    next = with(next, d, next_part);
                    edges[i].push_back({si, intern(i + 1, next), d});
                }
                // consume a value outside the tracked set
                if (has_untracked) {
                    std::uint64_t next = advance_others(code, -1, unpack, with);
                    if (next != dead_code)
                        edges[i].push_back({si, intern(i + 1, next), ns});
                }
            }
        }

        // accepting: every tracked value unseen or done
        std::vector<std::vector<char>> alive(n + 1);
        for (int i = 0; i <= n; ++i)
            alive[i].assign(states[i].size(), 0);
        for (int si = 0; si < static_cast<int>(states[n].size()); ++si) {
            std::uint64_t code = states[n][si];
            bool ok = true;
            for (int d = 0; d < ns && ok; ++d) {
                int part = unpack(code, d);
                ok = part <= 1;
            }
            alive[n][si] = ok;
        }
        for (int i = n - 1; i >= 0; --i)
            for (const Edge& e : edges[i])
                if (alive[i + 1][e.to])
                    alive[i][e.from] = 1;

        satisfiable_ = !states[0].empty() && alive[0][0];

        supported_.assign(n, std::vector<char>(ns + 1, 0));
        if (!satisfiable_)
            return;
        // forward-built states are all reachable from the start
        for (int i = 0; i < n; ++i)
            for (const Edge& e : edges[i])
                if (alive[i][e.from] && alive[i + 1][e.to])
                    supported_[i][e.label] = 1;
    }

    int occ_count(int part) const {
        for (int t = spec_->repeats - 1; t >= 1; --t)
            if (part >= gap_offset_[t])
                return t;
        throw std::logic_error("BoundedSpacingGraph: bad state part");
    }

    static constexpr std::uint64_t dead_code = ~std::uint64_t{0};

    /// Advances the gap of every tracked value except `hit` by one step.
    /// Returns dead_code when some pending value runs past its window.
    template <typename Unpack, typename With>
    std::uint64_t advance_others(std::uint64_t code, int hit, Unpack&& unpack,
                                 With&& with) const {
        const int ns = static_cast<int>(spec_->tracked.size());
        std::uint64_t out = code;
        for (int d = 0; d < ns; ++d) {
            if (d == hit)
                continue;
            int part = unpack(code, d);
            if (part <= 1)
                continue;
            int t = occ_count(part);
            int g = part - gap_offset_[t];
            if (g + 1 >= spec_->max_gap[t - 1])
                return dead_code;  // next occurrence can no longer fit
            out = with(out, d, gap_offset_[t] + g + 1);
        }
        return out;
    }

    const SpacingSpec* spec_;
    std::vector<std::uint64_t> strides_;
    std::vector<int> gap_offset_;
    int per_value_states_ = 2;
    bool satisfiable_ = false;
    std::vector<std::vector<char>> supported_;
};

/// Domain-consistent propagator for Spacing with |S| = O(1): rebuilds the
/// layered graph from the current domains and removes every value used by
/// no accepted path.
class BoundedSpacingPropagator : public Propagator {
  public:
    explicit BoundedSpacingPropagator(SpacingSpec spec, int first_var = 0,
                                      int tracked_cap =
                                          BoundedSpacingGraph::default_cap)
        : spec_(std::move(spec)), offset_(first_var), cap_(tracked_cap) {
        if (static_cast<int>(spec_.tracked.size()) > cap_)
            throw std::invalid_argument(
                "BoundedSpacingPropagator: tracked set larger than cap");
        watched_.resize(spec_.length);
        for (int i = 0; i < spec_.length; ++i)
            watched_[i] = first_var + i;
    }

    const std::vector<VarId>& watched() const override { return watched_; }
    const SpacingSpec& spec() const { return spec_; }

    PropStatus propagate(VariableStore& store) override {
        std::vector<std::vector<Value>> domains(spec_.length);
        for (int i = 0; i < spec_.length; ++i)
            domains[i] = store.domain(offset_ + i).values();
        BoundedSpacingGraph graph(spec_, domains, cap_);
        if (!graph.satisfiable())
            return PropStatus::failed;
        const int ns = static_cast<int>(spec_.tracked.size());
        for (int i = 0; i < spec_.length; ++i) {
            for (Value v : domains[i]) {
                auto it = std::lower_bound(spec_.tracked.begin(),
                                           spec_.tracked.end(), v);
                int label = (it != spec_.tracked.end() && *it == v)
                                ? static_cast<int>(it - spec_.tracked.begin())
                                : ns;
                if (!graph.supported(i, label))
                    if (store.remove(offset_ + i, v) ==
                        ChangeEvent::would_empty)
                        return PropStatus::failed;
            }
        }
        return PropStatus::consistent;
    }

  private:
    SpacingSpec spec_;
    int offset_;
    int cap_;
    std::vector<VarId> watched_;
};

}  // namespace spacing
