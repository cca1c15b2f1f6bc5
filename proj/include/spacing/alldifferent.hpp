#pragma once

#include <stdexcept>
#include <vector>

#include "spacing/bipartite.hpp"
#include "spacing/propagation.hpp"

namespace spacing {

/// Domain-consistent AllDifferent over the value graph: maximum matching
/// must cover the variables, then edges in no maximum matching are pruned.
class AllDifferentPropagator : public Propagator {
  public:
    explicit AllDifferentPropagator(std::vector<VarId> vars)
        : vars_(std::move(vars)) {
        if (vars_.empty())
            throw std::invalid_argument("AllDifferent: no variables");
    }

    const std::vector<VarId>& watched() const override { return vars_; }

    PropStatus propagate(VariableStore& store) override {
        const int nu = static_cast<int>(vars_.size());
        const int nv = store.universe_size();
        BipartiteGraph g(nu, nv);
        for (int u = 0; u < nu; ++u)
            store.domain(vars_[u]).for_each(
                [&](Value v) { g.add_edge(u, v); });
        if (maximum_matching(g, matching_) < nu)
            return PropStatus::failed;
        for (auto [u, v] : unsupported_edges(g, matching_))
            if (store.remove(vars_[u], v) == ChangeEvent::would_empty)
                return PropStatus::failed;
        return PropStatus::consistent;
    }

  private:
    std::vector<VarId> vars_;
    Matching matching_;
};

/// Binary disequality with fixed offsets: x + cx != y + cy.
class NeqOffsetPropagator : public Propagator {
  public:
    NeqOffsetPropagator(VarId x, int cx, VarId y, int cy)
        : cx_(cx), cy_(cy), vars_{x, y} {}

    const std::vector<VarId>& watched() const override { return vars_; }

    PropStatus propagate(VariableStore& store) override {
        const Domain& dx = store.domain(vars_[0]);
        const Domain& dy = store.domain(vars_[1]);
        if (dx.is_singleton()) {
            Value forbidden = dx.sole_value() + cx_ - cy_;
            if (store.remove(vars_[1], forbidden) == ChangeEvent::would_empty)
                return PropStatus::failed;
        } else if (dy.is_singleton()) {
            Value forbidden = dy.sole_value() + cy_ - cx_;
            if (store.remove(vars_[0], forbidden) == ChangeEvent::would_empty)
                return PropStatus::failed;
        }
        return PropStatus::consistent;
    }

  private:
    int cx_, cy_;
    std::vector<VarId> vars_;
};

}  // namespace spacing
