#pragma once

#include <deque>
#include <vector>

#include "spacing/core.hpp"

namespace spacing {

enum class PropStatus { consistent, failed };

/// A filtering algorithm attached to a set of watched variables.
/// Contract: sound (never removes a supported value of its own constraint)
/// and idempotent at fixpoint (a re-run with unchanged domains removes
/// nothing). Priority 0 propagators run before priority 1 ones.
class Propagator {
  public:
    virtual ~Propagator() = default;
    virtual const std::vector<VarId>& watched() const = 0;
    virtual PropStatus propagate(VariableStore& store) = 0;
    virtual int priority() const { return 0; }
};

/// FIFO propagation queue over two priority classes. A propagator is
/// re-enqueued whenever one of its watched variables changes.
class PropagationEngine {
  public:
    PropagationEngine(VariableStore& store, std::vector<Propagator*> props)
        : store_(&store), props_(std::move(props)) {
        watchers_.resize(store.num_vars());
        for (std::size_t i = 0; i < props_.size(); ++i)
            for (VarId x : props_[i]->watched())
                watchers_[x].push_back(static_cast<int>(i));
        in_queue_.assign(props_.size(), 0);
    }

    void seed_all() {
        for (std::size_t i = 0; i < props_.size(); ++i)
            enqueue(static_cast<int>(i));
    }

    void seed_watchers_of(VarId x) {
        for (int p : watchers_[x])
            enqueue(p);
    }

    /// Runs queued propagators to fixpoint. On failure the queue is
    /// cleared; the caller is expected to roll the store back.
    PropStatus propagate() {
        store_->clear_changed();
        while (true) {
            int p = pop();
            if (p < 0)
                return PropStatus::consistent;
            PropStatus st = props_[p]->propagate(*store_);
            if (st == PropStatus::failed) {
                reset_queue();
                store_->clear_changed();
                return PropStatus::failed;
            }
            for (VarId x : store_->changed())
                seed_watchers_of(x);
            store_->clear_changed();
        }
    }

    std::size_t num_propagators() const { return props_.size(); }

  private:
    void enqueue(int p) {
        if (!in_queue_[p]) {
            in_queue_[p] = 1;
            queues_[props_[p]->priority() != 0].push_back(p);
        }
    }

    int pop() {
        for (auto& q : queues_) {
            if (!q.empty()) {
                int p = q.front();
                q.pop_front();
                in_queue_[p] = 0;
                return p;
            }
        }
        return -1;
    }

    void reset_queue() {
        for (auto& q : queues_)
            q.clear();
        std::fill(in_queue_.begin(), in_queue_.end(), 0);
    }

    VariableStore* store_;
    std::vector<Propagator*> props_;
    std::vector<std::vector<int>> watchers_;
    std::deque<int> queues_[2];
    std::vector<char> in_queue_;
};

/// One-shot fixpoint over a fresh engine, seeding every propagator.
inline PropStatus propagate_fixpoint(VariableStore& store,
                                     const std::vector<Propagator*>& props) {
    PropagationEngine engine(store, props);
    engine.seed_all();
    return engine.propagate();
}

}  // namespace spacing
