#pragma once

#include <set>
#include <stdexcept>
#include <vector>

#include "spacing/spacing1.hpp"

namespace spacing {

struct InterVoiceCounts {
    int free_places = 0;        // u: first-period places of the second voice
                                // that may still hold one of its values
    std::vector<int> blocked;   // b_i per first-period place i of the first
                                // voice (1-based place i -> blocked[i-1])
};

/// Counting rule between two one-voice constraints on the same sequence.
/// Both constraints are expected to be at their own filtering fixpoint and
/// their tracked sets disjoint.
inline InterVoiceCounts intervoice_counts(const VariableStore& store,
                                          const Spacing1Spec& first,
                                          const Spacing1Spec& second) {
    for (Value d : first.tracked)
        if (second.tracks(d))
            throw std::invalid_argument(
                "intervoice_counts: tracked sets must be disjoint");

    FoldedDomains folded2 = fold_domains(store, second);
    std::vector<char> place_free(second.period, 0);
    InterVoiceCounts out;
    for (int x = 0; x < second.period; ++x) {
        for (Value v : folded2.classes[x]) {
            if (v != dummy_value) {
                place_free[x] = 1;
                break;
            }
        }
        out.free_places += place_free[x];
    }

    out.blocked.resize(first.period, 0);
    for (int i = 1; i <= first.period; ++i) {
        std::set<int> hit;  // aligned places, counted as a set
        for (int j = 0; j < first.repeats; ++j) {
            int beat = i + j * first.period;
            if (beat > second.repeats * second.period)
                continue;
            hit.insert((beat - 1) % second.period + 1);
        }
        int b = 0;
        for (int x : hit)
            b += place_free[x - 1];
        out.blocked[i - 1] = b;
    }
    return out;
}

/// Applies the blocking rule for one ordered voice pair: a place i of the
/// first voice whose assignment would block more free places than the
/// second voice can spare loses every first-voice value (and its aligned
/// copies). Incomplete but sound; scheduled after the one-voice filters.
class InterVoicePropagator : public Propagator {
  public:
    InterVoicePropagator(Spacing1Spec first, Spacing1Spec second)
        : first_(std::move(first)), second_(std::move(second)) {
        int n = std::max(first_.length, second_.length);
        watched_.resize(n);
        for (int i = 0; i < n; ++i)
            watched_[i] = i;
    }

    const std::vector<VarId>& watched() const override { return watched_; }
    int priority() const override { return 1; }

    PropStatus propagate(VariableStore& store) override {
        InterVoiceCounts counts = intervoice_counts(store, first_, second_);
        int spare =
            counts.free_places - static_cast<int>(second_.tracked.size());
        for (int i = 1; i <= first_.period; ++i) {
            if (counts.blocked[i - 1] <= spare)
                continue;
            for (int j = 0; j < first_.repeats; ++j) {
                VarId x = (i - 1) + j * first_.period;
                for (Value d : first_.tracked)
                    if (store.remove(x, d) == ChangeEvent::would_empty)
                        return PropStatus::failed;
            }
        }
        return PropStatus::consistent;
    }

  private:
    Spacing1Spec first_;
    Spacing1Spec second_;
    std::vector<VarId> watched_;
};

}  // namespace spacing
