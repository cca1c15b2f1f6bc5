#pragma once

#include <stdexcept>
#include <vector>

#include "spacing/propagation.hpp"

namespace spacing {

/// Counting restriction of Spacing1: value d occupies exactly m places of
/// the first period and the occupancy pattern repeats k times.
struct SbSpec {
    Value onset = 0;  // d
    int count = 0;    // m
    int period = 1;   // p
    int repeats = 1;  // k
    int length = 0;   // n

    SbSpec(Value d, int m, int p, int k, int n)
        : onset(d), count(m), period(p), repeats(k), length(n) {
        if (d <= dummy_value)
            throw std::invalid_argument("SbSpec: onset must be positive");
        if (p < 1 || k < 1 || p > n || p * k > n)
            throw std::invalid_argument("SbSpec: need 1 <= p <= n and p*k <= n");
        if (m < 0 || m > p)
            throw std::invalid_argument("SbSpec: need 0 <= m <= p");
    }
};

/// Linear-time filtering: counts u = places that may hold d and
/// v = places forced to d, fails iff u < m or v > m, pins d everywhere
/// when u = m and strips d from unforced places when v = m.
class SpacingSbPropagator : public Propagator {
  public:
    explicit SpacingSbPropagator(SbSpec spec, int first_var = 0)
        : spec_(spec), offset_(first_var) {
        watched_.resize(spec_.length);
        for (int i = 0; i < spec_.length; ++i)
            watched_[i] = first_var + i;
    }

    const std::vector<VarId>& watched() const override { return watched_; }
    const SbSpec& spec() const { return spec_; }

    PropStatus propagate(VariableStore& store) override {
        const Value d = spec_.onset;
        const int p = spec_.period;
        const int k = spec_.repeats;

        for (int x = p * k; x < spec_.length; ++x)
            if (store.remove(offset_ + x, d) == ChangeEvent::would_empty)
                return PropStatus::failed;

        // folded view per place: may_hold = d in every aligned domain,
        // forced = additionally some aligned domain is already {d}
        std::vector<char> may_hold(p, 1), forced(p, 0);
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < k; ++j) {
                const Domain& dom = store.domain(offset_ + j * p + i);
                if (!dom.contains(d)) {
                    may_hold[i] = 0;
                    break;
                }
                if (dom.is_singleton())
                    forced[i] = 1;
            }
        }
        int u = 0, v = 0;
        for (int i = 0; i < p; ++i) {
            u += may_hold[i];
            v += may_hold[i] && forced[i];
        }
        if (u < spec_.count || v > spec_.count)
            return PropStatus::failed;

        for (int i = 0; i < p; ++i) {
            bool pin = may_hold[i] && (forced[i] || u == spec_.count);
            bool strip = !may_hold[i] || (v == spec_.count && !forced[i]);
            for (int j = 0; j < k; ++j) {
                VarId x = offset_ + j * p + i;
                if (pin) {
                    if (store.assign(x, d) == ChangeEvent::would_empty)
                        return PropStatus::failed;
                } else if (strip) {
                    if (store.remove(x, d) == ChangeEvent::would_empty)
                        return PropStatus::failed;
                }
            }
        }
        return PropStatus::consistent;
    }

  private:
    SbSpec spec_;
    int offset_ = 0;
    std::vector<VarId> watched_;
};

}  // namespace spacing
