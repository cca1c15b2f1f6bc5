#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spacing {

/// Non-negative value identifier. Id 0 is reserved project-wide for the
/// dummy value standing for "anything outside the tracked set".
using Value = int;
using VarId = int;

inline constexpr Value dummy_value = 0;

/// Malformed or unrepresentable input data (instance files, removals...).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ChangeEvent {
    no_change,   // operation was a no-op
    changed,     // at least one value was removed
    would_empty  // refused: the operation would wipe the domain out
};

/// Finite set of value ids backed by a fixed-width bitset.
/// A Domain is never empty: mutations that would empty it are refused
/// by the store and reported as ChangeEvent::would_empty.
class Domain {
  public:
    Domain() = default;

    Domain(std::span<const Value> values, int universe) {
        if (values.empty())
            throw std::invalid_argument("Domain: empty value set");
        words_.assign((universe + 63) / 64, 0);
        for (Value v : values) {
            if (v < 0 || v >= universe)
                throw std::invalid_argument("Domain: value out of universe");
            if (!test(v)) {
                set(v);
                ++size_;
            }
        }
    }

    bool contains(Value v) const {
        return v >= 0 && v < capacity() && test(v);
    }

    int size() const { return size_; }
    bool is_singleton() const { return size_ == 1; }

    /// Smallest value present. Domain is never empty.
    Value min_value() const {
        for (size_t w = 0; w < words_.size(); ++w)
            if (words_[w])
                return static_cast<Value>(w * 64 + std::countr_zero(words_[w]));
        throw std::logic_error("Domain: empty");
    }

    /// The only value of a singleton domain.
    Value sole_value() const {
        if (size_ != 1)
            throw std::logic_error("Domain: not a singleton");
        return min_value();
    }

    std::vector<Value> values() const {
        std::vector<Value> out;
        out.reserve(size_);
        for_each([&](Value v) { out.push_back(v); });
        return out;
    }

    template <typename F>
    void for_each(F&& f) const {
        for (size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t bits = words_[w];
            while (bits) {
                int b = std::countr_zero(bits);
                f(static_cast<Value>(w * 64 + b));
                bits &= bits - 1;
            }
        }
    }

    bool operator==(const Domain& o) const {
        return size_ == o.size_ && words_ == o.words_;
    }

    // bitset blocks, little-endian: value v lives in word(v / 64)
    int num_words() const { return static_cast<int>(words_.size()); }
    std::uint64_t word(int i) const { return words_[i]; }

  private:
    friend class VariableStore;

    int capacity() const { return static_cast<int>(words_.size() * 64); }
    bool test(Value v) const { return (words_[v / 64] >> (v % 64)) & 1; }
    void set(Value v) { words_[v / 64] |= std::uint64_t{1} << (v % 64); }
    void clear(Value v) { words_[v / 64] &= ~(std::uint64_t{1} << (v % 64)); }

    // raw mutation, used by the trail
    void raw_remove(Value v) { clear(v); --size_; }
    void raw_add(Value v) { set(v); ++size_; }

    std::vector<std::uint64_t> words_;
    int size_ = 0;
};

/// Indexed domains with a chronological removal trail. Checkpoints mark
/// trail positions; rollback restores every domain bit-exactly.
class VariableStore {
  public:
    struct Mark {
        std::size_t depth = 0;
    };

    VariableStore() = default;

    explicit VariableStore(const std::vector<std::vector<Value>>& domains) {
        int universe = 1;
        for (const auto& d : domains)
            for (Value v : d)
                universe = std::max(universe, v + 1);
        universe_ = universe;
        domains_.reserve(domains.size());
        for (const auto& d : domains)
            domains_.emplace_back(std::span<const Value>(d), universe);
        in_changed_.assign(domains.size(), 0);
    }

    int num_vars() const { return static_cast<int>(domains_.size()); }
    int universe_size() const { return universe_; }

    const Domain& domain(VarId x) const { return domains_.at(x); }

    bool all_assigned() const {
        for (const Domain& d : domains_)
            if (!d.is_singleton())
                return false;
        return true;
    }

    std::vector<Value> assignment() const {
        std::vector<Value> out(domains_.size());
        for (std::size_t i = 0; i < domains_.size(); ++i)
            out[i] = domains_[i].sole_value();
        return out;
    }

    ChangeEvent remove(VarId x, Value v) {
        Domain& d = domains_[x];
        if (!d.contains(v))
            return ChangeEvent::no_change;
        if (d.size() == 1)
            return ChangeEvent::would_empty;
        d.raw_remove(v);
        trail_.push_back({x, v});
        mark_changed(x);
        return ChangeEvent::changed;
    }

    /// Reduce D(x) to {v}. Fails (no mutation) when v is absent.
    ChangeEvent assign(VarId x, Value v) {
        Domain& d = domains_[x];
        if (!d.contains(v))
            return ChangeEvent::would_empty;
        if (d.size() == 1)
            return ChangeEvent::no_change;
        std::uint64_t keep_word = std::uint64_t{1} << (v % 64);
        for (std::size_t w = 0; w < d.words_.size(); ++w) {
            std::uint64_t bits = d.words_[w];
            if (static_cast<int>(w) == v / 64)
                bits &= ~keep_word;
            while (bits) {
                int b = std::countr_zero(bits);
                Value rm = static_cast<Value>(w * 64 + b);
                d.raw_remove(rm);
                trail_.push_back({x, rm});
                bits &= bits - 1;
            }
        }
        mark_changed(x);
        return ChangeEvent::changed;
    }

    Mark checkpoint() {
        marks_.push_back(trail_.size());
        return Mark{marks_.size() - 1};
    }

    void rollback(Mark m) {
        if (m.depth >= marks_.size())
            throw std::logic_error("rollback: mark already consumed");
        std::size_t target = marks_[m.depth];
        while (trail_.size() > target) {
            const TrailEntry& e = trail_.back();
            domains_[e.var].raw_add(e.value);
            trail_.pop_back();
        }
        marks_.resize(m.depth);
    }

    std::size_t checkpoint_depth() const { return marks_.size(); }

    /// Variables changed since the last clear, in first-change order.
    const std::vector<VarId>& changed() const { return changed_; }

    void clear_changed() {
        for (VarId x : changed_)
            in_changed_[x] = 0;
        changed_.clear();
    }

    std::vector<std::vector<Value>> snapshot() const {
        std::vector<std::vector<Value>> out;
        out.reserve(domains_.size());
        for (const Domain& d : domains_)
            out.push_back(d.values());
        return out;
    }

  private:
    struct TrailEntry {
        VarId var;
        Value value;
    };

    void mark_changed(VarId x) {
        if (!in_changed_[x]) {
            in_changed_[x] = 1;
            changed_.push_back(x);
        }
    }

    std::vector<Domain> domains_;
    std::vector<TrailEntry> trail_;
    std::vector<std::size_t> marks_;
    std::vector<VarId> changed_;
    std::vector<char> in_changed_;
    int universe_ = 1;
};

}  // namespace spacing
