#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "spacing/core.hpp"

namespace spacing {

/// Tuple (S, A, B) with k occurrences: the i+1-st occurrence of each
/// tracked value must land between a_i and b_i places after the i-th.
struct SpacingSpec {
    std::vector<Value> tracked;  // S, sorted, dummy excluded
    std::vector<int> min_gap;    // A, length k-1
    std::vector<int> max_gap;    // B, length k-1
    int repeats = 1;             // k
    int length = 0;              // n

    SpacingSpec(std::vector<Value> s, std::vector<int> a, std::vector<int> b,
                int k, int n)
        : tracked(std::move(s)),
          min_gap(std::move(a)),
          max_gap(std::move(b)),
          repeats(k),
          length(n) {
        if (k < 1 || n < 1)
            throw std::invalid_argument("SpacingSpec: k and n must be positive");
        if (static_cast<int>(min_gap.size()) != k - 1 ||
            static_cast<int>(max_gap.size()) != k - 1)
            throw std::invalid_argument("SpacingSpec: A and B must have length k-1");
        for (int i = 0; i + 1 < k; ++i)
            if (min_gap[i] < 1 || min_gap[i] > max_gap[i] || max_gap[i] > n)
                throw std::invalid_argument("SpacingSpec: need 1 <= a_i <= b_i <= n");
        std::sort(tracked.begin(), tracked.end());
        tracked.erase(std::unique(tracked.begin(), tracked.end()), tracked.end());
        for (Value d : tracked)
            if (d <= dummy_value)
                throw std::invalid_argument(
                    "SpacingSpec: tracked values must be positive");
    }
};

/// Number of occurrences of d in a prefix.
inline int occ(Value d, std::span<const Value> prefix) {
    int c = 0;
    for (Value v : prefix)
        c += v == d;
    return c;
}

inline std::vector<int> occurrence_positions(Value d,
                                             std::span<const Value> x) {
    std::vector<int> pos;  // 1-based
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] == d)
            pos.push_back(static_cast<int>(i) + 1);
    return pos;
}

/// Each tracked value occurs either not at all or at least k times, with
/// the gap between the i-th and i+1-st occurrence inside [a_i, b_i].
/// Occurrences beyond the k-th are unconstrained.
inline bool check_spacing(std::span<const Value> x, const SpacingSpec& spec) {
    for (Value d : spec.tracked) {
        int count = 0, prev = 0;
        for (int q = 1; q <= static_cast<int>(x.size()); ++q) {
            if (x[q - 1] != d)
                continue;
            if (count >= 1 && count < spec.repeats) {
                int gap = q - prev;
                if (gap < spec.min_gap[count - 1] || gap > spec.max_gap[count - 1])
                    return false;
            }
            ++count;
            prev = q;
        }
        if (count > 0 && count < spec.repeats)
            return false;
    }
    return true;
}

/// check_spacing plus: every tracked value occurs.
inline bool check_spacing_forced(std::span<const Value> x,
                                 const SpacingSpec& spec) {
    for (Value d : spec.tracked)
        if (occ(d, x) == 0)
            return false;
    return check_spacing(x, spec);
}

/// One-voice restriction: every d in S occurs exactly k times, first
/// occurrence within the first p places, consecutive occurrences exactly
/// p apart (so all occurrences lie within the first k*p places).
inline bool check_spacing1(std::span<const Value> x,
                           std::span<const Value> s, int p, int k) {
    for (Value d : s) {
        int count = 0, prev = 0;
        for (int q = 1; q <= static_cast<int>(x.size()); ++q) {
            if (x[q - 1] != d)
                continue;
            if (count == 0) {
                if (q > p)
                    return false;
            } else if (q - prev != p) {
                return false;
            }
            ++count;
            prev = q;
        }
        if (count != k)
            return false;
    }
    return true;
}

/// Counting variant: d occupies exactly m places in the first period and
/// that occupancy pattern repeats in each of the k periods.
inline bool check_spacing_sb(std::span<const Value> x, Value d, int m, int p,
                             int k) {
    int in_first = 0;
    for (int q = 1; q <= p && q <= static_cast<int>(x.size()); ++q)
        in_first += x[q - 1] == d;
    if (in_first != m)
        return false;
    for (int q = 1; q <= static_cast<int>(x.size()); ++q) {
        bool here = x[q - 1] == d;
        bool expected = q <= p * k && x[(q - 1) % p] == d;
        if (here != expected)
            return false;
    }
    return true;
}

struct VoiceSpec {
    std::vector<Value> tracked;  // S_l
    int period = 1;              // p_l
    int repeats = 1;             // k_l
};

/// Conjunction of one-voice constraints over the same sequence.
/// The tracked sets must be pairwise disjoint.
inline bool check_spacing_h(std::span<const Value> x,
                            std::span<const VoiceSpec> voices) {
    std::set<Value> seen;
    for (const VoiceSpec& v : voices) {
        for (Value d : v.tracked)
            if (!seen.insert(d).second)
                throw std::invalid_argument(
                    "check_spacing_h: tracked sets must be pairwise disjoint");
    }
    for (const VoiceSpec& v : voices)
        if (!check_spacing1(x, v.tracked, v.period, v.repeats))
            return false;
    return true;
}

using Checker = std::function<bool(std::span<const Value>)>;

struct OversizeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::uint64_t domain_product(
    const std::vector<std::vector<Value>>& domains) {
    std::uint64_t prod = 1;
    for (const auto& d : domains) {
        if (d.empty())
            return 0;
        if (prod > (std::uint64_t{1} << 62) / d.size())
            return std::uint64_t{1} << 63;  // saturate
        prod *= d.size();
    }
    return prod;
}

/// Visits every assignment drawn from the domains, in lexicographic
/// order. Refuses oversized products rather than truncating the walk.
template <typename F>
inline void for_each_assignment(const std::vector<std::vector<Value>>& domains,
                                F&& visit, std::uint64_t cap = 10'000'000) {
    if (domains.empty())
        return;
    std::uint64_t prod = domain_product(domains);
    if (prod == 0)
        return;
    if (prod > cap)
        throw OversizeError("assignment enumeration: domain product exceeds cap");
    std::vector<std::vector<Value>> sorted = domains;
    for (auto& d : sorted)
        std::sort(d.begin(), d.end());
    const int n = static_cast<int>(domains.size());
    std::vector<int> idx(n, 0);
    std::vector<Value> cur(n);
    for (int i = 0; i < n; ++i)
        cur[i] = sorted[i][0];
    while (true) {
        visit(std::span<const Value>(cur));
        int i = n - 1;
        while (i >= 0 && idx[i] + 1 == static_cast<int>(sorted[i].size())) {
            idx[i] = 0;
            cur[i] = sorted[i][0];
            --i;
        }
        if (i < 0)
            break;
        ++idx[i];
        cur[i] = sorted[i][idx[i]];
    }
}

/// All assignments satisfying the checker, lexicographic order.
/// Deliberately naive; serves as ground truth in tests.
inline std::vector<std::vector<Value>> enumerate_supports(
    const std::vector<std::vector<Value>>& domains, const Checker& ok,
    std::uint64_t cap = 10'000'000) {
    std::vector<std::vector<Value>> out;
    for_each_assignment(
        domains,
        [&](std::span<const Value> cur) {
            if (ok(cur))
                out.emplace_back(cur.begin(), cur.end());
        },
        cap);
    return out;
}

struct DcResult {
    bool failed = false;
    std::vector<std::vector<Value>> domains;  // sorted per variable
};

/// Brute-force domain consistency: a value survives iff some enumerated
/// support uses it. Serves as the referee for every propagator.
inline DcResult dc_oracle(const std::vector<std::vector<Value>>& domains,
                          const Checker& ok,
                          std::uint64_t cap = 10'000'000) {
    DcResult res;
    std::vector<std::set<Value>> used(domains.size());
    bool any = false;
    for_each_assignment(
        domains,
        [&](std::span<const Value> cur) {
            if (!ok(cur))
                return;
            any = true;
            for (std::size_t i = 0; i < cur.size(); ++i)
                used[i].insert(cur[i]);
        },
        cap);
    if (!any) {
        res.failed = true;
        return res;
    }
    res.domains.resize(domains.size());
    for (std::size_t i = 0; i < domains.size(); ++i)
        res.domains[i].assign(used[i].begin(), used[i].end());
    return res;
}

}  // namespace spacing
