#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spacing/alldifferent.hpp"
#include "spacing/intervoice.hpp"
#include "spacing/search.hpp"
#include "spacing/spacing1.hpp"
#include "spacing/spacing_sb.hpp"

namespace spacing {

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unbiased draw in [0, bound) from a mt19937_64 stream. Standard-library
/// distributions are implementation-defined, so bounded draws are done by
/// rejection to keep instances reproducible across platforms.
inline std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound == 0)
        throw std::invalid_argument("draw_below: zero bound");
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

inline int draw_range(std::mt19937_64& rng, int lo, int hi) {
    if (hi < lo)
        throw std::invalid_argument("draw_range: empty range");
    return lo + static_cast<int>(draw_below(rng, hi - lo + 1));
}

struct RhythmVoice {
    int period = 1;   // p_l
    int repeats = 1;  // k_l
    int onsets = 0;   // m_l
};

/// A multi-voice rhythm problem. Voice l owns the onset value ids
/// first_onset(l) .. first_onset(l)+m_l-1; id 0 is the dummy. `removed`
/// lists (position, value) pairs excluded from the initial domains,
/// positions 1-based.
struct RhythmInstance {
    std::vector<RhythmVoice> voices;
    int length = 0;  // n
    std::vector<std::pair<int, Value>> removed;
    std::uint64_t seed = 0;

    int num_voices() const { return static_cast<int>(voices.size()); }

    int first_onset(int l) const {  // l is 0-based
        int id = 1;
        for (int i = 0; i < l; ++i)
            id += voices[i].onsets;
        return id;
    }

    int total_onsets() const {
        int m = 0;
        for (const auto& v : voices)
            m += v.onsets;
        return m;
    }

    std::vector<Value> onset_values(int l) const {
        std::vector<Value> out(voices[l].onsets);
        int base = first_onset(l);
        for (int i = 0; i < voices[l].onsets; ++i)
            out[i] = base + i;
        return out;
    }

    int voice_of(Value d) const {
        int id = 1;
        for (int l = 0; l < num_voices(); ++l) {
            if (d >= id && d < id + voices[l].onsets)
                return l;
            id += voices[l].onsets;
        }
        return -1;
    }

    void validate() const {
        if (voices.empty() || length < 1)
            throw DataError("instance: need at least one voice and n >= 1");
        for (const auto& v : voices) {
            if (v.period < 1 || v.repeats < 1 || v.onsets < 0 ||
                v.onsets > v.period)
                throw DataError("instance: bad voice parameters");
            if (v.period * v.repeats > length)
                throw DataError("instance: p*k exceeds n");
        }
        for (auto [pos, val] : removed)
            if (pos < 1 || pos > length || val < 0 || val > total_onsets())
                throw DataError("instance: removal out of range");
    }
};

/// Random instance following the published protocol: voice 2 is 4 +- 1
/// beats longer than voice 1, every later voice is twice the voice two
/// before it +- 3 beats, repeats fill the sequence, and onsets occupy
/// about 75% of the beats, spread evenly over the voices.
///
/// Draw order from mt19937_64(seed): p_2, then p_3..p_h (one draw each).
/// The onset split is deterministic.
inline RhythmInstance generate_instance(int h, int p1, int kh,
                                        std::uint64_t seed) {
    if (h < 1 || p1 < 2 || kh < 1)
        throw std::invalid_argument("generate_instance: need h >= 1, p1 >= 2, kh >= 1");
    std::mt19937_64 rng(seed);

    std::vector<int> p(h);
    p[0] = p1;
    if (h >= 2)
        p[1] = p1 + 4 + draw_range(rng, -1, 1);
    for (int l = 2; l < h; ++l)
        p[l] = 2 * p[l - 2] + draw_range(rng, -3, 3);

    const int n = p[h - 1] * kh;
    std::vector<int> k(h);
    k[h - 1] = kh;
    for (int l = 0; l + 1 < h; ++l) {
        k[l] = n / p[l];
        if (k[l] < 1)
            throw GenerationError("generate_instance: a voice does not fit the sequence");
    }

    // Onset split: target about 0.75*n occupied beats, one even quota per
    // voice, m_l = quota/k_l rounded, capped at p_l; leftover beats go to
    // the emptiest voice while they fit.
    const long long target = std::llround(0.75 * n);
    std::vector<int> m(h);
    long long placed = 0;
    for (int l = 0; l < h; ++l) {
        long long quota = target / h + (l < target % h ? 1 : 0);
        long long ml = (2 * quota + k[l]) / (2 * k[l]);  // round half up
        m[l] = static_cast<int>(std::min<long long>(std::max<long long>(ml, 1), p[l]));
        placed += static_cast<long long>(m[l]) * k[l];
    }
    while (placed < target) {
        int pick = -1;
        for (int l = 0; l < h; ++l) {
            if (m[l] >= p[l])
                continue;
            if (pick < 0 ||
                static_cast<long long>(m[l]) * p[pick] <
                    static_cast<long long>(m[pick]) * p[l])
                pick = l;
        }
        if (pick < 0)
            throw GenerationError("generate_instance: onset caps exhausted");
        if (2 * (target - placed) < k[pick])
            break;  // an extra onset would overshoot
        ++m[pick];
        placed += k[pick];
    }

    RhythmInstance inst;
    inst.length = n;
    inst.seed = seed;
    for (int l = 0; l < h; ++l)
        inst.voices.push_back({p[l], k[l], m[l]});
    inst.validate();
    return inst;
}

/// Extended problem: removes floor(fraction * total initial domain size)
/// uniformly sampled (position, onset) pairs without replacement. The
/// dummy value is never removed, so no domain can be emptied.
inline RhythmInstance extend_instance(const RhythmInstance& inst,
                                      double fraction, std::uint64_t seed) {
    if (fraction < 0 || fraction >= 1)
        throw std::invalid_argument("extend_instance: need 0 <= fraction < 1");
    RhythmInstance out = inst;
    const int n = inst.length;
    const int m = inst.total_onsets();
    const long long domain_sum =
        static_cast<long long>(n) * (m + 1) -
        static_cast<long long>(inst.removed.size());
    long long want = static_cast<long long>(fraction * domain_sum);
    if (want <= 0)
        return out;

    std::vector<char> already(static_cast<std::size_t>(n) * m, 0);
    for (auto [pos, val] : inst.removed)
        if (val >= 1)
            already[static_cast<std::size_t>(pos - 1) * m + (val - 1)] = 1;
    std::vector<std::uint32_t> pool;
    pool.reserve(static_cast<std::size_t>(n) * m);
    for (int pos = 1; pos <= n; ++pos)
        for (Value val = 1; val <= m; ++val)
            if (!already[static_cast<std::size_t>(pos - 1) * m + (val - 1)])
                pool.push_back(static_cast<std::uint32_t>((pos - 1) * m + (val - 1)));

    std::mt19937_64 rng(seed);
    long long take = std::min<long long>(want, static_cast<long long>(pool.size()));
    for (long long i = 0; i < take; ++i) {
        std::size_t j = i + draw_below(rng, pool.size() - i);
        std::swap(pool[i], pool[j]);
        int pos = static_cast<int>(pool[i] / m) + 1;
        Value val = static_cast<Value>(pool[i] % m) + 1;
        out.removed.emplace_back(pos, val);
    }
    std::sort(out.removed.begin(), out.removed.end());
    return out;
}

enum class ModelKind { om, sm, sb, sr };

inline const char* model_name(ModelKind k) {
    switch (k) {
        case ModelKind::om: return "om";
        case ModelKind::sm: return "sm";
        case ModelKind::sb: return "sb";
        case ModelKind::sr: return "sr";
    }
    return "?";
}

inline ModelKind model_from_name(const std::string& s) {
    if (s == "om") return ModelKind::om;
    if (s == "sm") return ModelKind::sm;
    if (s == "sb") return ModelKind::sb;
    if (s == "sr") return ModelKind::sr;
    throw std::invalid_argument("unknown model: " + s);
}

/// A solvable encoding of an instance: initial domains, propagators and
/// enough metadata to decode solutions.
struct BuiltModel {
    ModelKind kind = ModelKind::sm;
    RhythmInstance instance;
    VariableStore store;
    std::vector<std::unique_ptr<Propagator>> propagators;
    std::vector<char> preferred;  // value id -> branch on it first
    bool root_failed = false;     // an initial domain came out empty
    // OM only: variable i is onset om_vars[i].second of voice om_vars[i].first
    std::vector<std::pair<int, Value>> om_vars;

    std::vector<Propagator*> propagator_ptrs() const {
        std::vector<Propagator*> out;
        out.reserve(propagators.size());
        for (const auto& p : propagators)
            out.push_back(p.get());
        return out;
    }
};

namespace detail {

inline std::vector<std::vector<Value>> sm_domains(const RhythmInstance& inst) {
    const int m = inst.total_onsets();
    std::vector<Value> full;
    full.reserve(m + 1);
    for (Value v = 0; v <= m; ++v)
        full.push_back(v);
    std::vector<std::vector<Value>> domains(inst.length, full);
    for (auto [pos, val] : inst.removed) {
        auto& d = domains[pos - 1];
        d.erase(std::remove(d.begin(), d.end(), val), d.end());
    }
    return domains;
}

inline bool any_empty(const std::vector<std::vector<Value>>& domains) {
    for (const auto& d : domains)
        if (d.empty())
            return true;
    return false;
}

}  // namespace detail

/// Onset-time model: one variable per onset holding its place in the
/// voice's period, AllDifferent inside a voice and pairwise offset
/// disequalities across voices. Dummy removals have no image here and
/// are skipped.
inline BuiltModel build_om(const RhythmInstance& inst) {
    inst.validate();
    BuiltModel model;
    model.kind = ModelKind::om;
    model.instance = inst;

    const int h = inst.num_voices();
    std::vector<std::vector<std::vector<Value>>> dom_by_voice(h);
    for (int l = 0; l < h; ++l) {
        std::vector<Value> places;
        for (int i = 1; i <= inst.voices[l].period; ++i)
            places.push_back(i);
        dom_by_voice[l].assign(inst.voices[l].onsets, places);
    }
    for (auto [pos, val] : inst.removed) {
        if (val == dummy_value)
            continue;  // "this place must hold an onset" is not expressible
        int l = inst.voice_of(val);
        if (pos > inst.voices[l].repeats * inst.voices[l].period)
            continue;
        int place = (pos - 1) % inst.voices[l].period + 1;
        auto& d = dom_by_voice[l][val - inst.first_onset(l)];
        d.erase(std::remove(d.begin(), d.end(), place), d.end());
    }

    std::vector<std::vector<Value>> domains;
    for (int l = 0; l < h; ++l)
        for (auto& d : dom_by_voice[l]) {
            if (d.empty()) {
                model.root_failed = true;
                return model;
            }
            domains.push_back(std::move(d));
        }
    model.store = VariableStore(domains);

    std::vector<int> var_base(h + 1, 0);
    for (int l = 0; l < h; ++l) {
        var_base[l + 1] = var_base[l] + inst.voices[l].onsets;
        for (int i = 0; i < inst.voices[l].onsets; ++i)
            model.om_vars.emplace_back(l, inst.first_onset(l) + i);
    }
    for (int l = 0; l < h; ++l) {
        if (inst.voices[l].onsets == 0)
            continue;
        std::vector<VarId> vars;
        for (int i = 0; i < inst.voices[l].onsets; ++i)
            vars.push_back(var_base[l] + i);
        model.propagators.push_back(
            std::make_unique<AllDifferentPropagator>(vars));
    }
    for (int l1 = 0; l1 < h; ++l1)
        for (int l2 = l1 + 1; l2 < h; ++l2)
            for (int i1 = 0; i1 < inst.voices[l1].onsets; ++i1)
                for (int i2 = 0; i2 < inst.voices[l2].onsets; ++i2)
                    for (int j1 = 0; j1 < inst.voices[l1].repeats; ++j1)
                        for (int j2 = 0; j2 < inst.voices[l2].repeats; ++j2)
                            model.propagators.push_back(
                                std::make_unique<NeqOffsetPropagator>(
                                    var_base[l1] + i1,
                                    j1 * inst.voices[l1].period,
                                    var_base[l2] + i2,
                                    j2 * inst.voices[l2].period));
    return model;
}

/// Beat-sequence model: X_j holds the onset played at beat j (or the
/// dummy), one Spacing1 filter per voice.
inline BuiltModel build_sm(const RhythmInstance& inst) {
    inst.validate();
    BuiltModel model;
    model.kind = ModelKind::sm;
    model.instance = inst;
    auto domains = detail::sm_domains(inst);
    if (detail::any_empty(domains)) {
        model.root_failed = true;
        return model;
    }
    model.store = VariableStore(domains);
    model.preferred.assign(inst.total_onsets() + 1, 1);
    model.preferred[dummy_value] = 0;
    for (int l = 0; l < inst.num_voices(); ++l)
        model.propagators.push_back(std::make_unique<Spacing1Propagator>(
            Spacing1Spec(inst.onset_values(l), inst.voices[l].period,
                         inst.voices[l].repeats, inst.length)));
    return model;
}

/// Count-only variant: every onset of voice l collapses onto the single
/// value first_onset(l). Undefined for instances with removals, because
/// removals tell individual onsets apart.
inline BuiltModel build_sb(const RhythmInstance& inst) {
    inst.validate();
    if (!inst.removed.empty())
        throw DataError("sb model: instance removals are not representable");
    BuiltModel model;
    model.kind = ModelKind::sb;
    model.instance = inst;

    std::vector<Value> values{dummy_value};
    for (int l = 0; l < inst.num_voices(); ++l)
        values.push_back(inst.first_onset(l));
    std::vector<std::vector<Value>> domains(inst.length, values);
    model.store = VariableStore(domains);
    model.preferred.assign(inst.total_onsets() + 1, 0);
    for (int l = 0; l < inst.num_voices(); ++l) {
        model.preferred[inst.first_onset(l)] = 1;
        model.propagators.push_back(std::make_unique<SpacingSbPropagator>(
            SbSpec(inst.first_onset(l), inst.voices[l].onsets,
                   inst.voices[l].period, inst.voices[l].repeats,
                   inst.length)));
    }
    return model;
}

/// SM plus the inter-voice blocking rule for every ordered voice pair.
inline BuiltModel build_sr(const RhythmInstance& inst) {
    BuiltModel model = build_sm(inst);
    model.kind = ModelKind::sr;
    if (model.root_failed)
        return model;
    for (int l1 = 0; l1 < inst.num_voices(); ++l1)
        for (int l2 = 0; l2 < inst.num_voices(); ++l2) {
            if (l1 == l2)
                continue;
            model.propagators.push_back(std::make_unique<InterVoicePropagator>(
                Spacing1Spec(inst.onset_values(l1), inst.voices[l1].period,
                             inst.voices[l1].repeats, inst.length),
                Spacing1Spec(inst.onset_values(l2), inst.voices[l2].period,
                             inst.voices[l2].repeats, inst.length)));
        }
    return model;
}

inline BuiltModel build_model(const RhythmInstance& inst, ModelKind kind) {
    switch (kind) {
        case ModelKind::om: return build_om(inst);
        case ModelKind::sm: return build_sm(inst);
        case ModelKind::sb: return build_sb(inst);
        case ModelKind::sr: return build_sr(inst);
    }
    throw std::logic_error("build_model: bad kind");
}

/// Correspondence used to compare SM filtering with OM filtering:
/// place i is open for onset d of voice l iff d survives at beat i.
/// Returns one domain per OM variable, in build_om's variable order.
inline std::vector<std::vector<Value>> map_sm_to_om(
    const std::vector<std::vector<Value>>& sm_domains,
    const RhythmInstance& inst) {
    std::vector<std::vector<Value>> out;
    for (int l = 0; l < inst.num_voices(); ++l) {
        for (Value d : inst.onset_values(l)) {
            std::vector<Value> places;
            for (int i = 1; i <= inst.voices[l].period; ++i) {
                const auto& dom = sm_domains[i - 1];
                if (std::find(dom.begin(), dom.end(), d) != dom.end())
                    places.push_back(i);
            }
            out.push_back(std::move(places));
        }
    }
    return out;
}

/// Per-voice beat patterns of a solution: (place in first period, onset).
inline std::vector<std::vector<std::pair<int, Value>>> decode(
    const std::vector<Value>& assignment, const RhythmInstance& inst,
    ModelKind kind) {
    std::vector<std::vector<std::pair<int, Value>>> out(inst.num_voices());
    if (kind == ModelKind::om) {
        std::size_t idx = 0;
        for (int l = 0; l < inst.num_voices(); ++l)
            for (Value d : inst.onset_values(l)) {
                if (idx >= assignment.size())
                    throw DataError("decode: assignment too short");
                out[l].emplace_back(assignment[idx++], d);
            }
        for (auto& pattern : out)
            std::sort(pattern.begin(), pattern.end());
        return out;
    }
    if (static_cast<int>(assignment.size()) != inst.length)
        throw DataError("decode: assignment length mismatch");
    for (int l = 0; l < inst.num_voices(); ++l) {
        for (int i = 1; i <= inst.voices[l].period; ++i) {
            Value v = assignment[i - 1];
            bool mine = kind == ModelKind::sb
                            ? v == inst.first_onset(l)
                            : inst.voice_of(v) == l;
            if (mine)
                out[l].emplace_back(i, v);
        }
    }
    return out;
}

// ---- instance file format ----------------------------------------------

inline nlohmann::ordered_json instance_to_json(const RhythmInstance& inst) {
    nlohmann::ordered_json j;
    j["voices"] = nlohmann::ordered_json::array();
    for (const auto& v : inst.voices)
        j["voices"].push_back({{"p", v.period}, {"k", v.repeats}, {"m", v.onsets}});
    j["n"] = inst.length;
    j["removed"] = nlohmann::ordered_json::array();
    for (auto [pos, val] : inst.removed)
        j["removed"].push_back({pos, val});
    j["seed"] = inst.seed;
    return j;
}

inline RhythmInstance instance_from_json(const nlohmann::json& j) {
    RhythmInstance inst;
    try {
        for (const auto& v : j.at("voices"))
            inst.voices.push_back({v.at("p").get<int>(), v.at("k").get<int>(),
                                   v.at("m").get<int>()});
        inst.length = j.at("n").get<int>();
        if (j.contains("removed"))
            for (const auto& r : j.at("removed"))
                inst.removed.emplace_back(r.at(0).get<int>(),
                                          r.at(1).get<Value>());
        inst.seed = j.value("seed", std::uint64_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("instance: ") + e.what());
    }
    inst.validate();
    return inst;
}

inline void save_instance(const RhythmInstance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write " + path);
    out << instance_to_json(inst).dump(2) << '\n';
}

inline RhythmInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot read " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("instance: ") + e.what());
    }
    return instance_from_json(j);
}

}  // namespace spacing
