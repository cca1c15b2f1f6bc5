// Filters a 15-beat one-voice pattern problem down to its unique
// placement, then solves a two-voice instance end to end.

#include <iostream>

#include "spacing/rhythm.hpp"
#include "spacing/search.hpp"
#include "spacing/spacing1.hpp"

using namespace spacing;

namespace {

const char* names = ".abcdefgh";  // 0 prints as '.'

void print_store(const VariableStore& store) {
    for (int i = 0; i < store.num_vars(); ++i) {
        std::cout << "  x" << i + 1 << " = {";
        bool first = true;
        store.domain(i).for_each([&](Value v) {
            std::cout << (first ? "" : ",") << names[v];
            first = false;
        });
        std::cout << "}";
        if ((i + 1) % 5 == 0)
            std::cout << '\n';
    }
    std::cout << '\n';
}

}  // namespace

int main() {
    const Value a = 1, b = 2, c = 3, other = 4;
    std::vector<std::vector<Value>> domains{
        {a, b, other},    {a, b, c, other}, {a, b, c, other},
        {a, b},           {b, c, other},    {a, b, c, other},
        {a, b, c},        {c},              {a, b, c, other},
        {b, c, other},    {a, b, c, other}, {a, c, other},
        {a, b, c, other}, {a, b, c, other}, {b, c, other}};

    VariableStore store(domains);
    std::cout << "before filtering:\n";
    print_store(store);

    Spacing1Propagator prop(Spacing1Spec({a, b, c}, 5, 3, 15));
    std::vector<Propagator*> props{&prop};
    if (propagate_fixpoint(store, props) == PropStatus::failed) {
        std::cout << "no placement exists\n";
        return 1;
    }
    std::cout << "after filtering (the pattern is forced):\n";
    print_store(store);

    // a second voice alongside: generate, solve, decode
    RhythmInstance inst;
    inst.voices = {{5, 4, 2}, {7, 3, 2}};
    inst.length = 21;
    BuiltModel model = build_sr(inst);
    SearchOutcome out = search(model.store, model.propagator_ptrs());
    std::cout << "two-voice instance: " << out.solution_count
              << " solutions, " << out.backtracks << " backtracks\n";
    for (const auto& sol : out.solutions) {
        auto patterns = decode(sol, inst, model.kind);
        for (std::size_t l = 0; l < patterns.size(); ++l) {
            std::cout << "  voice " << l + 1 << ":";
            for (auto [place, value] : patterns[l])
                std::cout << ' ' << place << ':' << names[value];
            std::cout << '\n';
        }
        std::cout << '\n';
    }
    return 0;
}
