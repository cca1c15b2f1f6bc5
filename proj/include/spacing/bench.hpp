#pragma once

#include <atomic>
#include <cstdint>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "spacing/rhythm.hpp"
#include "spacing/search.hpp"

namespace spacing {

struct BenchCell {
    int h, p1, kh;
};

struct BenchConfig {
    std::vector<BenchCell> cells;
    int instances_per_cell = 10;
    double timeout_seconds = 10.0;
    std::vector<ModelKind> models{ModelKind::om, ModelKind::sm, ModelKind::sr,
                                  ModelKind::sb};
    std::uint64_t seed = 1;
    double extended_fraction = 0.0;
    VarHeuristic heuristic = VarHeuristic::first_fail;
    ValueOrder value_order = ValueOrder::preferred_first;
    int jobs = 0;  // 0 = hardware concurrency
};

inline std::vector<BenchCell> default_grid() {
    std::vector<BenchCell> cells;
    for (int h : {3, 4, 5})
        for (int p1 : {12, 18, 24})
            for (int kh : {2, 3, 4})
                cells.push_back({h, p1, kh});
    return cells;
}

enum class BenchStatus { sat, unsat, timeout, skipped, error };

inline const char* bench_status_name(BenchStatus s) {
    switch (s) {
        case BenchStatus::sat: return "sat";
        case BenchStatus::unsat: return "unsat";
        case BenchStatus::timeout: return "timeout";
        case BenchStatus::skipped: return "skipped";
        case BenchStatus::error: return "error";
    }
    return "?";
}

struct BenchRecord {
    BenchCell cell;
    int instance = 0;
    std::uint64_t instance_seed = 0;
    ModelKind model = ModelKind::sm;
    bool extended = false;
    BenchStatus status = BenchStatus::error;
    double time_ms = 0;
    std::uint64_t backtracks = 0;
    std::uint64_t nodes = 0;

    bool solved() const {
        return status == BenchStatus::sat || status == BenchStatus::unsat;
    }
};

/// splitmix64 step, used to derive independent per-instance seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t instance_seed(std::uint64_t base, int cell_index,
                                   int instance) {
    return mix_seed(base + 0x100000001ull * cell_index + instance);
}

/// Runs the benchmark grid. One record per (cell, instance, model), in
/// deterministic order; cells may execute on parallel worker threads,
/// one solver per task.
inline std::vector<BenchRecord> run_bench(const BenchConfig& config) {
    struct Task {
        BenchCell cell;
        int cell_index;
        int instance;
        ModelKind model;
    };
    std::vector<Task> tasks;
    for (int ci = 0; ci < static_cast<int>(config.cells.size()); ++ci)
        for (int inst = 0; inst < config.instances_per_cell; ++inst)
            for (ModelKind model : config.models)
                tasks.push_back({config.cells[ci], ci, inst, model});

    std::vector<BenchRecord> records(tasks.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        while (true) {
            std::size_t t = next.fetch_add(1);
            if (t >= tasks.size())
                return;
            const Task& task = tasks[t];
            BenchRecord rec;
            rec.cell = task.cell;
            rec.instance = task.instance;
            rec.model = task.model;
            rec.extended = config.extended_fraction > 0;
            rec.instance_seed =
                instance_seed(config.seed, task.cell_index, task.instance);
            try {
                RhythmInstance inst = generate_instance(
                    task.cell.h, task.cell.p1, task.cell.kh, rec.instance_seed);
                if (config.extended_fraction > 0) {
                    if (task.model == ModelKind::sb) {
                        // onsets stop being interchangeable under removals
                        rec.status = BenchStatus::skipped;
                        records[t] = rec;
                        continue;
                    }
                    inst = extend_instance(inst, config.extended_fraction,
                                           mix_seed(rec.instance_seed));
                }
                BuiltModel model = build_model(inst, task.model);
                if (model.root_failed) {
                    rec.status = BenchStatus::unsat;
                    records[t] = rec;
                    continue;
                }
                SearchOptions opts;
                opts.max_solutions = 1;
                opts.timeout_seconds = config.timeout_seconds;
                opts.var_rule = config.heuristic;
                opts.value_rule = config.value_order;
                opts.preferred = model.preferred;
                SearchOutcome out =
                    search(model.store, model.propagator_ptrs(), opts);
                rec.time_ms = out.wall_time * 1000.0;
                rec.backtracks = out.backtracks;
                rec.nodes = out.nodes;
                if (out.solution_count > 0)
                    rec.status = BenchStatus::sat;
                else if (out.timed_out)
                    rec.status = BenchStatus::timeout;
                else
                    rec.status = BenchStatus::unsat;
            } catch (const std::exception&) {
                rec.status = BenchStatus::error;
            }
            records[t] = rec;
        }
    };

    int jobs = config.jobs > 0
                   ? config.jobs
                   : static_cast<int>(std::thread::hardware_concurrency());
    jobs = std::max(jobs, 1);
    std::vector<std::thread> pool;
    for (int i = 0; i < jobs; ++i)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();
    return records;
}

inline std::string bench_csv(const std::vector<BenchRecord>& records) {
    std::ostringstream os;
    os << "h,p1,kh,instance,seed,model,extended,status,time_ms,backtracks,nodes\n";
    for (const auto& r : records) {
        os << r.cell.h << ',' << r.cell.p1 << ',' << r.cell.kh << ','
           << r.instance << ',' << r.instance_seed << ','
           << model_name(r.model) << ',' << (r.extended ? 1 : 0) << ','
           << bench_status_name(r.status) << ',' << std::fixed
           << std::setprecision(3) << r.time_ms << ',' << r.backtracks << ','
           << r.nodes << '\n';
    }
    return os.str();
}

struct BenchSummaryRow {
    BenchCell cell;
    ModelKind model;
    int solved = 0;
    double mean_time_ms = 0;   // over solved instances
    double mean_backtracks = 0;
};

inline std::vector<BenchSummaryRow> summarize(
    const std::vector<BenchRecord>& records) {
    std::map<std::tuple<int, int, int, int>, BenchSummaryRow> rows;
    for (const auto& r : records) {
        auto key = std::make_tuple(r.cell.h, r.cell.p1, r.cell.kh,
                                   static_cast<int>(r.model));
        auto& row = rows[key];
        row.cell = r.cell;
        row.model = r.model;
        if (r.solved()) {
            ++row.solved;
            row.mean_time_ms += r.time_ms;
            row.mean_backtracks += static_cast<double>(r.backtracks);
        }
    }
    std::vector<BenchSummaryRow> out;
    for (auto& [key, row] : rows) {
        if (row.solved > 0) {
            row.mean_time_ms /= row.solved;
            row.mean_backtracks /= row.solved;
        }
        out.push_back(row);
    }
    return out;
}

inline std::string summary_csv(const std::vector<BenchSummaryRow>& rows) {
    std::ostringstream os;
    os << "h,p1,kh,model,solved,mean_time_ms,mean_backtracks\n";
    for (const auto& r : rows)
        os << r.cell.h << ',' << r.cell.p1 << ',' << r.cell.kh << ','
           << model_name(r.model) << ',' << r.solved << ',' << std::fixed
           << std::setprecision(3) << r.mean_time_ms << ','
           << std::setprecision(1) << r.mean_backtracks << '\n';
    return os.str();
}

inline nlohmann::ordered_json bench_json(
    const std::vector<BenchRecord>& records) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : records)
        arr.push_back({{"h", r.cell.h},
                       {"p1", r.cell.p1},
                       {"kh", r.cell.kh},
                       {"instance", r.instance},
                       {"seed", r.instance_seed},
                       {"model", model_name(r.model)},
                       {"extended", r.extended},
                       {"status", bench_status_name(r.status)},
                       {"time_ms", r.time_ms},
                       {"backtracks", r.backtracks},
                       {"nodes", r.nodes}});
    return arr;
}

}  // namespace spacing
