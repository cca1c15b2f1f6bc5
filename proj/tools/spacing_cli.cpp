// Command-line front end: generate instances, solve them under a chosen
// model, run the benchmark grid, run the self-check suites, and compile
// DIMACS formulas into constraint instances.
//
// Exit codes: 0 ok/sat, 1 unsat or failed check, 2 timeout,
//             64 usage error, 65 data error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spacing/spacing.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_unsat = 1;
constexpr int exit_timeout = 2;
constexpr int exit_usage = 64;
constexpr int exit_data = 65;

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out)
        throw spacing::DataError("cannot write " + path);
    out << text;
}

void print_instance_summary(const spacing::RhythmInstance& inst,
                            std::ostream& os) {
    os << "n=" << inst.length << " voices=" << inst.num_voices();
    for (int l = 0; l < inst.num_voices(); ++l) {
        const auto& v = inst.voices[l];
        os << " [p=" << v.period << " k=" << v.repeats << " m=" << v.onsets
           << "]";
    }
    os << " removed=" << inst.removed.size() << '\n';
}

struct SolveArgs {
    std::string instance_path;
    std::string model = "sm";
    bool all = false;
    double timeout = 0;
    std::string heuristic = "ff";
    std::string value_order = "sfirst";
    int print_limit = 4;
};

spacing::SearchOptions search_options(const SolveArgs& args) {
    spacing::SearchOptions opts;
    opts.timeout_seconds = args.timeout;
    opts.max_solutions = args.all ? UINT64_MAX : 1;
    opts.var_rule = args.heuristic == "lex"
                        ? spacing::VarHeuristic::lexicographic
                        : spacing::VarHeuristic::first_fail;
    opts.value_rule = args.value_order == "asc"
                          ? spacing::ValueOrder::ascending
                          : spacing::ValueOrder::preferred_first;
    return opts;
}

int solve_rhythm(const spacing::RhythmInstance& inst, const SolveArgs& args) {
    spacing::BuiltModel model =
        spacing::build_model(inst, spacing::model_from_name(args.model));
    if (model.root_failed) {
        std::cout << "unsat (empty initial domain)\n";
        return exit_unsat;
    }
    spacing::SearchOptions opts = search_options(args);
    opts.preferred = model.preferred;
    opts.record_solutions = true;
    spacing::SearchOutcome out =
        spacing::search(model.store, model.propagator_ptrs(), opts);

    std::cout << "model=" << args.model << " solutions=" << out.solution_count
              << " backtracks=" << out.backtracks << " nodes=" << out.nodes
              << " time_ms=" << out.wall_time * 1000.0
              << (out.timed_out ? " (timeout)" : "") << '\n';
    int shown = 0;
    for (const auto& sol : out.solutions) {
        if (shown++ >= args.print_limit) {
            std::cout << "... (" << out.solutions.size() - shown + 1
                      << " more)\n";
            break;
        }
        auto patterns = spacing::decode(sol, inst, model.kind);
        for (int l = 0; l < inst.num_voices(); ++l) {
            std::cout << "  voice " << l + 1 << ":";
            for (auto [place, value] : patterns[l])
                std::cout << " " << place << ":" << value;
            std::cout << '\n';
        }
    }
    if (out.solution_count > 0)
        return exit_ok;
    return out.timed_out ? exit_timeout : exit_unsat;
}

int solve_reduced(const spacing::ReducedInstance& red, const SolveArgs& args) {
    double timeout = args.timeout;
    spacing::ReductionSolve out = spacing::solve_reduction(red, timeout);
    std::cout << "kind=" << spacing::reduction_name(red.kind) << " status=";
    switch (out.status) {
        case spacing::SolveStatus::sat: {
            std::cout << "sat nodes=" << out.nodes << '\n';
            std::cout << "  support:";
            for (spacing::Value v : out.support)
                std::cout << ' ' << v;
            std::cout << '\n';
            return exit_ok;
        }
        case spacing::SolveStatus::unsat:
            std::cout << "unsat nodes=" << out.nodes << '\n';
            return exit_unsat;
        case spacing::SolveStatus::timeout:
            std::cout << "timeout nodes=" << out.nodes << '\n';
            return exit_timeout;
    }
    return exit_data;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spacing constraint engine"};
    app.set_help_flag("--help", "print help");  // frees -h / --h for flags
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a rhythm instance");
    int gen_h = 3, gen_p1 = 12, gen_kh = 2;
    std::uint64_t gen_seed = 1;
    double gen_extend = 0;
    std::string gen_out;
    gen->add_option("--h", gen_h, "number of voices");
    gen->add_option("--p1", gen_p1, "period of the first voice");
    gen->add_option("--kh", gen_kh, "repetitions of the last voice");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--extend", gen_extend,
                    "fraction of domain values to remove (extended problem)");
    gen->add_option("--out", gen_out, "output file (default stdout)");

    // solve
    auto* solve = app.add_subcommand("solve", "solve an instance file");
    SolveArgs sargs;
    solve->add_option("instance", sargs.instance_path, "instance JSON file")
        ->required();
    solve->add_option("--model", sargs.model, "om|sm|sb|sr (rhythm instances)");
    solve->add_flag("--all", sargs.all, "enumerate all solutions");
    solve->add_option("--timeout", sargs.timeout, "seconds, 0 = none");
    solve->add_option("--heuristic", sargs.heuristic, "ff|lex");
    solve->add_option("--value-order", sargs.value_order, "sfirst|asc");
    solve->add_option("--print-limit", sargs.print_limit,
                      "solutions to print");

    // bench
    auto* bench = app.add_subcommand("bench", "run the benchmark grid");
    std::vector<int> b_h{3, 4, 5}, b_p1{12, 18, 24}, b_kh{2, 3, 4};
    spacing::BenchConfig bcfg;
    std::string b_models = "om,sm,sr,sb";
    std::string b_out, b_format = "csv";
    bool b_summary = false;
    std::string b_heuristic = "ff";
    bench->add_option("--h", b_h, "voice counts");
    bench->add_option("--p1", b_p1, "first-voice periods");
    bench->add_option("--kh", b_kh, "last-voice repetition counts");
    bench->add_option("--instances", bcfg.instances_per_cell,
                      "instances per cell");
    bench->add_option("--timeout", bcfg.timeout_seconds, "per-solve seconds");
    bench->add_option("--models", b_models, "comma-separated model list");
    bench->add_option("--seed", bcfg.seed, "base seed");
    bench->add_option("--extended", bcfg.extended_fraction,
                      "extended problem removal fraction (e.g. 0.10)");
    bench->add_option("--jobs", bcfg.jobs, "parallel workers (0 = auto)");
    bench->add_option("--heuristic", b_heuristic, "ff|lex");
    bench->add_option("--out", b_out, "output file (default stdout)");
    bench->add_option("--format", b_format, "csv|json");
    bench->add_flag("--summary", b_summary,
                    "aggregate per cell instead of per instance");

    // check
    auto* check = app.add_subcommand("check", "propagator-vs-oracle suites");
    std::string c_suite = "all";
    std::uint64_t c_trials = 300, c_seed = 1, c_samples = 25;
    int c_max_v = 2, c_max_c = 2;
    check->add_option("--suite", c_suite,
                      "spacing1|sb|bounded|soundr|matching|reductions|all");
    check->add_option("--trials", c_trials, "trials per randomized suite");
    check->add_option("--seed", c_seed, "suite seed");
    check->add_option("--max-v", c_max_v, "reductions: max variables");
    check->add_option("--max-c", c_max_c, "reductions: max clauses");
    check->add_option("--samples", c_samples, "reductions: sampled formulas");

    // reduce
    auto* reduce = app.add_subcommand("reduce", "compile DIMACS to an instance");
    std::string r_kind = "spacing", r_in, r_out;
    reduce->add_option("--kind", r_kind,
                       "spacing|spacingf|spacingf-nomax|spacingh");
    reduce->add_option("cnf", r_in, "DIMACS cnf file")->required();
    reduce->add_option("--out", r_out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (gen->parsed()) {
            spacing::RhythmInstance inst =
                spacing::generate_instance(gen_h, gen_p1, gen_kh, gen_seed);
            if (gen_extend > 0)
                inst = spacing::extend_instance(
                    inst, gen_extend, spacing::mix_seed(gen_seed));
            std::string text = spacing::instance_to_json(inst).dump(2) + "\n";
            if (gen_out.empty())
                std::cout << text;
            else
                write_file(gen_out, text);
            print_instance_summary(inst, std::cerr);
            return exit_ok;
        }

        if (solve->parsed()) {
            std::ifstream in(sargs.instance_path);
            if (!in)
                throw spacing::DataError("cannot read " + sargs.instance_path);
            nlohmann::json j;
            in >> j;
            if (j.contains("kind"))
                return solve_reduced(spacing::reduced_from_json(j), sargs);
            return solve_rhythm(spacing::instance_from_json(j), sargs);
        }

        if (bench->parsed()) {
            bcfg.cells.clear();
            for (int h : b_h)
                for (int p1 : b_p1)
                    for (int kh : b_kh)
                        bcfg.cells.push_back({h, p1, kh});
            bcfg.models.clear();
            std::istringstream ms(b_models);
            std::string name;
            while (std::getline(ms, name, ','))
                if (!name.empty())
                    bcfg.models.push_back(spacing::model_from_name(name));
            bcfg.heuristic = b_heuristic == "lex"
                                 ? spacing::VarHeuristic::lexicographic
                                 : spacing::VarHeuristic::first_fail;
            auto records = spacing::run_bench(bcfg);
            std::string text;
            if (b_format == "json")
                text = spacing::bench_json(records).dump(2) + "\n";
            else if (b_summary)
                text = spacing::summary_csv(spacing::summarize(records));
            else
                text = spacing::bench_csv(records);
            if (b_out.empty())
                std::cout << text;
            else
                write_file(b_out, text);
            return exit_ok;
        }

        if (check->parsed()) {
            std::vector<spacing::CheckReport> reports;
            auto want = [&](const std::string& s) {
                return c_suite == "all" || c_suite == s;
            };
            if (want("spacing1"))
                reports.push_back(spacing::check_spacing1_suite(c_trials, c_seed));
            if (want("sb"))
                reports.push_back(spacing::check_sb_suite(c_trials, c_seed));
            if (want("bounded"))
                reports.push_back(spacing::check_bounded_suite(c_trials, c_seed));
            if (want("soundr"))
                reports.push_back(spacing::check_soundr_suite(c_trials, c_seed));
            if (want("matching"))
                reports.push_back(spacing::check_matching_suite(c_trials, c_seed));
            if (want("reductions"))
                reports.push_back(spacing::check_reductions_suite(
                    c_max_v, c_max_c, c_samples, c_seed));
            if (reports.empty()) {
                std::cerr << "unknown suite: " << c_suite << '\n';
                return exit_usage;
            }
            bool all_ok = true;
            for (const auto& r : reports) {
                std::cout << r.suite << ": " << (r.ok() ? "pass" : "FAIL")
                          << " (" << r.trials << " trials";
                if (!r.ok())
                    std::cout << ", " << r.failures
                              << " failures; first: " << r.first_counterexample;
                std::cout << ")\n";
                all_ok = all_ok && r.ok();
            }
            return all_ok ? exit_ok : exit_unsat;
        }

        if (reduce->parsed()) {
            spacing::Cnf cnf = spacing::load_dimacs(r_in);
            spacing::ReductionKind kind;
            if (r_kind == "spacing")
                kind = spacing::ReductionKind::spacing;
            else if (r_kind == "spacingf")
                kind = spacing::ReductionKind::spacing_f;
            else if (r_kind == "spacingf-nomax")
                kind = spacing::ReductionKind::spacing_f_nomax;
            else if (r_kind == "spacingh")
                kind = spacing::ReductionKind::spacing_h;
            else {
                std::cerr << "unknown reduction kind: " << r_kind << '\n';
                return exit_usage;
            }
            spacing::ReducedInstance red = spacing::reduce(cnf, kind);
            std::string text = spacing::reduced_to_json(red).dump(2) + "\n";
            std::string mapping =
                spacing::mapping_to_json(red).dump(2) + "\n";
            if (r_out.empty()) {
                std::cout << text;
            } else {
                write_file(r_out, text);
                write_file(r_out + ".map.json", mapping);
            }
            std::cerr << "n=" << red.n << " values, kind="
                      << spacing::reduction_name(red.kind) << '\n';
            return exit_ok;
        }
    } catch (const spacing::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    } catch (const spacing::ReductionError& e) {
        std::cerr << "rejected: " << e.what() << '\n';
        return exit_data;
    } catch (const spacing::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    }
    return exit_usage;
}
