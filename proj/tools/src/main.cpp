#include "approxdt/cli/pipeline.hpp"
#include "approxdt/error.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <thread>

namespace {

enum ExitCode : int { kOk = 0, kUserError = 2, kInternalError = 3 };

} // namespace

int main(int argc, char** argv)
{
    using approxdt::cli::RunConfig;
    RunConfig cfg;
    std::optional<std::size_t> max_depth;
    std::optional<double> mutation_prob;
    std::vector<std::filesystem::path> runs;
    unsigned threads = std::max(1U, std::thread::hardware_concurrency());

    CLI::App app{"Evolve approximate bespoke decision-tree classifiers (precision scaling + threshold substitution)"};
    app.set_config("--config", "", "key = value configuration file; command-line flags take precedence");
    app.fallthrough();
    app.require_subcommand(1, 1);

    app.add_option("--dataset", cfg.dataset, "CSV dataset");
    app.add_option("--label-col", cfg.label_col, "Label column: header name or 0-based index (-1 = last)")
        ->capture_default_str();
    app.add_option("--split", cfg.split, "Test fraction")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    app.add_option("--seed", cfg.seed, "Seed for the split and the GA")->capture_default_str();
    app.add_option("--max-depth", max_depth, "Tree depth limit (default: grow to pure leaves)");
    app.add_option("--min-samples-split", cfg.tree.min_samples_split)->capture_default_str();
    app.add_option("--pop", cfg.ga.population_size, "Population size (even, >= 4)")->capture_default_str();
    app.add_option("--gens", cfg.ga.generations, "Generations")->capture_default_str();
    app.add_option("--pmin", cfg.ga.bounds.p_min, "Minimum comparator precision (bits)")->capture_default_str();
    app.add_option("--pmax", cfg.ga.bounds.p_max, "Maximum comparator precision (bits)")->capture_default_str();
    app.add_option("--margin", cfg.ga.bounds.margin, "Threshold substitution margin (+/- codes)")
        ->capture_default_str();
    app.add_option("--eta-c", cfg.ga.eta_c, "SBX distribution index")->capture_default_str();
    app.add_option("--eta-m", cfg.ga.eta_m, "Polynomial mutation distribution index")->capture_default_str();
    app.add_option("--pc", cfg.ga.crossover_prob, "Crossover probability")->capture_default_str();
    app.add_option("--pm", mutation_prob, "Per-gene mutation probability (default 1/(2N))");
    app.add_option("--threads", threads, "Evaluation threads")->capture_default_str();
    app.add_option("--area-model", cfg.area_model, "analytical | lut")
        ->capture_default_str()
        ->check(CLI::IsMember({"analytical", "lut"}));
    app.add_option("--lut", cfg.lut, "Area LUT CSV (precision,threshold,area)");
    app.add_option("--w-inv", cfg.weights.inv, "Analytical model: inverter weight")->capture_default_str();
    app.add_option("--w-and2", cfg.weights.and2, "Analytical model: AND2 weight")->capture_default_str();
    app.add_option("--w-or2", cfg.weights.or2, "Analytical model: OR2 weight")->capture_default_str();
    app.add_option("--out", cfg.out, "Run directory")->capture_default_str();
    app.add_option("--select", cfg.select, "Front member: <index> | 'best-area-within <loss>'")
        ->capture_default_str();
    app.add_option("--module", cfg.module_name, "Verilog module name")->capture_default_str();

    auto* train = app.add_subcommand("train", "Train the exact tree and report the baseline");
    auto* optimize = app.add_subcommand("optimize", "Search approximate trees with NSGA-II");
    auto* emit = app.add_subcommand("emit", "Write Verilog for a front member");
    auto* report = app.add_subcommand("report", "Summarize completed runs");
    report->add_option("runs", runs, "Run directories")->required();

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int const code = app.exit(e);
        return code == 0 ? kOk : kUserError;
    }

    cfg.tree.max_depth = max_depth;
    cfg.ga.mutation_prob = mutation_prob;
    cfg.ga.threads = threads;
    cfg.ga.seed = cfg.seed;
    cfg.tree.seed = cfg.seed;

    try {
        if (train->parsed()) {
            approxdt::cli::cmd_train(cfg, std::cout);
        } else if (optimize->parsed()) {
            approxdt::cli::cmd_optimize(cfg, std::cout);
        } else if (emit->parsed()) {
            approxdt::cli::cmd_emit(cfg, std::cout);
        } else if (report->parsed()) {
            approxdt::cli::cmd_report(runs, cfg.out, cfg.select, std::cout);
        }
    } catch (approxdt::InputError const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUserError;
    } catch (std::filesystem::filesystem_error const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUserError;
    } catch (approxdt::InternalError const& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternalError;
    } catch (std::exception const& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternalError;
    }
    return kOk;
}
