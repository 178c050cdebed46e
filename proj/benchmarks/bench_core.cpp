#include "approxdt/area_model.hpp"
#include "approxdt/evaluator.hpp"
#include "approxdt/moo.hpp"
#include "approxdt/rtl.hpp"

#include <benchmark/benchmark.h>

using namespace approxdt;

namespace {

DecisionTree random_tree(std::size_t splits, std::size_t features, CounterRng& rng)
{
    std::vector<TreeNode> nodes{TreeNode::leaf(0)};
    std::vector<NodeId> leaves{0};
    for (std::size_t s = 0; s < splits; ++s) {
        auto const pick = static_cast<std::size_t>(rng.below(leaves.size()));
        auto const l = static_cast<NodeId>(nodes.size());
        nodes[static_cast<std::size_t>(leaves[pick])] =
            TreeNode::split(static_cast<std::int32_t>(rng.below(features)), rng.uniform(), l, l + 1);
        nodes.push_back(TreeNode::leaf(static_cast<std::int32_t>(rng.below(3))));
        nodes.push_back(TreeNode::leaf(static_cast<std::int32_t>(rng.below(3))));
        leaves[pick] = l;
        leaves.push_back(l + 1);
    }
    return DecisionTree{std::move(nodes), 0, 3};
}

Dataset random_data(std::size_t rows, std::size_t cols, CounterRng& rng)
{
    std::vector<double> x(rows * cols);
    for (auto& v : x) {
        v = rng.uniform();
    }
    std::vector<int> y(rows);
    for (auto& l : y) {
        l = static_cast<int>(rng.below(3));
    }
    return Dataset{std::move(x), cols, std::move(y), 3};
}

Chromosome random_chromosome(std::size_t n, CounterRng& rng)
{
    Chromosome c;
    for (std::size_t i = 0; i < n; ++i) {
        c.genes.push_back({static_cast<std::int32_t>(rng.between(2, 8)), static_cast<std::int32_t>(rng.between(-5, 5))});
    }
    return c;
}

void BM_Evaluate(benchmark::State& state)
{
    CounterRng rng{1};
    auto const n = static_cast<std::size_t>(state.range(0));
    EvalContext ctx{.tree = random_tree(n, 13, rng), .test = random_data(300, 13, rng)};
    auto c = random_chromosome(n, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate(c, ctx));
    }
}
BENCHMARK(BM_Evaluate)->Arg(10)->Arg(178)->Unit(benchmark::kMicrosecond);

void BM_NondominatedSort(benchmark::State& state)
{
    CounterRng rng{2};
    std::vector<Individual> pop(static_cast<std::size_t>(state.range(0)));
    for (auto& ind : pop) {
        ind.obj = {rng.uniform(), rng.uniform()};
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(assign_rank_and_crowding(pop));
    }
}
BENCHMARK(BM_NondominatedSort)->Arg(100)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_AnalyticalArea(benchmark::State& state)
{
    std::uint32_t t = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(analytical_area(8, t));
        t = (t + 37U) & 255U;
    }
}
BENCHMARK(BM_AnalyticalArea);

void BM_Evolve(benchmark::State& state)
{
    CounterRng rng{3};
    EvalContext ctx{.tree = random_tree(30, 8, rng), .test = random_data(200, 8, rng)};
    GaConfig cfg;
    cfg.population_size = 50;
    cfg.generations = 20;
    for (auto _ : state) {
        benchmark::DoNotOptimize(evolve(ctx, cfg));
    }
}
BENCHMARK(BM_Evolve)->Unit(benchmark::kMillisecond);

void BM_EmitVerilog(benchmark::State& state)
{
    CounterRng rng{4};
    auto tree = random_tree(178, 13, rng);
    auto q = apply_chromosome(tree, random_chromosome(tree.comparator_count(), rng));
    for (auto _ : state) {
        benchmark::DoNotOptimize(emit_verilog(build_netlist(q), "approx_tree"));
    }
}
BENCHMARK(BM_EmitVerilog)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
