#include "approxdt/error.hpp"
#include "approxdt/evaluator.hpp"

#include "synthetic.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <stdexcept>

using namespace approxdt;

namespace {

EvalContext coarse_context(std::uint64_t seed = 3)
{
    auto train = approxdt::testing::coarse_threshold_dataset(400, seed);
    auto test = approxdt::testing::coarse_threshold_dataset(200, seed + 100);
    return EvalContext{.tree = train_cart(train), .test = test};
}

} // namespace

TEST(Evaluate, BaselineMatchesQuantizedAccuracyAndArea)
{
    auto ctx = coarse_context();
    auto base = baseline_chromosome(ctx.tree, ctx.bounds);
    ASSERT_EQ(base.size(), ctx.tree.comparator_count());
    for (auto const& g : base.genes) {
        EXPECT_EQ(g, (Gene{8, 0}));
    }
    auto obj = evaluate(base, ctx);
    auto q = apply_chromosome(ctx.tree, base);
    EXPECT_DOUBLE_EQ(obj.error, 1.0 - quantized_accuracy(q, ctx.test));
    EXPECT_DOUBLE_EQ(obj.area, tree_area(q, ctx.model));
}

TEST(Evaluate, SaturatedThresholdsCostNothing)
{
    auto ctx = coarse_context();
    auto n = ctx.tree.comparator_count();
    auto base = evaluate(baseline_chromosome(ctx.tree, ctx.bounds), ctx);
    Chromosome sat{std::vector<Gene>(n, Gene{2, 5})};
    auto obj = evaluate(sat, ctx);
    EXPECT_EQ(obj.area, 0.0);
    EXPECT_LT(obj.area, base.area);
    EXPECT_GE(obj.error, 0.0);
    EXPECT_LE(obj.error, 1.0);
}

TEST(Evaluate, PureAndCached)
{
    auto ctx = coarse_context();
    ctx.cache = std::make_shared<ObjectiveCache>();
    Chromosome c{std::vector<Gene>(ctx.tree.comparator_count(), Gene{3, -1})};
    auto a = evaluate(c, ctx);
    EXPECT_EQ(ctx.cache->size(), 1U);
    auto b = evaluate(c, ctx);
    EXPECT_EQ(a, b);
    EXPECT_EQ(ctx.cache->size(), 1U);
    ctx.cache.reset();
    EXPECT_EQ(evaluate(c, ctx), a);
}

TEST(Evaluate, CoarseChromosomeKeepsAccuracy)
{
    auto ctx = coarse_context();
    Chromosome c{std::vector<Gene>(ctx.tree.comparator_count(), Gene{3, -1})};
    auto obj = evaluate(c, ctx);
    EXPECT_DOUBLE_EQ(obj.error, 0.0);
    EXPECT_LT(obj.area, evaluate(baseline_chromosome(ctx.tree, ctx.bounds), ctx).area);
}

TEST(ObjectiveCache, FirstInsertWins)
{
    ObjectiveCache cache;
    Chromosome c{{Gene{3, 0}}};
    EXPECT_FALSE(cache.find(c).has_value());
    EXPECT_EQ(cache.insert(c, {0.1, 2.0}), (Objectives{0.1, 2.0}));
    EXPECT_EQ(cache.insert(c, {0.5, 9.0}), (Objectives{0.1, 2.0}));
    EXPECT_EQ(*cache.find(c), (Objectives{0.1, 2.0}));
}

TEST(EvaluateAll, SameResultForAnyThreadCount)
{
    auto ctx = coarse_context();
    CounterRng rng{1};
    std::vector<Chromosome> pop;
    for (int i = 0; i < 64; ++i) {
        Chromosome c;
        for (std::size_t k = 0; k < ctx.tree.comparator_count(); ++k) {
            c.genes.push_back(Gene{static_cast<std::int32_t>(rng.between(2, 8)), static_cast<std::int32_t>(rng.between(-5, 5))});
        }
        pop.push_back(c);
    }
    auto one = evaluate_all(pop, ctx, 1);
    auto four = evaluate_all(pop, ctx, 4);
    ASSERT_EQ(one.size(), pop.size());
    EXPECT_EQ(one, four);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        EXPECT_EQ(one[i], evaluate(pop[i], ctx));
        auto q = apply_chromosome(ctx.tree, pop[i]);
        EXPECT_DOUBLE_EQ(one[i].error + quantized_accuracy(q, ctx.test), 1.0);
    }
}

TEST(ParallelFor, CoversAllIndicesAndRethrows)
{
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), 3, [&](std::size_t i) { ++hits[i]; });
    for (auto const& h : hits) {
        ASSERT_EQ(h.load(), 1);
    }
    EXPECT_THROW(parallel_for(10, 3,
                              [](std::size_t i) {
                                  if (i == 7) {
                                      throw std::runtime_error("boom");
                                  }
                              }),
                 std::runtime_error);
}

TEST(Evaluate, RejectsWrongLength)
{
    auto ctx = coarse_context();
    EXPECT_THROW(evaluate(Chromosome{}, ctx), InputError);
}
