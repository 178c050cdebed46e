#include "approxdt/error.hpp"
#include "approxdt/moo.hpp"

#include "oracles.hpp"
#include "synthetic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <map>

using namespace approxdt;

namespace {

std::vector<Individual> population(std::vector<Objectives> const& objs)
{
    std::vector<Individual> pop;
    for (auto const& o : objs) {
        pop.push_back(Individual{.obj = o});
    }
    return pop;
}

EvalContext coarse_context(double noise = 0.05)
{
    auto train = approxdt::testing::coarse_threshold_dataset(400, 31, noise);
    auto test = approxdt::testing::coarse_threshold_dataset(200, 32, noise);
    return EvalContext{.tree = train_cart(train, {.max_depth = 4}), .test = test};
}

GaConfig small_config(std::uint64_t seed)
{
    GaConfig cfg;
    cfg.population_size = 24;
    cfg.generations = 15;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST(Dominates, Examples)
{
    EXPECT_TRUE(dominates({0.1, 5}, {0.2, 5}));
    EXPECT_TRUE(dominates({0.1, 4}, {0.2, 5}));
    EXPECT_FALSE(dominates({0.1, 5}, {0.1, 5}));
    EXPECT_FALSE(dominates({0.1, 6}, {0.2, 5}));
}

TEST(FastNondominatedSort, Example)
{
    auto pop = population({{0.1, 10}, {0.2, 5}, {0.15, 12}});
    auto fronts = fast_nondominated_sort(pop);
    ASSERT_EQ(fronts.size(), 2U);
    EXPECT_EQ(fronts[0], (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(fronts[1], (std::vector<std::size_t>{2}));
    EXPECT_EQ(pop[2].rank, 1U);
}

TEST(FastNondominatedSort, MatchesPeelingOracle)
{
    CounterRng rng{40};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Objectives> objs;
        auto const n = static_cast<std::size_t>(rng.between(1, 40));
        for (std::size_t i = 0; i < n; ++i) {
            // coarse values so ties and duplicates occur
            objs.push_back({static_cast<double>(rng.below(6)) / 5.0, static_cast<double>(rng.below(8))});
        }
        auto pop = population(objs);
        auto fronts = fast_nondominated_sort(pop);
        ASSERT_EQ(fronts, approxdt::testing::oracle_fronts(objs)) << "trial " << trial;
        std::size_t covered = 0;
        for (std::size_t r = 0; r < fronts.size(); ++r) {
            covered += fronts[r].size();
            for (auto i : fronts[r]) {
                ASSERT_EQ(pop[i].rank, r);
                for (auto j : fronts[r]) {
                    ASSERT_FALSE(dominates(objs[i], objs[j]));
                }
            }
        }
        ASSERT_EQ(covered, n);
    }
}

TEST(CrowdingDistance, ThreeMembers)
{
    auto pop = population({{0.0, 10.0}, {0.5, 5.0}, {1.0, 0.0}});
    std::vector<std::size_t> front{0, 1, 2};
    auto d = crowding_distance(pop, front);
    auto inf = std::numeric_limits<double>::infinity();
    EXPECT_EQ(d[0], inf);
    EXPECT_DOUBLE_EQ(d[1], 2.0);
    EXPECT_EQ(d[2], inf);
}

TEST(CrowdingDistance, SmallAndDegenerateFronts)
{
    auto inf = std::numeric_limits<double>::infinity();
    auto pair = population({{0.0, 1.0}, {1.0, 0.0}});
    std::vector<std::size_t> two{0, 1};
    EXPECT_EQ(crowding_distance(pair, two), (std::vector<double>{inf, inf}));

    // equal error everywhere: only area contributes
    auto flat = population({{0.2, 0.0}, {0.2, 1.0}, {0.2, 3.0}, {0.2, 4.0}});
    std::vector<std::size_t> all{0, 1, 2, 3};
    auto d = crowding_distance(flat, all);
    EXPECT_EQ(d[0], inf);
    EXPECT_DOUBLE_EQ(d[1], 0.75);
    EXPECT_DOUBLE_EQ(d[2], 0.75);
    EXPECT_EQ(d[3], inf);
    for (double v : d) {
        EXPECT_FALSE(std::isnan(v));
    }
}

TEST(TournamentSelect, Rules)
{
    auto pop = population({{0, 0}, {0, 0}});
    pop[0].rank = 1;
    pop[1].rank = 0;
    CounterRng rng{1};
    for (int i = 0; i < 50; ++i) {
        EXPECT_EQ(tournament_select(pop, rng), 1U);
    }
    pop[0].rank = 0;
    pop[0].crowding = 3.0;
    pop[1].crowding = 1.0;
    for (int i = 0; i < 50; ++i) {
        EXPECT_EQ(tournament_select(pop, rng), 0U);
    }
    auto one = population({{0, 0}});
    EXPECT_THROW(tournament_select(one, rng), InputError);
}

TEST(SbxCrossover, IdenticalParentsAndBounds)
{
    GaConfig cfg;
    cfg.crossover_prob = 1.0;
    CounterRng rng{2};
    Chromosome a{{Gene{5, 1}, Gene{3, -2}, Gene{8, 5}}};
    auto [c1, c2] = sbx_crossover(a, a, cfg, rng);
    EXPECT_EQ(c1, a);
    EXPECT_EQ(c2, a);

    Chromosome lo{{Gene{2, -5}, Gene{2, -5}}};
    Chromosome hi{{Gene{8, 5}, Gene{8, 5}}};
    for (int i = 0; i < 500; ++i) {
        auto [x, y] = sbx_crossover(lo, hi, cfg, rng);
        for (auto const& c : {x, y}) {
            for (auto const& g : c.genes) {
                ASSERT_TRUE(cfg.bounds.contains(g));
            }
        }
    }
    cfg.crossover_prob = 0.0;
    auto [p, q] = sbx_crossover(lo, hi, cfg, rng);
    EXPECT_EQ(p, lo);
    EXPECT_EQ(q, hi);
    EXPECT_THROW(sbx_crossover(lo, Chromosome{}, cfg, rng), InputError);
}

TEST(PolynomialMutation, ZeroProbabilityIsIdentityAndBoundsHold)
{
    GaConfig cfg;
    cfg.mutation_prob = 0.0;
    CounterRng rng{3};
    Chromosome a{{Gene{5, 1}, Gene{2, -5}}};
    EXPECT_EQ(polynomial_mutation(a, cfg, rng), a);
    cfg.mutation_prob = 1.0;
    bool changed = false;
    for (int i = 0; i < 500; ++i) {
        auto m = polynomial_mutation(a, cfg, rng);
        changed = changed || m != a;
        for (auto const& g : m.genes) {
            ASSERT_TRUE(cfg.bounds.contains(g));
        }
    }
    EXPECT_TRUE(changed);
    EXPECT_DOUBLE_EQ(GaConfig{}.mutation_probability(4), 0.125);
}

TEST(Hypervolume, Staircase)
{
    std::vector<Objectives> pts{{0.0, 2.0}, {0.5, 1.0}, {0.6, 1.5}, {2.0, 0.0}};
    // box (1,4); (2,0) lies outside
    EXPECT_DOUBLE_EQ(hypervolume_2d(pts, {1.0, 4.0}), 1.0 * 2.0 + 0.5 * 1.0);
    EXPECT_DOUBLE_EQ(hypervolume_2d({}, {1.0, 4.0}), 0.0);
}

TEST(GaConfig, Validation)
{
    EXPECT_NO_THROW(GaConfig{}.validate());
    GaConfig odd;
    odd.population_size = 7;
    EXPECT_THROW(odd.validate(), InputError);
    GaConfig zero;
    zero.generations = 0;
    EXPECT_THROW(zero.validate(), InputError);
    GaConfig pc;
    pc.crossover_prob = 1.5;
    EXPECT_THROW(pc.validate(), InputError);
}

TEST(Evolve, DeterministicAndThreadIndependent)
{
    auto ctx = coarse_context();
    auto a = evolve(ctx, small_config(5));
    auto b = evolve(ctx, small_config(5));
    auto cfg = small_config(5);
    cfg.threads = 3;
    auto c = evolve(ctx, cfg);
    ASSERT_EQ(a.front.members.size(), b.front.members.size());
    ASSERT_EQ(a.front.members.size(), c.front.members.size());
    for (std::size_t i = 0; i < a.front.members.size(); ++i) {
        EXPECT_EQ(a.front.members[i].chrom, b.front.members[i].chrom);
        EXPECT_EQ(a.front.members[i].obj, b.front.members[i].obj);
        EXPECT_EQ(a.front.members[i].chrom, c.front.members[i].chrom);
    }
    ASSERT_EQ(a.history.size(), 16U);
    for (std::size_t g = 0; g < a.history.size(); ++g) {
        EXPECT_EQ(a.history[g].hypervolume, b.history[g].hypervolume);
    }
}

TEST(Evolve, FrontIsNondominatedUniqueAndSorted)
{
    auto ctx = coarse_context();
    for (std::uint64_t seed : {1, 2, 3}) {
        auto r = evolve(ctx, small_config(seed));
        auto const& m = r.front.members;
        ASSERT_FALSE(m.empty());
        for (std::size_t i = 0; i < m.size(); ++i) {
            EXPECT_EQ(m[i].obj, evaluate(m[i].chrom, ctx));
            for (std::size_t j = 0; j < m.size(); ++j) {
                EXPECT_FALSE(dominates(m[i].obj, m[j].obj));
                if (i != j) {
                    EXPECT_NE(m[i].chrom, m[j].chrom);
                }
            }
            if (i > 0) {
                EXPECT_LE(m[i - 1].obj.error, m[i].obj.error);
            }
        }
        EXPECT_EQ(r.hv_reference.error, 1.0);
        EXPECT_DOUBLE_EQ(r.hv_reference.area, 2.0 * r.baseline.area);
    }
}

TEST(Evolve, EveryCreatedChromosomeIsInBounds)
{
    auto ctx = coarse_context();
    ctx.bounds = GeneBounds{3, 6, 2};
    auto cfg = small_config(9);
    cfg.bounds = ctx.bounds;
    cfg.mutation_prob = 0.5;
    std::size_t count = 0;
    EvolveHooks hooks{.on_created = [&](Chromosome const& c) {
        ++count;
        ASSERT_EQ(c.size(), ctx.tree.comparator_count());
        for (auto const& g : c.genes) {
            ASSERT_TRUE(ctx.bounds.contains(g)) << g.precision << " " << g.delta;
        }
    }};
    evolve(ctx, cfg, hooks);
    EXPECT_EQ(count, cfg.population_size * (cfg.generations + 1));
}

TEST(Evolve, HypervolumeNeverDecreases)
{
    auto ctx = coarse_context();
    for (std::uint64_t seed : {11, 12, 13, 14}) {
        auto r = evolve(ctx, small_config(seed));
        for (std::size_t g = 1; g < r.history.size(); ++g) {
            EXPECT_GE(r.history[g].hypervolume, r.history[g - 1].hypervolume - 1e-9)
                << "seed " << seed << " gen " << g;
        }
    }
}

TEST(Evolve, Rejections)
{
    auto ctx = coarse_context();
    auto cfg = small_config(1);
    cfg.bounds.margin = 3;
    EXPECT_THROW(evolve(ctx, cfg), InputError);
    EvalContext leaf{.tree = DecisionTree{{TreeNode::leaf(0)}, 0, 2}, .test = ctx.test};
    EXPECT_THROW(evolve(leaf, small_config(1)), InputError);
}
