#include "approxdt/rng.hpp"

#include <gtest/gtest.h>

#include <array>
#include <set>

using approxdt::CounterRng;

TEST(CounterRng, Reproducible)
{
    CounterRng a{42};
    CounterRng b{42};
    for (int i = 0; i < 100; ++i) {
        ASSERT_EQ(a.next(), b.next());
    }
    EXPECT_EQ(a.counter(), 100U);
    CounterRng c{43};
    EXPECT_NE(CounterRng{42}.next(), c.next());
}

TEST(CounterRng, SplitIsIndependentOfParentPosition)
{
    CounterRng a{5};
    auto before = a.split("x");
    a.next();
    auto after = a.split("x");
    EXPECT_EQ(before.next(), after.next());
    EXPECT_NE(CounterRng{5}.split("x").next(), CounterRng{5}.split("y").next());
}

TEST(CounterRng, RangesHold)
{
    CounterRng r{9};
    std::array<int, 7> hist{};
    for (int i = 0; i < 70000; ++i) {
        double const u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        auto const k = r.between(-3, 3);
        ASSERT_GE(k, -3);
        ASSERT_LE(k, 3);
        ++hist[static_cast<std::size_t>(k + 3)];
    }
    for (int h : hist) {
        EXPECT_NEAR(h, 10000, 500);
    }
    EXPECT_EQ(r.below(1), 0U);
    EXPECT_EQ(r.between(4, 4), 4);
}
