#include <gtest/gtest.h>

#include "support.hpp"

using namespace rnf;
using rnf::testing::random_series;
using rnf::testing::small_context;

TEST(Graded, SetDropsGradesAboveCutoff) {
    auto ctx = small_context();
    GradedSeries g(ctx, 2);
    g.set({2, 1}, Series::constant(ctx, 1.0));
    EXPECT_TRUE(g.empty());
    g.set({1, 1}, Series::constant(ctx, 1.0));
    EXPECT_TRUE(g.has({1, 1}));
}

TEST(Graded, ProductAddsGrades) {
    auto ctx = small_context();
    auto a = GradedSeries::single(Series::constant(ctx, 2.0), {1, 0}, 3);
    auto b = GradedSeries::single(Series::constant(ctx, 3.0), {0, 1}, 3);
    auto p = a * b;
    ASSERT_EQ(p.grades().size(), 1u);
    EXPECT_NEAR(p.at({1, 1}).evaluate(1.0, 0.0, 0.0), 6.0, 1e-15);
    EXPECT_TRUE((p * p).empty());  // grade (2,2) exceeds the cutoff
}

TEST(Graded, EvaluateWeightsGrades) {
    auto ctx = small_context();
    GradedSeries g(ctx, 3);
    g.set({1, 0}, Series::constant(ctx, 1.0));
    g.set({1, 2}, Series::constant(ctx, 5.0));
    EXPECT_NEAR(g.evaluate(0.1, 0.2).evaluate(1.0, 0.0, 0.0), 0.1 + 5 * 0.1 * 0.04, 1e-15);
}

TEST(Graded, ShiftAndFilter) {
    auto ctx = small_context();
    GradedSeries g(ctx, 3);
    g.set({1, 0}, Series::constant(ctx, 1.0));
    g.set({2, 0}, Series::constant(ctx, 2.0));
    auto s = g.shifted({0, 1});
    EXPECT_TRUE(s.has({1, 1}));
    EXPECT_TRUE(s.has({2, 1}));
    auto f = g.filter([](Grade q) { return q.eps == 1; });
    EXPECT_EQ(f.grades().size(), 1u);
}

// F(y + dy, x + dx) against direct evaluation: the difference is O(eps^{N+1})
TEST(Graded, ComposeShiftMatchesShiftedEvaluation) {
    std::mt19937 rng(41);
    auto ctx = small_context();
    const int N = 3;
    for (int trial = 0; trial < 10; ++trial) {
        auto f = random_series(rng, ctx, 4, 2, 4);
        GradedVector dy{GradedSeries::single(random_series(rng, ctx, 3, 1, 2), {1, 0}, N)};
        GradedVector dx{GradedSeries::single(random_series(rng, ctx, 3, 1, 2), {0, 1}, N)};
        auto comp = compose_shift(f, dy, dx, N);
        const double y = 1.015, x = 0.7, t = 1.9;
        double prev = 0.0;
        for (double e : {1e-2, 5e-3}) {
            double sy = dy[0].evaluate(e, e).evaluate(y, x, t), sx = dx[0].evaluate(e, e).evaluate(y, x, t);
            double exact = f.evaluate(y + sy, x + sx, t);
            double err = std::abs(comp.evaluate(e, e).evaluate(y, x, t) - exact);
            EXPECT_LT(err, 50 * std::pow(e, N + 1));
            if (prev > 1e-13) EXPECT_LT(err, prev / 8);  // at least third-order convergence
            prev = err;
        }
    }
}

TEST(Graded, ComposeShiftRejectsZeroGradeShift) {
    auto ctx = small_context();
    auto f = Series::trig(ctx, FourierMode{{1}, 0}, {0}, 1.0, 0.0);
    GradedVector dx{GradedSeries::single(Series::constant(ctx, 0.1), {0, 0}, 2)};
    EXPECT_THROW(compose_shift(f, {}, dx, 2), StructuralError);
}

TEST(Graded, ComposeShiftWithNoShiftIsIdentity) {
    auto ctx = small_context();
    auto f = Series::trig(ctx, FourierMode{{1}, -1}, {2}, 1.0, 0.3);
    auto g = compose_shift(f, {}, {}, 3);
    EXPECT_EQ(g.grades().size(), 1u);
    EXPECT_EQ(g.at({0, 0}).dump(), f.dump());
}
