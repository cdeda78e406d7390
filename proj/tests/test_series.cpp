#include <gtest/gtest.h>

#include "support.hpp"

using namespace rnf;
using rnf::testing::random_series;
using rnf::testing::small_context;

namespace {

double max_diff(const Series& a, const Series& b) { return (a - b).max_abs_coefficient(); }

double direct(double y, double x, double t, double c, double s, int k, int j, int m, double y0) {
    double th = k * x + j * t;
    return (c * std::cos(th) + s * std::sin(th)) * std::pow(y - y0, m);
}

}  // namespace

TEST(Series, TermEvaluatesToTrigTimesMonomial) {
    auto ctx = small_context();
    auto f = Series::trig(ctx, FourierMode{{2}, -1}, {3}, 0.7, -0.4);
    for (double x : {0.0, 0.3, 2.1})
        for (double y : {0.99, 1.01, 1.04})
            EXPECT_NEAR(f.evaluate(y, x, 0.8), direct(y, x, 0.8, 0.7, -0.4, 2, -1, 3, 1.01), 1e-14);
}

TEST(Series, NonCanonicalModeIsFolded) {
    auto ctx = small_context();
    auto f = Series::trig(ctx, FourierMode{{-2}, 1}, {0}, 0.5, 0.25);
    EXPECT_EQ(f.mode_count(), 1u);
    EXPECT_NEAR(f.evaluate(1.0, 0.4, 1.3), direct(1.0, 0.4, 1.3, 0.5, 0.25, -2, 1, 0, 1.01), 1e-14);
}

TEST(Series, RingLaws) {
    std::mt19937 rng(11);
    auto ctx = small_context();
    for (int trial = 0; trial < 30; ++trial) {
        auto a = random_series(rng, ctx, 8, 4), b = random_series(rng, ctx, 8, 4), c = random_series(rng, ctx, 8, 4);
        EXPECT_LT(max_diff(a * b, b * a), 1e-13);
        EXPECT_LT(max_diff((a * b) * c, a * (b * c)), 1e-12);
        EXPECT_LT(max_diff(a * (b + c), a * b + a * c), 1e-12);
        EXPECT_LT(max_diff(a + b, b + a), 1e-15);
        EXPECT_TRUE((a - a).empty());
        EXPECT_LT(max_diff(a * Series::constant(ctx, 1.0), a), 1e-15);
    }
}

TEST(Series, ProductMatchesPointwiseProductWithinTaylorDegree) {
    std::mt19937 rng(3);
    auto ctx = small_context();
    for (int trial = 0; trial < 20; ++trial) {
        auto a = random_series(rng, ctx, 6, 3), b = random_series(rng, ctx, 6, 3);
        for (double x : {0.1, 1.7})
            for (double y : {0.98, 1.03}) {
                double t = 0.6;
                EXPECT_NEAR((a * b).evaluate(y, x, t), a.evaluate(y, x, t) * b.evaluate(y, x, t), 1e-12);
            }
    }
}

TEST(Series, DerivativesMatchFiniteDifferences) {
    std::mt19937 rng(5);
    auto ctx = small_context();
    const double h = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        auto f = random_series(rng, ctx, 6, 6);
        const double y = 1.02, x = 0.9, t = 2.3;
        double fx = (f.evaluate(y, x + h, t) - f.evaluate(y, x - h, t)) / (2 * h);
        double ft = (f.evaluate(y, x, t + h) - f.evaluate(y, x, t - h)) / (2 * h);
        double fy = (f.evaluate(y + h, x, t) - f.evaluate(y - h, x, t)) / (2 * h);
        EXPECT_NEAR(f.diff_angle(0).evaluate(y, x, t), fx, 1e-7);
        EXPECT_NEAR(f.diff_time().evaluate(y, x, t), ft, 1e-7);
        EXPECT_NEAR(f.diff_action(0).evaluate(y, x, t), fy, 1e-7);
    }
}

TEST(Series, ActionPowerReexpandsAboutBasePoint) {
    auto ctx = small_context();
    auto f = Series::action_power(ctx, {3});
    for (double y : {0.97, 1.01, 1.05}) EXPECT_NEAR(f.evaluate(y, 0.0, 0.0), y * y * y, 1e-13);
}

TEST(Series, ReciprocalInvertsWithinTaylorDegree) {
    auto ctx = small_context();
    auto g = Series::action_power(ctx, {1}) * 2.0 - Series::constant(ctx, 1.0);  // 2y - 1
    auto inv = taylor_reciprocal(g);
    auto one = g * inv;
    EXPECT_NEAR(one.evaluate(1.01, 0.0, 0.0), 1.0, 1e-14);
    EXPECT_LT(max_diff(one, Series::constant(ctx, 1.0)), 1e-12);
    // the surrogate is accurate near the base point
    EXPECT_NEAR(inv.evaluate(1.02, 0.0, 0.0), 1.0 / (2 * 1.02 - 1), 1e-10);
}

TEST(Series, ProjectionsPartitionTheSeries) {
    std::mt19937 rng(17);
    auto ctx = small_context();
    ResonanceStructure res({{1, -1}}, 20);
    for (int trial = 0; trial < 50; ++trial) {
        auto f = random_series(rng, ctx, 40, 6, 20);
        f += Series::trig(ctx, FourierMode{{3}, -3}, {1}, 1.0, 0.5);
        Series sum(ctx);
        size_t modes = 0;
        for (Part p : {Part::average, Part::nonresonant_leqK, Part::resonant_leqK, Part::tail_gtK}) {
            auto part = f.project(p, res);
            for (auto& [m, z] : part.terms()) EXPECT_EQ(res.classify(m), p);
            modes += part.mode_count();
            sum += part;
        }
        EXPECT_EQ(modes, f.mode_count());
        EXPECT_LT(max_diff(sum, f), 1e-15);
    }
}

TEST(Series, ResonanceMembershipUsesTheLattice) {
    ResonanceStructure res({{1, -1}}, 20);
    EXPECT_EQ(res.classify(FourierMode{{0}, 0}), Part::average);
    EXPECT_EQ(res.classify(FourierMode{{2}, -2}), Part::resonant_leqK);
    EXPECT_EQ(res.classify(FourierMode{{1}, 0}), Part::nonresonant_leqK);
    EXPECT_EQ(res.classify(FourierMode{{11}, -11}), Part::tail_gtK);
    ResonanceStructure none({}, 20);
    EXPECT_EQ(none.classify(FourierMode{{1}, -1}), Part::nonresonant_leqK);
}

TEST(Series, NormIsSubmultiplicative) {
    std::mt19937 rng(23);
    auto ctx = small_context();
    for (int trial = 0; trial < 100; ++trial) {
        auto a = random_series(rng, ctx, 10, 6), b = random_series(rng, ctx, 10, 6);
        for (auto ev : {NormEvaluator::sampled, NormEvaluator::majorant}) {
            double lhs = (a * b).norm(0.05, 0.1, ev);
            double rhs = a.norm(0.05, 0.1, ev) * b.norm(0.05, 0.1, ev);
            EXPECT_LE(lhs, rhs * (1 + 1e-12));
        }
        EXPECT_LE((a + b).norm(0.05, 0.1), (a.norm(0.05, 0.1) + b.norm(0.05, 0.1)) * (1 + 1e-12));
    }
}

TEST(Series, MajorantDominatesSampledNorm) {
    std::mt19937 rng(29);
    auto ctx = small_context();
    for (int trial = 0; trial < 50; ++trial) {
        auto a = random_series(rng, ctx, 10, 6);
        EXPECT_LE(a.norm(0.05, 0.1, NormEvaluator::sampled), a.norm(0.05, 0.1, NormEvaluator::majorant) * (1 + 1e-12));
    }
}

TEST(Series, NormOfSingleTerm) {
    auto ctx = small_context();
    auto f = Series::trig(ctx, FourierMode{{2}, -1}, {0}, 3.0, 4.0);
    EXPECT_NEAR(f.norm(0.05, 0.1), 5.0 * std::exp(0.3), 1e-12);
}

TEST(Series, HomologicalSolutionHasSmallResidual) {
    std::mt19937 rng(31);
    auto ctx = small_context();
    ResonanceStructure res({{1, -1}}, 20, 0.0);
    std::vector<Series> omega{Series::action_power(ctx, {1})};
    for (int trial = 0; trial < 30; ++trial) {
        auto L = random_series(rng, ctx, 12, 6, 10).project(Part::nonresonant_leqK, res);
        if (L.empty()) continue;
        auto psi = solve_homological(L, omega, res);
        auto residual = omega[0] * psi.diff_angle(0) + psi.diff_time() + L;
        EXPECT_LE(residual.norm(0.05, 0.1), 1e-10 * L.norm(0.05, 0.1));
    }
}

TEST(Series, HomologicalRejectsResonantInput) {
    auto ctx = small_context();
    ResonanceStructure res({{1, -1}}, 20);
    std::vector<Series> omega{Series::action_power(ctx, {1})};
    auto L = Series::trig(ctx, FourierMode{{1}, -1}, {0}, 1.0, 0.0);
    EXPECT_THROW(solve_homological(L, omega, res), StructuralError);
}

TEST(Series, HomologicalReportsSingularDivisor) {
    // omega = 1 at the base point and no lattice: mode (1, -1) has a vanishing divisor
    auto ctx = SeriesContext::make({1.0}, 6, 40);
    ResonanceStructure res({}, 20);
    std::vector<Series> omega{Series::action_power(ctx, {1})};
    auto L = Series::trig(ctx, FourierMode{{1}, -1}, {0}, 1.0, 0.0);
    EXPECT_THROW(solve_homological(L, omega, res), SingularDivisor);
}

TEST(Series, TailBoundDominatesExactTail) {
    std::mt19937 rng(37);
    auto ctx = small_context();
    ResonanceStructure res({{1, -1}}, 20);
    for (int trial = 0; trial < 100; ++trial) {
        auto f = random_series(rng, ctx, 40, 6, 30);
        double exact = f.project(Part::tail_gtK, res).norm(0.05, 0.1);
        double bound = tail_bound(f, 20, 0.05, 0.05, 0.1);
        EXPECT_LE(exact, bound * (1 + 1e-12)) << "trial " << trial;
    }
}

TEST(Series, TailBoundRejectsBadWidth) {
    auto ctx = small_context();
    auto f = Series::constant(ctx, 1.0);
    EXPECT_THROW(tail_bound(f, 20, 0.2, 0.05, 0.1), DomainError);
    EXPECT_THROW(tail_bound(f, 20, 0.0, 0.05, 0.1), DomainError);
}

TEST(Series, FourierCutoffDropsAndFlags) {
    auto ctx = SeriesContext::make({1.01}, 6, 5);
    auto a = Series::trig(ctx, FourierMode{{3}, 0}, {0}, 1.0, 0.0);
    auto p = a * a;
    EXPECT_TRUE(p.truncated());
    EXPECT_FALSE(a.truncated());
}

TEST(Series, ChopRemovesSmallCoefficients) {
    auto ctx = small_context();
    auto f = Series::trig(ctx, FourierMode{{1}, 0}, {0}, 1e-15, 0.0) + Series::trig(ctx, FourierMode{{2}, 0}, {0}, 1.0, 0.0);
    EXPECT_EQ(f.chopped(1e-12).mode_count(), 1u);
}

TEST(Series, DumpIsSortedAndStable) {
    auto ctx = small_context();
    auto f = Series::trig(ctx, FourierMode{{2}, -1}, {1}, 1.5, 0.0) + Series::trig(ctx, FourierMode{{1}, 0}, {0}, 0.0, 2.0);
    EXPECT_EQ(f.dump(), "(1, 0, 0) 0 2\n(2, -1, 1) 1.5 0\n");
    EXPECT_EQ(f.dump(), (Series::trig(ctx, FourierMode{{1}, 0}, {0}, 0.0, 2.0) +
                         Series::trig(ctx, FourierMode{{2}, -1}, {1}, 1.5, 0.0))
                            .dump());
}

TEST(Series, MismatchedContextsAreRejected) {
    auto a = Series::constant(small_context(1.01), 1.0);
    auto b = Series::constant(small_context(1.02), 1.0);
    EXPECT_THROW(a + b, StructuralError);
}
