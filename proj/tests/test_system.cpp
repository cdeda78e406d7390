#include <gtest/gtest.h>

#include "support.hpp"

using namespace rnf;

namespace {

struct Direct {
    int fast;          // time frequency in the first perturbing term
    int forcing;       // 0: pair, 1: angle only, 2: time only
};

Direct direct_for(const std::string& n) {
    if (n == "e19") return {1, 0};
    if (n == "e20") return {1, 1};
    if (n == "A1") return {6, 0};
    return {1, 2};
}

// xdot, ydot of the bundled examples written out by hand (eta = 0)
std::pair<double, double> direct_field(const std::string& n, double y, double x, double t, double e, double m) {
    auto d = direct_for(n);
    double h10_x = std::sin(x - d.fast * t) + std::sin(x);
    double f01 = d.forcing == 0 ? -std::sin(x - t) - std::sin(x)
                 : d.forcing == 1 ? -std::sin(x)
                                  : -std::sin(6 * t);
    return {y + m * f01, -e * h10_x - m * y};
}

}  // namespace

TEST(System, FixturesMatchHandWrittenFields) {
    for (auto& n : fixture_names()) {
        auto sys = fixture(n);
        for (double x : {0.0, 1.3, 4.0})
            for (double y : {0.99, 1.01, 1.05})
                for (double t : {0.0, 0.7}) {
                    double yy = y, xx = x;
                    auto v = eval_vector_field(sys, {}, std::span<const double>(&yy, 1), std::span<const double>(&xx, 1),
                                               t, 1e-2, 2e-2);
                    auto [xd, yd] = direct_field(n, y, x, t, 1e-2, 2e-2);
                    EXPECT_NEAR(v.xdot[0], xd, 1e-13) << n;
                    EXPECT_NEAR(v.ydot[0], yd, 1e-13) << n;
                }
    }
}

TEST(System, OutsideDomainIsFlagged) {
    auto sys = fixture("e19");
    double y = 1.2, x = 0.0;
    auto v = eval_vector_field(sys, {}, std::span<const double>(&y, 1), std::span<const double>(&x, 1), 0.0, 0, 0);
    EXPECT_TRUE(v.outside_domain);
}

TEST(System, ShippedFixtureFilesMatchEmbeddedText) {
    for (auto& n : fixture_names()) {
        auto text = rnf::testing::read_file(std::string(RNF_SOURCE_DIR) + "/data/fixtures/" + n + ".json");
        EXPECT_EQ(text, fixture_json(n)) << n;
        EXPECT_EQ(load_system(std::string(RNF_SOURCE_DIR) + "/data/fixtures/" + n + ".json").name, n);
    }
}

TEST(System, NonResonanceMarginOfFixtures) {
    // omega = y on |y - 1.01| <= 0.05: closest non-lattice divisor is |k y + j| with (k, j) = (1, -1) excluded,
    // so the margin comes from modes like (1, 0) or (20, -20 +- 1) evaluated at the ends of the ball
    auto sys = fixture("e19");
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 33; ++i) {
        double y = 1.01 + 0.05 * std::cos(std::numbers::pi * i / 32);
        for (int k = -20; k <= 20; ++k)
            for (int j = -20; j <= 20; ++j) {
                if (std::abs(k) + std::abs(j) > 20 || (k == 0 && j == 0) || k == -j) continue;
                best = std::min(best, std::abs(k * y + j));
            }
    }
    EXPECT_NEAR(sys.resonance.a, best, 1e-14);
    EXPECT_GT(sys.resonance.a, 0.0);
}

TEST(System, DefaultsMatchTheTableParameters) {
    auto sys = fixture("A1");
    EXPECT_EQ(sys.resonance.K, 20);
    EXPECT_EQ(sys.ctx->fourier_cutoff, 40);
    EXPECT_DOUBLE_EQ(sys.y0()[0], 1.01);
    EXPECT_DOUBLE_EQ(sys.radii.r0, 0.05);
    EXPECT_DOUBLE_EQ(sys.radii.s0, 0.1);
    EXPECT_DOUBLE_EQ(sys.radii.delta, 0.01);
}

TEST(System, BadConfigsAreConfigErrors) {
    EXPECT_THROW(build_system("{not json"), ConfigError);
    EXPECT_THROW(build_system(R"({"ell": 1})"), ConfigError);
    EXPECT_THROW(build_system(R"({"ell": 1, "y0": [1.0, 2.0], "omega": [[{"deg": [1], "coeff": 1.0}]]})"),
                 ConfigError);
    EXPECT_THROW(load_system("/nonexistent/system.json"), ConfigError);
    // omega = y at y0 = 1 without a lattice: the (1, -1) divisor vanishes
    EXPECT_THROW(build_system(R"({"ell": 1, "y0": [1.0], "omega": [[{"deg": [1], "coeff": 1.0}]]})"), ConfigError);
    // radii out of order
    auto text = fixture_json("e19");
    auto pos = text.find("\"R0\": 0.024");
    text.replace(pos, 11, "\"R0\": 0.900");
    EXPECT_THROW(build_system(text), ConfigError);
}

TEST(System, ResolveAcceptsNamesAndPaths) {
    EXPECT_EQ(resolve_system("A2").name, "A2");
    EXPECT_EQ(resolve_system(std::string(RNF_SOURCE_DIR) + "/data/fixtures/e20.json").name, "e20");
    EXPECT_THROW(resolve_system("no-such-system"), ConfigError);
}
