#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "symdyn/stats.hpp"
#include "symdyn/synthgen.hpp"

namespace {

using symdyn::Scenario;

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double mx = symdyn::mean(x), my = symdyn::mean(y);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    return num / den;
}

double skewness(const std::vector<double>& xs) {
    const double m = symdyn::mean(xs);
    const double sd = symdyn::stddev(xs);
    double s3 = 0.0;
    for (double x : xs) s3 += std::pow((x - m) / sd, 3.0);
    return s3 / static_cast<double>(xs.size());
}

TEST(Scenarios, SameSeedReproducesBitIdentically) {
    auto a = symdyn::gen_scenario(Scenario::Interaction, 300, 11);
    auto b = symdyn::gen_scenario(Scenario::Interaction, 300, 11);
    EXPECT_TRUE(a.values == b.values);
    auto c = symdyn::gen_scenario(Scenario::Interaction, 300, 12);
    EXPECT_FALSE(a.values == c.values);
}

TEST(Scenarios, StructuralEquationsHold) {
    // The residual X3_t - f(X1_{t-1}, X2_{t-1}) must be unit white noise.
    for (Scenario sc :
         {Scenario::Linear, Scenario::Interaction, Scenario::Quadratic}) {
        auto ts = symdyn::gen_scenario(sc, 5000, 99);
        std::vector<double> resid;
        for (int t = 1; t < ts.length(); ++t) {
            const double p1 = ts.values(t - 1, 0);
            const double p2 = ts.values(t - 1, 1);
            double drive = 0.0;
            switch (sc) {
                case Scenario::Linear: drive = 3.0 * p2; break;
                case Scenario::Interaction: drive = 3.0 * p1 * p2; break;
                case Scenario::Quadratic: drive = 3.0 * p2 * p2; break;
            }
            resid.push_back(ts.values(t, 2) - drive);
        }
        EXPECT_NEAR(symdyn::mean(resid), 0.0, 0.05) << symdyn::scenario_name(sc);
        EXPECT_NEAR(symdyn::variance(resid), 1.0, 0.06)
            << symdyn::scenario_name(sc);
        EXPECT_LT(std::abs(skewness(resid)), 0.3) << symdyn::scenario_name(sc);
    }
}

TEST(Scenarios, LinearSlopeRecoverable) {
    auto ts = symdyn::gen_scenario(Scenario::Linear, 5000, 7);
    std::vector<double> x2lag, x3;
    for (int t = 1; t < ts.length(); ++t) {
        x2lag.push_back(ts.values(t - 1, 1));
        x3.push_back(ts.values(t, 2));
    }
    EXPECT_NEAR(ols_slope(x2lag, x3), 3.0, 0.05);
}

TEST(Scenarios, DriversAreIndependentUnitNormals) {
    auto ts = symdyn::gen_scenario(Scenario::Linear, 5000, 3);
    auto x1 = ts.column(0);
    auto x2 = ts.column(1);
    EXPECT_NEAR(symdyn::mean(x1), 0.0, 0.05);
    EXPECT_NEAR(symdyn::variance(x1), 1.0, 0.06);
    EXPECT_LT(std::abs(skewness(x1)), 0.3);
    EXPECT_NEAR(symdyn::pearson(x1, x2), 0.0, 0.05);
}

TEST(Scenarios, GroundTruthSets) {
    auto lin = symdyn::scenario_truth(Scenario::Linear);
    ASSERT_EQ(lin.edges.size(), 1u);
    EXPECT_TRUE(lin.contains(1, 2, 1));

    auto quad = symdyn::scenario_truth(Scenario::Quadratic);
    ASSERT_EQ(quad.edges.size(), 1u);
    EXPECT_TRUE(quad.contains(1, 2, 1));

    auto inter = symdyn::scenario_truth(Scenario::Interaction);
    ASSERT_EQ(inter.edges.size(), 2u);
    EXPECT_TRUE(inter.contains(0, 2, 1));
    EXPECT_TRUE(inter.contains(1, 2, 1));
}

TEST(Scm, EmptySpecIsWhiteNoise) {
    symdyn::ScmSpec spec;
    spec.n_vars = 4;
    auto ts = symdyn::gen_scm(spec, 5000, 1.0, 21);
    EXPECT_EQ(ts.n_vars(), 4);
    EXPECT_EQ(ts.length(), 5000);
    for (int j = 0; j < 4; ++j) {
        auto col = ts.column(j);
        EXPECT_NEAR(symdyn::mean(col), 0.0, 0.05);
        EXPECT_NEAR(symdyn::variance(col), 1.0, 0.06);
        EXPECT_LT(std::abs(symdyn::autocorrelation(col, 1)), 0.05);
    }
    EXPECT_NEAR(symdyn::pearson(ts.column(0), ts.column(3)), 0.0, 0.05);
    EXPECT_TRUE(symdyn::scm_truth(spec).edges.empty());
}

TEST(Scm, ChainTruthHasTwoEdges) {
    symdyn::ScmSpec spec;
    spec.n_vars = 3;
    spec.terms.push_back({.dst = 1, .src = 0, .lag = 1, .coef = 0.8});
    spec.terms.push_back({.dst = 2, .src = 1, .lag = 1, .coef = 0.8});
    auto gt = symdyn::scm_truth(spec);
    ASSERT_EQ(gt.edges.size(), 2u);
    EXPECT_TRUE(gt.contains(0, 1, 1));
    EXPECT_TRUE(gt.contains(1, 2, 1));

    auto ts = symdyn::gen_scm(spec, 4000, 1.0, 17);
    std::vector<double> x0lag, x1;
    for (int t = 1; t < ts.length(); ++t) {
        x0lag.push_back(ts.values(t - 1, 0));
        x1.push_back(ts.values(t, 1));
    }
    EXPECT_NEAR(ols_slope(x0lag, x1), 0.8, 0.05);
}

TEST(Scm, Ar1SelfLinkReachesStationarity) {
    symdyn::ScmSpec spec;
    spec.n_vars = 1;
    spec.terms.push_back({.dst = 0, .src = 0, .lag = 1, .coef = 0.7});
    auto ts = symdyn::gen_scm(spec, 2000, 1.0, 13);
    auto col = ts.column(0);
    EXPECT_NEAR(symdyn::autocorrelation(col, 1), 0.7, 0.05);
    // Stationary AR(1) variance is 1/(1-0.49); burn-in should get us there.
    EXPECT_NEAR(symdyn::variance(col), 1.0 / 0.51, 0.25);
}

TEST(Scm, ProductAndSquareLinks) {
    symdyn::ScmSpec spec;
    spec.n_vars = 3;
    spec.terms.push_back({.dst = 2,
                          .src = 0,
                          .lag = 1,
                          .func = symdyn::LinkFunc::Product,
                          .coef = 3.0,
                          .src2 = 1,
                          .lag2 = 1});
    auto ts = symdyn::gen_scm(spec, 3000, 1.0, 29);
    std::vector<double> prod, x2;
    for (int t = 1; t < ts.length(); ++t) {
        prod.push_back(ts.values(t - 1, 0) * ts.values(t - 1, 1));
        x2.push_back(ts.values(t, 2));
    }
    EXPECT_NEAR(ols_slope(prod, x2), 3.0, 0.1);

    auto gt = symdyn::scm_truth(spec);
    ASSERT_EQ(gt.edges.size(), 2u);
}

TEST(Scm, ContemporaneousCycleRejected) {
    symdyn::ScmSpec spec;
    spec.n_vars = 2;
    spec.terms.push_back({.dst = 1, .src = 0, .lag = 0, .coef = 1.0});
    spec.terms.push_back({.dst = 0, .src = 1, .lag = 0, .coef = 1.0});
    EXPECT_THROW(symdyn::gen_scm(spec, 100, 1.0, 1), symdyn::ConfigError);
}

TEST(Scm, ContemporaneousLinkIsInstant) {
    symdyn::ScmSpec spec;
    spec.n_vars = 2;
    spec.terms.push_back({.dst = 1, .src = 0, .lag = 0, .coef = 2.0});
    auto ts = symdyn::gen_scm(spec, 3000, 1.0, 41);
    std::vector<double> x0 = ts.column(0), x1 = ts.column(1);
    EXPECT_NEAR(ols_slope(x0, x1), 2.0, 0.05);
}

}  // namespace
