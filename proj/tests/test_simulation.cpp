#include <cmath>
#include <cstdlib>
#include <vector>

#include <gtest/gtest.h>

#include "lrroc/random.hpp"
#include "lrroc/simulation.hpp"

using namespace lrroc;

namespace {

struct Moments {
    double mean = 0, var = 0;
};

template <class Draw>
Moments moments(Draw draw, int n) {
    double s = 0, ss = 0;
    for (int i = 0; i < n; ++i) {
        const double v = draw();
        s += v;
        ss += v * v;
    }
    const double m = s / n;
    return {m, ss / n - m * m};
}

}  // namespace

TEST(RandomStream, UniformStaysInsideTheOpenInterval) {
    RandomStream rng(1, 2, 3);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(RandomStream, StreamsAreKeyedBySeedIndexAndTag) {
    RandomStream a(7, 0, 1), b(7, 0, 1), c(7, 1, 1), d(7, 0, 2), e(8, 0, 1);
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
    EXPECT_NE(x, d.next_u64());
    EXPECT_NE(x, e.next_u64());
}

TEST(Generators, MomentsAtOneMillionDraws) {
    const int n = 1000000;
    RandomStream rng(2024, 0, 0);
    auto m = moments([&] { return rng.normal(10.0, 1.0); }, n);
    EXPECT_NEAR(m.mean, 10.0, 0.01);
    EXPECT_NEAR(m.var, 1.0, 0.01);

    struct G {
        double shape, rate;
    };
    for (G g : {G{2, 1}, G{3, 0.937}, G{4, 0.944}, G{5, 0.827}, G{0.4, 2.0}}) {
        m = moments([&] { return rng.gamma(g.shape, g.rate); }, n);
        EXPECT_NEAR(m.mean, g.shape / g.rate, 0.01 * g.shape / g.rate);
        // Small shapes are heavy-tailed enough that the sample variance wanders by a few percent.
        const double vtol = g.shape < 1 ? 0.03 : 0.01;
        EXPECT_NEAR(m.var, g.shape / (g.rate * g.rate), vtol * g.shape / (g.rate * g.rate));
    }
    struct B {
        double a, b;
    };
    for (B p : {B{2, 2}, B{3.838, 2}, B{6.148, 2}, B{11.014, 2}}) {
        m = moments([&] { return rng.beta(p.a, p.b); }, n);
        const double s = p.a + p.b;
        const double var = p.a * p.b / (s * s * (s + 1));
        EXPECT_NEAR(m.mean, p.a / s, 0.01 * p.a / s);
        EXPECT_NEAR(m.var, var, 0.01 * var);
    }
}

TEST(TrueSummary, NormalClosedForms) {
    const auto sc = *find_scenario("normal-0.5", 100, 100);
    EXPECT_NEAR(sc.true_auc, 0.830, 5e-4);
    EXPECT_NEAR(sc.true_cutoff, 10.6745, 1e-12);
    EXPECT_NEAR(sc.true_j, 2 * normal_cdf(0.6745) - 1, 1e-12);
    EXPECT_NEAR(sc.true_j, 0.5, 5e-4);
}

TEST(TrueSummary, QuadratureAgreesWithRocIntegral) {
    for (const auto& sc : scenario_catalog()) {
        const auto t = true_summary(sc);
        double area = 0;
        const int g = 20000;
        for (int k = 0; k < g; ++k) area += t.roc((k + 0.5) / g);
        EXPECT_NEAR(t.auc, area / g, 1e-5) << sc.name;
        // At the cutoff the two densities cross, so J is a maximum of F0 - F1.
        for (double eps : {-1e-3, 1e-3})
            EXPECT_LE(t.cdf0(t.cutoff + eps) - t.cdf1(t.cutoff + eps), t.youden + 1e-12) << sc.name;
        EXPECT_GT(t.youden, 0.29);
        EXPECT_LT(t.youden, 0.71);
    }
    EXPECT_NEAR(find_scenario("gamma-0.5", 10, 10)->true_auc, 0.830, 5e-4);
}

TEST(Metrics, L1L2Examples) {
    auto id = [](double s) { return s; };
    const auto z = l1_l2_distance(id, id);
    EXPECT_EQ(z.l1, 0.0);
    EXPECT_EQ(z.l2, 0.0);
    const auto d = l1_l2_distance([](double s) { return s + 0.1; }, id);
    EXPECT_NEAR(d.l1, 0.1, 1e-12);
    EXPECT_NEAR(d.l2, 0.1, 1e-12);
}

// A staircase evaluated directly versus through its vertex list agrees up to
// the grid resolution.
TEST(Metrics, StaircaseSelfConsistency) {
    const auto sc = *find_scenario("normal-0.5", 60, 60);
    const auto fit = fit_bp(generate(sc, 3, 0));
    const auto v = fit.cdfs.vertices();
    auto from_vertices = [&](double s) {
        double y = 0.0;
        for (const auto& [vx, vy] : v) {
            if (vx > s + StepCdfPair::kQuantileSlack) break;
            y = vy;
        }
        return y;
    };
    auto direct = [&](double s) { return fit.cdfs.roc(s); };
    const auto d = l1_l2_distance(direct, from_vertices, 2001);
    EXPECT_LE(d.l1, 1e-3);
    const auto d2 = l1_l2_distance(direct, [&](double s) { return fit.cdfs.roc(s); }, 4001);
    EXPECT_EQ(d2.l1, 0.0);
}

TEST(Metrics, RbMseExamples) {
    const std::vector<double> same{2.0, 2.0, 2.0};
    EXPECT_EQ(rb_mse(same, 2.0).rb_percent, 0.0);
    EXPECT_EQ(rb_mse(same, 2.0).mse, 0.0);
    const std::vector<double> up{2.2};
    EXPECT_NEAR(rb_mse(up, 2.0).rb_percent, 10.0, 1e-12);
    const std::vector<double> pm{2.5, 1.5};
    EXPECT_NEAR(rb_mse(pm, 2.0).rb_percent, 0.0, 1e-12);
    EXPECT_NEAR(rb_mse(pm, 2.0).mse, 0.25, 1e-15);
    try {
        rb_mse(same, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ZeroTruth);
    }
}

TEST(RunScenario, SingleReplicate) {
    const auto sc = *find_scenario("beta-0.5", 30, 30);
    const std::vector<Method> m{Method::Ecdf};
    const auto r = run_scenario(sc, m, 1, 5);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].replications, 1);
    EXPECT_EQ(r[0].method, "ecdf");
    EXPECT_GE(r[0].l2_mean, r[0].l1_mean - 1e-9);
    EXPECT_LE(r[0].l2_mean, 1.0);
}

TEST(RunScenario, DeterministicAcrossWorkerCounts) {
    const auto sc = *find_scenario("gamma-0.3", 40, 50);
    const std::vector<Method> m{Method::Bp, Method::Ecdf, Method::Kernel, Method::BoxCox};
    setenv("LRROC_THREADS", "1", 1);
    const auto a = run_scenario(sc, m, 12, 77);
    setenv("LRROC_THREADS", "4", 1);
    const auto b = run_scenario(sc, m, 12, 77);
    unsetenv("LRROC_THREADS");
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].l1_mean, b[k].l1_mean);
        EXPECT_EQ(a[k].l2_mean, b[k].l2_mean);
        EXPECT_EQ(a[k].auc.mse, b[k].auc.mse);
        EXPECT_EQ(a[k].youden.rb_percent, b[k].youden.rb_percent);
        EXPECT_EQ(a[k].cutoff.mse, b[k].cutoff.mse);
        EXPECT_EQ(a[k].order_counts, b[k].order_counts);
    }
    const auto d1 = generate(sc, 77, 5), d2 = generate(sc, 77, 5);
    EXPECT_TRUE(std::equal(d1.healthy().begin(), d1.healthy().end(), d2.healthy().begin()));
}

TEST(BootstrapCi, ConstantStatisticGivesZeroWidth) {
    // Separated groups: every resample has ECDF AUC exactly 1.
    const TwoSampleData d({1, 2, 3, 4}, {10, 11, 12});
    const std::vector<Statistic> st{Statistic::Auc, Statistic::Youden};
    const auto ci = bootstrap_ci(d, st, Method::Ecdf, 200, 0.95, 3);
    for (const auto& c : ci) {
        EXPECT_EQ(c.point, 1.0);
        EXPECT_EQ(c.lower, 1.0);
        EXPECT_EQ(c.upper, 1.0);
    }
}

TEST(BootstrapCi, PercentilesOrderedAndReproducible) {
    const auto sc = *find_scenario("normal-0.5", 50, 50);
    const auto d = generate(sc, 1, 0);
    const std::vector<Statistic> st{Statistic::Auc, Statistic::Youden, Statistic::Cutoff};
    for (Method m : {Method::Bp, Method::Ecdf, Method::Kernel, Method::BoxCox}) {
        const auto a = bootstrap_ci(d, st, m, 60, 0.9, 11);
        const auto b = bootstrap_ci(d, st, m, 60, 0.9, 11);
        ASSERT_EQ(a.size(), 3u);
        for (std::size_t k = 0; k < 3; ++k) {
            EXPECT_LE(a[k].lower, a[k].upper);
            EXPECT_EQ(a[k].lower, b[k].lower);
            EXPECT_EQ(a[k].upper, b[k].upper);
            EXPECT_EQ(a[k].replicates, 60);
        }
    }
}

TEST(BootstrapCi, RejectsTooFewReplicates) {
    const TwoSampleData d({1, 2, 3, 4}, {10, 11, 12});
    const std::vector<Statistic> st{Statistic::Auc};
    EXPECT_THROW(bootstrap_ci(d, st, Method::Ecdf, 39, 0.95, 1), Error);
    EXPECT_NO_THROW(bootstrap_ci(d, st, Method::Ecdf, 40, 0.95, 1));
    EXPECT_THROW(bootstrap_ci(d, st, Method::Ecdf, 100, 1.0, 1), Error);
}
