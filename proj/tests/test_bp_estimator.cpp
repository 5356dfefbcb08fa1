#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include <gtest/gtest.h>

#include "lrroc/bp_estimator.hpp"
#include "lrroc/simulation.hpp"

using namespace lrroc;

namespace {

std::vector<TwoSampleData> sample_datasets() {
    std::vector<TwoSampleData> out;
    const auto cat = scenario_catalog(40, 60);
    for (std::size_t k = 0; k < cat.size(); ++k)
        for (std::uint64_t r = 0; r < 4; ++r) out.push_back(generate(cat[k], 100 + k, r));
    return out;
}

}  // namespace

TEST(FitBp, MassesAndOrderingProperties) {
    for (const auto& data : sample_datasets()) {
        const auto fit = fit_bp(data);
        ASSERT_TRUE(fit.report.converged);
        const auto& f0 = fit.cdfs.cumulative(0);
        const auto& f1 = fit.cdfs.cumulative(1);
        EXPECT_NEAR(f0.back(), 1.0, 1e-8);
        EXPECT_NEAR(f1.back(), 1.0, 1e-8);
        double ratio_prev = 0.0;
        for (std::size_t i = 0; i < fit.support.size(); ++i) {
            EXPECT_EQ(fit.phi[i], static_cast<double>(fit.support.a[i] + fit.support.b[i]) / fit.n);
            EXPECT_GE(fit.p0[i], 0.0);
            EXPECT_GE(fit.p1[i], 0.0);
            EXPECT_LE(f1[i], f0[i] + 1e-10);
            if (fit.p0[i] > 0.0) {
                const double ratio = fit.p1[i] / fit.p0[i];
                EXPECT_GE(ratio, ratio_prev * (1 - 1e-12));
                ratio_prev = ratio;
            }
        }
        // Concave staircase: vertex-to-vertex slopes never increase as s grows.
        const auto v = fit.cdfs.vertices();
        double slope_prev = HUGE_VAL;
        for (std::size_t k = 1; k < v.size(); ++k) {
            const double dx = v[k].first - v[k - 1].first, dy = v[k].second - v[k - 1].second;
            if (dx <= 1e-15) continue;
            const double slope = dy / dx;
            EXPECT_LE(slope, slope_prev * (1 + 1e-9) + 1e-12);
            slope_prev = slope;
        }
        double prev = 0.0;
        for (int k = 0; k <= 1000; ++k) {
            const double x = fit.spec.t_min + (fit.spec.t_max - fit.spec.t_min) * k / 1000.0;
            const double th = theta_hat(fit, x);
            EXPECT_GE(th, prev);
            prev = th;
        }
    }
}

TEST(FitBp, AucMatchesGridIntegralOfRoc) {
    for (const auto& data : sample_datasets()) {
        const auto fit = fit_bp(data);
        const int g = 20001;
        double area = 0;
        for (int k = 0; k < g; ++k) area += roc_eval(fit, (k + 0.5) / g);
        EXPECT_NEAR(auc(fit), area / g, 2e-4);
    }
}

TEST(FitBp, IdenticalSamplesGiveNoDiscrimination) {
    const TwoSampleData data({1, 2, 3, 4, 5}, {1, 2, 3, 4, 5});
    BpOptions opt;
    opt.order = 2;
    const auto fit = fit_bp(data, opt);
    for (std::size_t i = 0; i < fit.support.size(); ++i) {
        EXPECT_NEAR(fit.p0[i], fit.phi[i] / (1.0 - fit.lambda) * 0.5, 1e-12);
        EXPECT_NEAR(fit.p0[i], fit.p1[i], 1e-12);
    }
    const double m = 5.0;
    EXPECT_NEAR(auc(fit), (m - 1) / (2 * m), 1e-12);
    EXPECT_NEAR(theta_hat(fit, 3.3), 0.5, 1e-12);
    for (const auto& [x, y] : fit.cdfs.vertices()) EXPECT_NEAR(x, y, 1e-12);

    const auto y = youden_cutoff(fit);
    EXPECT_EQ(y.method, CutoffMethod::Root);
    EXPECT_DOUBLE_EQ(y.cutoff, 3.0);
    EXPECT_NEAR(y.youden, 0.0, 1e-12);
    EXPECT_NEAR(gof_statistic(fit, data), 0.0, 1e-12);
}

TEST(StepCdfPair, EqualMassesClosedFormAuc) {
    for (int m : {1, 2, 7, 50}) {
        std::vector<double> t(m), p(m, 1.0 / m);
        for (int i = 0; i < m; ++i) t[i] = i;
        const StepCdfPair c(t, p, p);
        EXPECT_NEAR(c.auc(), (m - 1.0) / (2.0 * m), 1e-12);
    }
}

TEST(FitBp, SeparatedSamples) {
    const TwoSampleData data({1, 2, 3}, {4, 5, 6});
    const auto fit = fit_bp(data);
    EXPECT_TRUE(fit.report.separation_flag);
    // The predictor cap keeps boundary probabilities a little away from 0 and 1.
    EXPECT_NEAR(auc(fit), 1.0, 1e-3);
    EXPECT_NEAR(fit.cdfs.cumulative(1).back(), 1.0, 1e-12);
    EXPECT_GE(roc_eval(fit, 0.0), 0.0);
    EXPECT_EQ(roc_eval(fit, 1.0), 1.0);
    const auto y = youden_cutoff(fit);
    EXPECT_NEAR(y.youden, 1.0, 2e-3);
    EXPECT_GE(y.cutoff, 3.0);
    EXPECT_LT(y.cutoff, 4.0);
}

TEST(FitBp, CdfAndRocEdges) {
    const auto data = sample_datasets().front();
    const auto fit = fit_bp(data);
    EXPECT_EQ(cdf_at(fit, 0, fit.spec.t_min - 1.0), 0.0);
    EXPECT_EQ(cdf_at(fit, 1, fit.spec.t_min - 1e-9), 0.0);
    EXPECT_NEAR(cdf_at(fit, 0, fit.spec.t_max), 1.0, 1e-8);
    EXPECT_NEAR(cdf_at(fit, 1, fit.spec.t_max + 5.0), 1.0, 1e-8);
    EXPECT_EQ(roc_eval(fit, 1.0), 1.0);
    double prev = 0.0;
    for (int k = 0; k <= 2000; ++k) {
        const double r = roc_eval(fit, k / 2000.0);
        EXPECT_GE(r, prev);
        prev = r;
    }
    for (double s : {-0.01, 1.01, std::nan("")}) {
        try {
            roc_eval(fit, s);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::DomainError);
        }
    }
}

TEST(FitBp, ThetaIsConstantOutsideTheSupport) {
    const auto fit = fit_bp(sample_datasets()[3]);
    EXPECT_EQ(theta_hat(fit, fit.spec.t_min - 100.0), theta_hat(fit, fit.spec.t_min));
    EXPECT_EQ(theta_hat(fit, fit.spec.t_max + 100.0), theta_hat(fit, fit.spec.t_max));
    const auto& c = fit.coefficients();
    const auto row = basis_row(fit.spec.t_min, fit.spec, fit.order);
    EXPECT_NEAR(theta_hat(fit, fit.spec.t_min),
                sigmoid(c.alpha0 + row.dot(c.slopes) + logit(fit.lambda)), 1e-15);
}

TEST(YoudenCutoff, RootAgreesWithSupportMaximum) {
    int roots = 0;
    for (const auto& data : sample_datasets()) {
        const auto fit = fit_bp(data);
        const auto y = youden_cutoff(fit);
        EXPECT_NEAR(y.youden, cdf_at(fit, 0, y.cutoff) - cdf_at(fit, 1, y.cutoff), 1e-10);
        if (y.method != CutoffMethod::Root) continue;
        ++roots;
        EXPECT_NEAR(std::abs(eta_hat(fit, y.cutoff)), 0.0, 1e-8);
        EXPECT_NEAR(y.youden, fit.cdfs.youden_argmax().first, 1e-8);
    }
    EXPECT_GT(roots, 20);
}

TEST(FitBp, FixedOrderAndModeFallback) {
    const auto data = sample_datasets()[1];
    BpOptions opt;
    opt.order = 2;
    opt.mode = BasisMode::Single;
    const auto fit = fit_bp(data, opt);
    EXPECT_EQ(fit.order, 2);
    EXPECT_EQ(fit.coefficients().slopes.size(), 2);
    EXPECT_FALSE(fit.selection.has_value());

    const TwoSampleData signed_data({-1.0, 0.5, 0.2, 1.0}, {0.7, 1.5, 2.0, -0.3});
    const auto fb = fit_bp(signed_data);
    EXPECT_TRUE(fb.mode_fallback);
    EXPECT_EQ(fb.spec.mode, BasisMode::Single);
    BpOptions dual;
    dual.mode = BasisMode::Dual;
    try {
        fit_bp(signed_data, dual);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonPositiveValues);
    }
}

// Sup over a fine x-grid of the fitted healthy cdf against a direct count of
// healthy observations below x.
TEST(GofStatistic, FourPointDataset) {
    const TwoSampleData data({1.0, 3.0}, {2.0, 4.0});
    for (int order : {1, 2}) {
        BpOptions opt;
        opt.order = order;
        opt.mode = BasisMode::Single;
        const auto fit = fit_bp(data, opt);
        double sup = 0.0;
        for (int k = 0; k <= 6000; ++k) {
            const double x = k / 1000.0;
            const double ecdf = ((1.0 <= x) + (3.0 <= x)) / 2.0;
            sup = std::max(sup, std::abs(cdf_at(fit, 0, x) - ecdf));
        }
        const double delta = gof_statistic(fit, data);
        EXPECT_NEAR(delta, sup, 1e-14);
        EXPECT_GE(delta, 0.0);
        EXPECT_LE(delta, 1.0);
    }
}

TEST(GofBootstrap, PValueRangeAndReproducibility) {
    const auto data = sample_datasets()[2];
    const int b = 40;
    const auto g1 = gof_bootstrap(data, b, 99);
    EXPECT_GE(g1.p_value, 1.0 / (b + 1));
    EXPECT_LE(g1.p_value, 1.0);
    EXPECT_EQ(g1.successful_reps + g1.failed_reps, b);
    const auto g2 = gof_bootstrap(data, b, 99);
    EXPECT_EQ(g1.p_value, g2.p_value);
    EXPECT_EQ(g1.delta, g2.delta);

    setenv("LRROC_THREADS", "3", 1);
    const auto g3 = gof_bootstrap(data, b, 99);
    unsetenv("LRROC_THREADS");
    EXPECT_EQ(g1.p_value, g3.p_value);

    try {
        gof_bootstrap(data, 0, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
    }
}
