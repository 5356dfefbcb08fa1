#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "lrroc/bernstein.hpp"

using namespace lrroc;

namespace {

double naive_bernstein(int l, double x, int n) {
    double c = 1.0;
    for (int k = 1; k <= l; ++k) c = c * (n - l + k) / k;
    return c * std::pow(x, l) * std::pow(1.0 - x, n - l);
}

}  // namespace

TEST(Bernstein, SmallCases) {
    EXPECT_EQ(bernstein(0, 0.37, 0), 1.0);
    EXPECT_DOUBLE_EQ(bernstein(0, 0.5, 2), 0.25);
    EXPECT_DOUBLE_EQ(bernstein(1, 0.5, 2), 0.5);
    EXPECT_DOUBLE_EQ(bernstein(2, 0.5, 2), 0.25);
    double s = 0;
    for (int l = 0; l <= 7; ++l) s += bernstein(l, 0.3, 7);
    EXPECT_NEAR(s, 1.0, 1e-15);
}

TEST(Bernstein, IndexOutOfRange) {
    for (int l : {-1, 4}) {
        try {
            bernstein(l, 0.5, 3);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::IndexOutOfRange);
        }
        try {
            cumulative_basis(l, 0.5, 3);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::IndexOutOfRange);
        }
    }
}

TEST(CumulativeBasis, SmallCases) {
    for (int n : {1, 4, 13})
        for (double x : {0.0, 0.2, 0.9, 1.0}) {
            EXPECT_EQ(cumulative_basis(0, x, n), 1.0);
            EXPECT_NEAR(cumulative_basis(n, x, n), std::pow(x, n), 1e-15);
        }
    EXPECT_DOUBLE_EQ(cumulative_basis(1, 0.5, 2), 0.75);
}

TEST(Bernstein, PartitionOfUnity) {
    for (int n = 0; n <= 50; ++n)
        for (int k = 0; k <= 1000; ++k) {
            const auto b = bernstein_all(k / 1000.0, n);
            double s = 0;
            for (double v : b) s += v;
            ASSERT_LE(std::abs(s - 1.0), 1e-12) << "N=" << n << " x=" << k / 1000.0;
        }
}

TEST(Bernstein, AgreesWithNaiveFormula) {
    for (int n = 0; n <= 20; ++n)
        for (int k = 0; k <= 200; ++k) {
            const double x = k / 200.0;
            const auto b = bernstein_all(x, n);
            for (int l = 0; l <= n; ++l) {
                const double ref = naive_bernstein(l, x, n);
                ASSERT_LE(std::abs(b[l] - ref), 1e-10 * std::max(std::abs(ref), 1e-300) + 1e-300)
                    << "l=" << l << " N=" << n << " x=" << x;
            }
        }
}

TEST(CumulativeBasis, MonotoneWithFixedEndpoints) {
    for (int n = 1; n <= 30; ++n) {
        std::vector<double> prev(n + 1, -1.0);
        for (int k = 0; k <= 1000; ++k) {
            const auto c = cumulative_all(k / 1000.0, n);
            for (int l = 1; l <= n; ++l) {
                ASSERT_GE(c[l], prev[l] - 1e-15);
                prev[l] = c[l];
            }
        }
        const auto c0 = cumulative_all(0.0, n), c1 = cumulative_all(1.0, n);
        for (int l = 1; l <= n; ++l) {
            EXPECT_EQ(c0[l], 0.0);
            EXPECT_NEAR(c1[l], 1.0, 1e-15);
        }
    }
}

TEST(BuildDesign, EndpointRows) {
    PooledSupport s{{2, 6}, {1, 0}, {0, 1}};
    const auto d = build_design(s, make_transform(s, BasisMode::Single), 1);
    ASSERT_EQ(d.rows(), 2);
    ASSERT_EQ(d.cols(), 1);
    EXPECT_EQ(d.matrix(0, 0), 0.0);
    EXPECT_EQ(d.matrix(1, 0), 1.0);

    PooledSupport s2{{1, 10}, {1, 0}, {0, 1}};
    const auto dd = build_design(s2, make_transform(s2, BasisMode::Dual), 1);
    ASSERT_EQ(dd.cols(), 2);
    EXPECT_EQ(dd.matrix(0, 0), 0.0);
    EXPECT_EQ(dd.matrix(0, 1), 0.0);
    EXPECT_EQ(dd.matrix(1, 0), 1.0);
    EXPECT_NEAR(dd.matrix(1, 1), 1.0, 1e-15);
}

TEST(BuildDesign, ColumnsMonotoneAndBounded) {
    PooledSupport s;
    for (int i = 0; i < 40; ++i) {
        s.t.push_back(0.2 + 0.37 * i + 0.01 * i * i);
        s.a.push_back(1);
        s.b.push_back(i % 3 == 0);
    }
    for (BasisMode mode : {BasisMode::Single, BasisMode::Dual})
        for (int n : {1, 3, 8}) {
            const auto d = build_design(s, make_transform(s, mode), n);
            EXPECT_EQ(d.cols(), slope_count(n, mode));
            for (Eigen::Index c = 0; c < d.cols(); ++c)
                for (Eigen::Index r = 0; r < d.rows(); ++r) {
                    EXPECT_GE(d.matrix(r, c), 0.0);
                    EXPECT_LE(d.matrix(r, c), 1.0 + 1e-15);
                    if (r > 0) EXPECT_GE(d.matrix(r, c), d.matrix(r - 1, c) - 1e-15);
                }
        }
}

TEST(BuildDesign, RejectsOrderZero) {
    PooledSupport s{{2, 6}, {1, 0}, {0, 1}};
    try {
        build_design(s, make_transform(s, BasisMode::Single), 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
    }
}
