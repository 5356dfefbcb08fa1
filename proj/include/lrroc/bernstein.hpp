#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lrroc/data_model.hpp"
#include "lrroc/error.hpp"

namespace lrroc {

/// All degree-N Bernstein polynomials B_0..B_N at x, built by the
/// de Casteljau-style recurrence B_l^N = (1-x) B_l^{N-1} + x B_{l-1}^{N-1}.
/// Every step is a convex combination, so nothing overflows or cancels.
inline std::vector<double> bernstein_all(double x, int order) {
    if (order < 0) throw Error(ErrorCode::IndexOutOfRange, "negative Bernstein order");
    std::vector<double> b(static_cast<std::size_t>(order) + 1, 0.0);
    b[0] = 1.0;
    const double y = 1.0 - x;
    for (int k = 1; k <= order; ++k) {
        for (int l = k; l >= 1; --l) b[l] = y * b[l] + x * b[l - 1];
        b[0] *= y;
    }
    return b;
}

/// Tail sums B*_l = sum_{k>=l} B_k for l = 0..N. Entry 0 is exactly 1.
inline std::vector<double> cumulative_all(double x, int order) {
    std::vector<double> b = bernstein_all(x, order);
    for (int l = order - 1; l >= 0; --l) b[l] += b[l + 1];
    b[0] = 1.0;
    return b;
}

inline double bernstein(int l, double x, int order) {
    if (l < 0 || l > order)
        throw Error(ErrorCode::IndexOutOfRange, "Bernstein index " + std::to_string(l) +
                                                    " outside [0," + std::to_string(order) + "]");
    return bernstein_all(x, order)[static_cast<std::size_t>(l)];
}

inline double cumulative_basis(int l, double x, int order) {
    if (l < 0 || l > order)
        throw Error(ErrorCode::IndexOutOfRange, "Bernstein index " + std::to_string(l) +
                                                    " outside [0," + std::to_string(order) + "]");
    return cumulative_all(x, order)[static_cast<std::size_t>(l)];
}

/// Number of slope columns for a basis of the given order and mode.
inline int slope_count(int order, BasisMode mode) {
    return mode == BasisMode::Dual ? 2 * order : order;
}

/// Slope covariates (B*_1..B*_N at x*, then B*_1..B*_N at z* in dual mode) for
/// one point on the original scale. The constant B*_0 column is left to the solver.
inline Eigen::RowVectorXd basis_row(double x, const TransformSpec& spec, int order) {
    const TransformedPoint p = apply_transform(x, spec);
    Eigen::RowVectorXd row(slope_count(order, spec.mode));
    const auto cx = cumulative_all(p.x_star, order);
    for (int l = 1; l <= order; ++l) row(l - 1) = cx[l];
    if (spec.mode == BasisMode::Dual) {
        const auto cz = cumulative_all(*p.z_star, order);
        for (int l = 1; l <= order; ++l) row(order + l - 1) = cz[l];
    }
    return row;
}

struct BasisDesign {
    int order = 1;
    BasisMode mode = BasisMode::Single;
    Eigen::MatrixXd matrix;  // m x p, rows follow the pooled support

    Eigen::Index rows() const noexcept { return matrix.rows(); }
    Eigen::Index cols() const noexcept { return matrix.cols(); }
};

inline BasisDesign build_design(const PooledSupport& support, const TransformSpec& spec, int order) {
    if (order < 1) throw Error(ErrorCode::InvalidArgument, "Bernstein order must be at least 1");
    BasisDesign d;
    d.order = order;
    d.mode = spec.mode;
    d.matrix.resize(static_cast<Eigen::Index>(support.size()), slope_count(order, spec.mode));
    for (std::size_t i = 0; i < support.size(); ++i)
        d.matrix.row(static_cast<Eigen::Index>(i)) = basis_row(support.t[i], spec, order);
    return d;
}

}  // namespace lrroc
