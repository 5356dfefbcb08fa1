#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "lrroc/error.hpp"

namespace lrroc {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846);
}

/// Standard normal quantile; returns -inf / +inf at 0 / 1.
inline double normal_quantile(double p) {
    if (p <= 0.0) return -HUGE_VAL;
    if (p >= 1.0) return HUGE_VAL;
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

inline double mean(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Sample standard deviation with the n - 1 divisor.
inline double sample_sd(std::span<const double> v) {
    if (v.size() < 2) throw Error(ErrorCode::InvalidArgument, "standard deviation needs two values");
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

/// Linear-interpolation quantile of sorted data ("type 7"): with h = (n-1) p,
/// Q(p) = x[floor(h)] + (h - floor(h)) (x[floor(h)+1] - x[floor(h)]), 0-based.
inline double quantile_type7(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw Error(ErrorCode::InvalidArgument, "quantile of empty data");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

inline std::vector<double> sorted_copy(std::span<const double> v) {
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    return s;
}

}  // namespace lrroc
