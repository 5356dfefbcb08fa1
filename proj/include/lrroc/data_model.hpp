#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lrroc/error.hpp"

namespace lrroc {

/// Healthy (group 0) and diseased (group 1) biomarker samples.
class TwoSampleData {
public:
    TwoSampleData(std::vector<double> healthy, std::vector<double> diseased)
        : healthy_(std::move(healthy)), diseased_(std::move(diseased)) {
        if (healthy_.size() < 2 || diseased_.size() < 2)
            throw Error(ErrorCode::InvalidData, "each group needs at least two observations");
        auto finite = [](double v) { return std::isfinite(v); };
        if (!std::all_of(healthy_.begin(), healthy_.end(), finite) ||
            !std::all_of(diseased_.begin(), diseased_.end(), finite))
            throw Error(ErrorCode::InvalidData, "observations must be finite");
    }

    std::span<const double> healthy() const noexcept { return healthy_; }
    std::span<const double> diseased() const noexcept { return diseased_; }
    std::size_t n0() const noexcept { return healthy_.size(); }
    std::size_t n1() const noexcept { return diseased_.size(); }
    std::size_t n() const noexcept { return n0() + n1(); }
    /// Diseased proportion n1 / n.
    double lambda() const noexcept {
        return static_cast<double>(n1()) / static_cast<double>(n());
    }

private:
    std::vector<double> healthy_;
    std::vector<double> diseased_;
};

/// Distinct pooled values t (strictly increasing) with per-group multiplicities.
struct PooledSupport {
    std::vector<double> t;
    std::vector<int> a;  // healthy counts
    std::vector<int> b;  // diseased counts

    std::size_t size() const noexcept { return t.size(); }
    int n0() const noexcept { return sum(a); }
    int n1() const noexcept { return sum(b); }
    int n() const noexcept { return n0() + n1(); }

private:
    static int sum(const std::vector<int>& v) {
        int s = 0;
        for (int x : v) s += x;
        return s;
    }
};

/// Merges both samples into sorted distinct values. Ties are detected by exact
/// floating-point equality; callers should round beforehand if the measurement
/// precision calls for it.
inline PooledSupport pool_and_count(const TwoSampleData& data) {
    std::vector<std::pair<double, int>> all;
    all.reserve(data.n());
    for (double v : data.healthy()) all.emplace_back(v, 0);
    for (double v : data.diseased()) all.emplace_back(v, 1);
    std::sort(all.begin(), all.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });

    PooledSupport s;
    for (const auto& [v, g] : all) {
        if (s.t.empty() || s.t.back() != v) {
            s.t.push_back(v);
            s.a.push_back(0);
            s.b.push_back(0);
        }
        (g == 0 ? s.a.back() : s.b.back()) += 1;
    }
    return s;
}

enum class BasisMode { Single, Dual };

inline const char* to_string(BasisMode m) { return m == BasisMode::Single ? "single" : "dual"; }

/// Endpoints of the min-max map onto [0,1], and of its log counterpart in dual mode.
struct TransformSpec {
    double t_min = 0.0;
    double t_max = 1.0;
    BasisMode mode = BasisMode::Single;
    double log_t_min = 0.0;
    double log_t_max = 0.0;
};

inline TransformSpec make_transform(const PooledSupport& support, BasisMode mode) {
    if (support.t.empty() || support.t.front() == support.t.back())
        throw Error(ErrorCode::DegenerateSupport, "pooled sample has a single distinct value");
    TransformSpec spec;
    spec.t_min = support.t.front();
    spec.t_max = support.t.back();
    spec.mode = mode;
    if (mode == BasisMode::Dual) {
        if (spec.t_min <= 0.0)
            throw Error(ErrorCode::NonPositiveValues, "log coordinate needs strictly positive values");
        spec.log_t_min = std::log(spec.t_min);
        spec.log_t_max = std::log(spec.t_max);
    }
    return spec;
}

/// Dual mode when every pooled value is positive, single otherwise.
inline BasisMode default_mode(const PooledSupport& support) {
    return !support.t.empty() && support.t.front() > 0.0 ? BasisMode::Dual : BasisMode::Single;
}

struct TransformedPoint {
    double x_star;
    std::optional<double> z_star;
};

inline TransformedPoint apply_transform(double x, const TransformSpec& spec) {
    auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
    TransformedPoint p{clamp01((x - spec.t_min) / (spec.t_max - spec.t_min)), std::nullopt};
    if (spec.mode == BasisMode::Dual) {
        // Values at or below zero sit below t_min > 0, so they clamp to 0.
        double z = x > 0.0 ? (std::log(x) - spec.log_t_min) / (spec.log_t_max - spec.log_t_min)
                           : 0.0;
        p.z_star = clamp01(z);
    }
    return p;
}

/// Maps a unit-interval coordinate back to the original measurement scale.
inline double invert_transform(const TransformSpec& spec, double x_star) {
    return spec.t_min + x_star * (spec.t_max - spec.t_min);
}

}  // namespace lrroc
