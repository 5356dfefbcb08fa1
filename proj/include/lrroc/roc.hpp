#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lrroc/error.hpp"

namespace lrroc {

enum class CutoffMethod {
    Root,           // eta(C) = 0 solved on a monotone fitted curve
    GridFallback,   // no interior root; argmax of F0 - F1 over support points
    SupportArgmax,  // empirical: argmax over pooled support points
    GridArgmax,     // argmax over a dense evaluation grid
    ClosedForm,     // density crossing solved analytically
};

inline const char* to_string(CutoffMethod m) {
    switch (m) {
    case CutoffMethod::Root: return "root";
    case CutoffMethod::GridFallback: return "grid_fallback";
    case CutoffMethod::SupportArgmax: return "support_argmax";
    case CutoffMethod::GridArgmax: return "grid_argmax";
    case CutoffMethod::ClosedForm: return "closed_form";
    }
    return "unknown";
}

/// Common output of every estimator: the curve plus its summary statistics.
struct RocSummary {
    std::string method;
    std::function<double(double)> roc;
    double auc = 0.0;
    double youden = 0.0;
    double cutoff = 0.0;
    CutoffMethod cutoff_method = CutoffMethod::Root;
    std::function<double(double)> cdf0;  // estimated healthy cdf
    std::function<double(double)> cdf1;  // estimated diseased cdf
    /// Staircase vertices (1 - F0(t_i), 1 - F1(t_i)) in increasing FPR order,
    /// for methods whose cdfs are step functions; empty otherwise.
    std::vector<std::pair<double, double>> vertices;
};

/// Two right-continuous step cdfs with jumps p0[i], p1[i] at common points t[i].
class StepCdfPair {
public:
    /// Slack when comparing cumulative sums against quantile levels, so that
    /// rounding in the running totals cannot shift a quantile by one point.
    static constexpr double kQuantileSlack = 1e-12;

    StepCdfPair() = default;
    StepCdfPair(std::vector<double> t, std::vector<double> p0, std::vector<double> p1)
        : t_(std::move(t)), p0_(std::move(p0)), p1_(std::move(p1)) {
        if (t_.empty() || t_.size() != p0_.size() || t_.size() != p1_.size())
            throw Error(ErrorCode::InvalidArgument, "step cdf arrays must be nonempty and aligned");
        f0_.resize(t_.size());
        f1_.resize(t_.size());
        double c0 = 0.0, c1 = 0.0;
        for (std::size_t i = 0; i < t_.size(); ++i) {
            c0 += p0_[i];
            c1 += p1_[i];
            f0_[i] = c0;
            f1_[i] = c1;
        }
    }

    const std::vector<double>& t() const noexcept { return t_; }
    const std::vector<double>& mass(int group) const noexcept { return group == 0 ? p0_ : p1_; }
    /// Cumulative values F_g(t_i).
    const std::vector<double>& cumulative(int group) const noexcept {
        return group == 0 ? f0_ : f1_;
    }

    /// F_g(x) = sum of masses at t_i <= x.
    double cdf(int group, double x) const {
        auto it = std::upper_bound(t_.begin(), t_.end(), x);
        if (it == t_.begin()) return 0.0;
        return cumulative(group)[static_cast<std::size_t>(it - t_.begin()) - 1];
    }

    /// ROC(s) = 1 - F1(F0^{-1}(1 - s)) with F0^{-1}(q) = inf{x : F0(x) >= q}
    /// and F0^{-1}(0) = -inf, so ROC(1) = 1.
    double roc(double s) const {
        if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorCode::DomainError, "ROC argument outside [0,1]");
        const double q = 1.0 - s;
        if (q <= 0.0) return 1.0;
        auto it = std::lower_bound(f0_.begin(), f0_.end(), q - kQuantileSlack);
        if (it == f0_.end()) --it;
        return std::clamp(1.0 - f1_[static_cast<std::size_t>(it - f0_.begin())], 0.0, 1.0);
    }

    /// Exact area under the staircase: sum_i p0_i (1 - F1(t_i)).
    double auc() const {
        double a = 0.0;
        for (std::size_t i = 0; i < t_.size(); ++i) a += p0_[i] * (1.0 - f1_[i]);
        return a;
    }

    /// (max_i F0(t_i) - F1(t_i), smallest maximizing t_i).
    std::pair<double, double> youden_argmax() const {
        std::size_t best = 0;
        for (std::size_t i = 1; i < t_.size(); ++i)
            if (f0_[i] - f1_[i] > f0_[best] - f1_[best]) best = i;
        return {f0_[best] - f1_[best], t_[best]};
    }

    std::vector<std::pair<double, double>> vertices() const {
        std::vector<std::pair<double, double>> v;
        v.reserve(t_.size() + 1);
        for (std::size_t k = t_.size(); k-- > 0;) v.emplace_back(1.0 - f0_[k], 1.0 - f1_[k]);
        v.emplace_back(1.0, 1.0);
        return v;
    }

private:
    std::vector<double> t_, p0_, p1_, f0_, f1_;
};

}  // namespace lrroc
