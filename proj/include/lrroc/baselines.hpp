#pragma once

// Comparison estimators: empirical cdfs, Gaussian-kernel smoothed cdfs, and the
// Box-Cox binormal model.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "lrroc/data_model.hpp"
#include "lrroc/error.hpp"
#include "lrroc/roc.hpp"
#include "lrroc/stats.hpp"

namespace lrroc {

// ---------------------------------------------------------------- ECDF

inline StepCdfPair empirical_cdfs(const TwoSampleData& data) {
    const PooledSupport s = pool_and_count(data);
    std::vector<double> p0(s.size()), p1(s.size());
    const double n0 = static_cast<double>(data.n0()), n1 = static_cast<double>(data.n1());
    for (std::size_t i = 0; i < s.size(); ++i) {
        p0[i] = s.a[i] / n0;
        p1[i] = s.b[i] / n1;
    }
    return StepCdfPair(s.t, std::move(p0), std::move(p1));
}

inline RocSummary ecdf_summary(const TwoSampleData& data) {
    const StepCdfPair cdfs = empirical_cdfs(data);
    RocSummary s;
    s.method = "ecdf";
    s.roc = [cdfs](double p) { return cdfs.roc(p); };
    s.cdf0 = [cdfs](double x) { return cdfs.cdf(0, x); };
    s.cdf1 = [cdfs](double x) { return cdfs.cdf(1, x); };
    s.auc = cdfs.auc();
    const auto [j, c] = cdfs.youden_argmax();
    s.youden = j;
    s.cutoff = c;
    s.cutoff_method = CutoffMethod::SupportArgmax;
    s.vertices = cdfs.vertices();
    return s;
}

// ---------------------------------------------------------------- Kernel

struct KernelConfig {
    double h0 = 0.0, h1 = 0.0;
    double s0 = 0.0, s1 = 0.0;
    double q0 = 0.0, q1 = 0.0;
};

namespace detail {

// Gaussian-kernel smoothed cdf over sorted observations. Observations more than
// kReach bandwidths away contribute exactly 0 or 1 in double precision.
class SmoothedCdf {
public:
    static constexpr double kReach = 9.0;

    SmoothedCdf(std::vector<double> sorted_obs, double h) : obs_(std::move(sorted_obs)), h_(h) {}

    double operator()(double x) const {
        const auto lo = std::lower_bound(obs_.begin(), obs_.end(), x - kReach * h_);
        const auto hi = std::upper_bound(obs_.begin(), obs_.end(), x + kReach * h_);
        double sum = static_cast<double>(lo - obs_.begin());
        for (auto it = lo; it != hi; ++it) sum += normal_cdf((x - *it) / h_);
        return sum / static_cast<double>(obs_.size());
    }

private:
    std::vector<double> obs_;
    double h_;
};

}  // namespace detail

/// h_g = 0.9 min(s_g, q_g / 1.34) n_g^{-1/5}; s_g uses the n-1 divisor and
/// q_g the type-7 interquartile range.
inline KernelConfig kernel_bandwidths(const TwoSampleData& data) {
    auto one = [](std::span<const double> v, double& s, double& q) {
        const auto sorted = sorted_copy(v);
        s = sample_sd(v);
        q = quantile_type7(sorted, 0.75) - quantile_type7(sorted, 0.25);
        const double spread = std::min(s, q / 1.34);
        if (!(spread > 0.0))
            throw Error(ErrorCode::ZeroBandwidth, "kernel bandwidth degenerates to zero");
        return 0.9 * spread * std::pow(static_cast<double>(v.size()), -0.2);
    };
    KernelConfig k;
    k.h0 = one(data.healthy(), k.s0, k.q0);
    k.h1 = one(data.diseased(), k.s1, k.q1);
    return k;
}

struct KernelGridOptions {
    std::size_t points = 10001;
    double reach = 3.0;  // grid extends this many max(h0,h1) past the data
};

/// Kernel-smoothed estimator evaluated on an equally spaced grid. ROC uses
/// linear interpolation of (F0, F1) between grid points; AUC is the midpoint
/// rule for integral (1 - F1) dF0 on the same grid; J and C maximize F0 - F1
/// over grid points.
inline RocSummary kernel_summary(const TwoSampleData& data, const KernelConfig& bw,
                                 const KernelGridOptions& grid_opt = {}) {
    if (!(bw.h0 > 0.0 && bw.h1 > 0.0))
        throw Error(ErrorCode::ZeroBandwidth, "kernel bandwidths must be positive");
    auto F0 = std::make_shared<detail::SmoothedCdf>(sorted_copy(data.healthy()), bw.h0);
    auto F1 = std::make_shared<detail::SmoothedCdf>(sorted_copy(data.diseased()), bw.h1);

    const auto [mn0, mx0] = std::minmax_element(data.healthy().begin(), data.healthy().end());
    const auto [mn1, mx1] = std::minmax_element(data.diseased().begin(), data.diseased().end());
    const double pad = grid_opt.reach * std::max(bw.h0, bw.h1);
    const double lo = std::min(*mn0, *mn1) - pad, hi = std::max(*mx0, *mx1) + pad;
    const std::size_t g = std::max<std::size_t>(grid_opt.points, 2);

    auto x = std::make_shared<std::vector<double>>(g);
    auto f0 = std::make_shared<std::vector<double>>(g);
    auto f1 = std::make_shared<std::vector<double>>(g);
    for (std::size_t k = 0; k < g; ++k) {
        (*x)[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(g - 1);
        (*f0)[k] = (*F0)((*x)[k]);
        (*f1)[k] = (*F1)((*x)[k]);
    }

    RocSummary s;
    s.method = "kernel";
    s.cdf0 = [F0](double v) { return (*F0)(v); };
    s.cdf1 = [F1](double v) { return (*F1)(v); };
    s.roc = [f0, f1](double p) {
        if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::DomainError, "ROC argument outside [0,1]");
        const double q = 1.0 - p;
        auto it = std::lower_bound(f0->begin(), f0->end(), q);
        if (it == f0->begin()) return 1.0 - f1->front();
        if (it == f0->end()) return 1.0 - f1->back();
        const std::size_t k = static_cast<std::size_t>(it - f0->begin());
        const double span = (*f0)[k] - (*f0)[k - 1];
        const double w = span > 0.0 ? (q - (*f0)[k - 1]) / span : 1.0;
        return 1.0 - ((*f1)[k - 1] + w * ((*f1)[k] - (*f1)[k - 1]));
    };

    double area = 0.0;
    for (std::size_t k = 0; k + 1 < g; ++k)
        area += ((*f0)[k + 1] - (*f0)[k]) * (1.0 - 0.5 * ((*f1)[k] + (*f1)[k + 1]));
    // Mass of F0 outside the grid: below it ROC is ~1, above it ~0.
    area += (*f0)[0] * (1.0 - 0.5 * (*f1)[0]);
    s.auc = area;

    std::size_t best = 0;
    for (std::size_t k = 1; k < g; ++k)
        if ((*f0)[k] - (*f1)[k] > (*f0)[best] - (*f1)[best]) best = k;
    s.youden = (*f0)[best] - (*f1)[best];
    s.cutoff = (*x)[best];
    s.cutoff_method = CutoffMethod::GridArgmax;
    return s;
}

inline RocSummary kernel_summary(const TwoSampleData& data) {
    return kernel_summary(data, kernel_bandwidths(data));
}

// ---------------------------------------------------------------- Box-Cox

struct BoxCoxFit {
    double bc_lambda = 1.0;
    double mu0 = 0.0, sigma0 = 1.0;
    double mu1 = 0.0, sigma1 = 1.0;
    double profile_loglik = 0.0;
};

inline double box_cox(double x, double lambda) {
    return std::abs(lambda) < 1e-12 ? std::log(x) : (std::pow(x, lambda) - 1.0) / lambda;
}

inline double box_cox_inverse(double y, double lambda) {
    if (std::abs(lambda) < 1e-12) return std::exp(y);
    const double base = 1.0 + lambda * y;
    // Outside the image of (0, inf): report the boundary of the original scale.
    if (base <= 0.0) return lambda > 0.0 ? 0.0 : HUGE_VAL;
    return std::pow(base, 1.0 / lambda);
}

namespace detail {

struct GroupMoments {
    double mean = 0.0, var = 0.0;
};

inline GroupMoments transformed_moments(std::span<const double> v, double lambda) {
    GroupMoments g;
    for (double x : v) g.mean += box_cox(x, lambda);
    g.mean /= static_cast<double>(v.size());
    for (double x : v) {
        const double d = box_cox(x, lambda) - g.mean;
        g.var += d * d;
    }
    g.var /= static_cast<double>(v.size());  // maximum-likelihood variance
    return g;
}

}  // namespace detail

/// Profile log-likelihood of a common Box-Cox parameter with separate normal
/// means and variances per group, Jacobian included.
inline double box_cox_profile(const TwoSampleData& data, double lambda) {
    const auto g0 = detail::transformed_moments(data.healthy(), lambda);
    const auto g1 = detail::transformed_moments(data.diseased(), lambda);
    if (!(g0.var > 0.0) || !(g1.var > 0.0))
        throw Error(ErrorCode::DegenerateVariance, "transformed sample has zero variance");
    double log_sum = 0.0;
    for (double x : data.healthy()) log_sum += std::log(x);
    for (double x : data.diseased()) log_sum += std::log(x);
    return -0.5 * static_cast<double>(data.n0()) * std::log(g0.var) -
           0.5 * static_cast<double>(data.n1()) * std::log(g1.var) + (lambda - 1.0) * log_sum;
}

/// Golden-section search for the profile maximum on [lo, hi].
inline BoxCoxFit fit_box_cox(const TwoSampleData& data, double lo = -3.0, double hi = 3.0) {
    auto positive = [](double v) { return v > 0.0; };
    if (!std::all_of(data.healthy().begin(), data.healthy().end(), positive) ||
        !std::all_of(data.diseased().begin(), data.diseased().end(), positive))
        throw Error(ErrorCode::NonPositiveValues, "Box-Cox needs strictly positive data");

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = box_cox_profile(data, c), fd = box_cox_profile(data, d);
    while (b - a > 1e-8) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = box_cox_profile(data, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = box_cox_profile(data, d);
        }
    }
    BoxCoxFit fit;
    fit.bc_lambda = 0.5 * (a + b);
    const auto g0 = detail::transformed_moments(data.healthy(), fit.bc_lambda);
    const auto g1 = detail::transformed_moments(data.diseased(), fit.bc_lambda);
    fit.mu0 = g0.mean;
    fit.sigma0 = std::sqrt(g0.var);
    fit.mu1 = g1.mean;
    fit.sigma1 = std::sqrt(g1.var);
    fit.profile_loglik = box_cox_profile(data, fit.bc_lambda);
    return fit;
}

/// Crossing of the two normal densities on the transformed scale that
/// maximizes Phi((c - mu0)/sigma0) - Phi((c - mu1)/sigma1).
inline double binormal_cutoff(const BoxCoxFit& f) {
    const double v0 = f.sigma0 * f.sigma0, v1 = f.sigma1 * f.sigma1;
    const double qa = 0.5 / v1 - 0.5 / v0;
    const double qb = f.mu0 / v0 - f.mu1 / v1;
    const double qc = 0.5 * f.mu1 * f.mu1 / v1 - 0.5 * f.mu0 * f.mu0 / v0 + std::log(f.sigma1 / f.sigma0);
    auto j = [&](double c) {
        return normal_cdf((c - f.mu0) / f.sigma0) - normal_cdf((c - f.mu1) / f.sigma1);
    };
    if (std::abs(qa) <= 1e-12 * (0.5 / v0 + 0.5 / v1)) return -qc / qb;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) return -qb / (2.0 * qa);
    const double sq = std::sqrt(disc);
    // Cancellation-free pair of roots.
    const double t = -0.5 * (qb + std::copysign(sq, qb));
    const double r1 = t / qa;
    const double r2 = t != 0.0 ? qc / t : r1;
    return j(r1) >= j(r2) ? r1 : r2;
}

inline RocSummary boxcox_summary(const TwoSampleData& data) {
    const BoxCoxFit f = fit_box_cox(data);
    const double a = (f.mu1 - f.mu0) / f.sigma1;
    const double b = f.sigma0 / f.sigma1;

    RocSummary s;
    s.method = "boxcox";
    s.roc = [a, b](double p) {
        if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::DomainError, "ROC argument outside [0,1]");
        if (p <= 0.0) return 0.0;
        if (p >= 1.0) return 1.0;
        return normal_cdf(a + b * normal_quantile(p));
    };
    s.cdf0 = [f](double x) {
        return x > 0.0 ? normal_cdf((box_cox(x, f.bc_lambda) - f.mu0) / f.sigma0) : 0.0;
    };
    s.cdf1 = [f](double x) {
        return x > 0.0 ? normal_cdf((box_cox(x, f.bc_lambda) - f.mu1) / f.sigma1) : 0.0;
    };
    s.auc = normal_cdf(a / std::sqrt(1.0 + b * b));
    const double c = binormal_cutoff(f);
    s.youden = normal_cdf((c - f.mu0) / f.sigma0) - normal_cdf((c - f.mu1) / f.sigma1);
    s.cutoff = box_cox_inverse(c, f.bc_lambda);
    s.cutoff_method = CutoffMethod::ClosedForm;
    return s;
}

}  // namespace lrroc
