#pragma once

// Bernstein-polynomial estimator of two cdfs under likelihood-ratio ordering.
//
// The log density ratio is modelled as alpha0 + sum_l alpha_l B*_l(x*) (plus a
// second block in the log coordinate for dual mode), with alpha_l >= 0. The
// empirical likelihood splits into a multinomial factor, maximized in closed
// form by phi_i = (a_i + b_i) / n, and a logistic factor handled by
// fit_constrained(). Masses at the pooled support points then follow as
//
//   p0_i = phi_i (1 - theta_i) / (1 - lambda),   p1_i = phi_i theta_i / lambda.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "lrroc/bernstein.hpp"
#include "lrroc/constrained_logit.hpp"
#include "lrroc/data_model.hpp"
#include "lrroc/error.hpp"
#include "lrroc/parallel.hpp"
#include "lrroc/random.hpp"
#include "lrroc/roc.hpp"

namespace lrroc {

struct BpOptions {
    std::optional<int> order;       // empty: choose by BIC
    std::optional<BasisMode> mode;  // empty: dual when all values are positive
    std::vector<int> bic_candidates = default_bic_candidates();
    SolverOptions solver;
};

struct BpModelFit {
    PooledSupport support;
    TransformSpec spec;
    int order = 1;
    double lambda = 0.5;
    int n = 0;
    double eta_cap = 30.0;
    /// True when dual mode was the default but non-positive data forced single mode.
    bool mode_fallback = false;
    FitReport report;
    std::optional<OrderSelection> selection;
    std::vector<double> phi;
    std::vector<double> theta;  // fitted theta at each support point
    std::vector<double> p0;
    std::vector<double> p1;
    StepCdfPair cdfs;

    const CoefficientVector& coefficients() const noexcept { return report.coefficients; }
};

/// Fitted log density ratio (without the log(lambda/(1-lambda)) offset) at x.
inline double eta_hat(const BpModelFit& fit, double x) {
    const auto& c = fit.coefficients();
    return c.alpha0 + basis_row(x, fit.spec, fit.order).dot(c.slopes);
}

inline double theta_hat(const BpModelFit& fit, double x) {
    const double u = eta_hat(fit, x) + logit(fit.lambda);
    return sigmoid(std::clamp(u, -fit.eta_cap, fit.eta_cap));
}

inline BpModelFit fit_bp(const TwoSampleData& data, const BpOptions& options = {}) {
    BpModelFit fit;
    fit.support = pool_and_count(data);
    fit.lambda = data.lambda();
    fit.n = static_cast<int>(data.n());

    BasisMode mode;
    if (options.mode) {
        mode = *options.mode;
    } else {
        mode = default_mode(fit.support);
        fit.mode_fallback = mode == BasisMode::Single;
    }
    fit.spec = make_transform(fit.support, mode);

    if (options.order) {
        fit.order = *options.order;
    } else {
        fit.selection = select_order_bic(fit.support, fit.spec, fit.lambda, options.bic_candidates,
                                         options.solver);
        fit.order = fit.selection->chosen;
    }
    const BasisDesign design = build_design(fit.support, fit.spec, fit.order);
    fit.report = fit_constrained(design, fit.support, fit.lambda, /*constrained=*/true, options.solver);

    const std::size_t m = fit.support.size();
    const Eigen::VectorXd lp =
        (design.matrix * fit.report.coefficients.slopes).array() +
        (fit.report.coefficients.alpha0 + logit(fit.lambda));
    fit.phi.resize(m);
    fit.theta.resize(m);
    fit.p0.resize(m);
    fit.p1.resize(m);
    fit.eta_cap = options.solver.eta_cap;
    const double cap = fit.eta_cap;
    for (std::size_t i = 0; i < m; ++i) {
        fit.phi[i] = static_cast<double>(fit.support.a[i] + fit.support.b[i]) / fit.n;
        fit.theta[i] = sigmoid(std::clamp(lp(static_cast<Eigen::Index>(i)), -cap, cap));
        fit.p0[i] = fit.phi[i] * (1.0 - fit.theta[i]) / (1.0 - fit.lambda);
        fit.p1[i] = fit.phi[i] * fit.theta[i] / fit.lambda;
    }
    fit.cdfs = StepCdfPair(fit.support.t, fit.p0, fit.p1);
    return fit;
}

/// Right-continuous step cdf of group 0 (healthy) or 1 (diseased).
inline double cdf_at(const BpModelFit& fit, int group, double x) {
    return fit.cdfs.cdf(group, x);
}

inline double roc_eval(const BpModelFit& fit, double s) { return fit.cdfs.roc(s); }

inline double auc(const BpModelFit& fit) { return fit.cdfs.auc(); }

struct YoudenResult {
    double youden = 0.0;
    double cutoff = 0.0;
    CutoffMethod method = CutoffMethod::Root;
};

/// Solves theta_hat(C) = lambda, i.e. eta_hat(C) = 0, by bisection on the
/// monotone eta. Without a sign change on [t_min, t_max] the cutoff is the
/// smallest support point maximizing F0 - F1.
inline YoudenResult youden_cutoff(const BpModelFit& fit) {
    YoudenResult r;
    double lo = fit.spec.t_min, hi = fit.spec.t_max;
    if (eta_hat(fit, lo) > 0.0 || eta_hat(fit, hi) < 0.0) {
        const auto [j, c] = fit.cdfs.youden_argmax();
        r.cutoff = c;
        r.method = CutoffMethod::GridFallback;
    } else {
        const double width_tol = 1e-12 * (hi - lo);
        double mid = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            mid = 0.5 * (lo + hi);
            const double e = eta_hat(fit, mid);
            if (std::abs(e) <= 1e-10 || hi - lo <= width_tol) break;
            (e < 0.0 ? lo : hi) = mid;
        }
        r.cutoff = mid;
        r.method = CutoffMethod::Root;
    }
    r.youden = cdf_at(fit, 0, r.cutoff) - cdf_at(fit, 1, r.cutoff);
    return r;
}

inline RocSummary bp_summary(const BpModelFit& fit) {
    RocSummary s;
    s.method = "bp";
    const StepCdfPair cdfs = fit.cdfs;
    s.roc = [cdfs](double p) { return cdfs.roc(p); };
    s.cdf0 = [cdfs](double x) { return cdfs.cdf(0, x); };
    s.cdf1 = [cdfs](double x) { return cdfs.cdf(1, x); };
    s.auc = fit.cdfs.auc();
    const YoudenResult y = youden_cutoff(fit);
    s.youden = y.youden;
    s.cutoff = y.cutoff;
    s.cutoff_method = y.method;
    s.vertices = fit.cdfs.vertices();
    return s;
}

/// Goodness-of-fit statistic: sup-distance between the fitted healthy cdf and
/// the empirical one. Both jump only at support points, so the sup is a max there.
inline double gof_statistic(const BpModelFit& fit, const TwoSampleData& data) {
    const auto& f0 = fit.cdfs.cumulative(0);
    const double n0 = static_cast<double>(data.n0());
    double count = 0.0, delta = 0.0;
    for (std::size_t i = 0; i < fit.support.size(); ++i) {
        count += fit.support.a[i];
        delta = std::max(delta, std::abs(f0[i] - count / n0));
    }
    return delta;
}

struct GofResult {
    double delta = 0.0;
    int bootstrap_reps = 0;
    int successful_reps = 0;
    int failed_reps = 0;
    double p_value = 1.0;
    int order = 1;
};

/// Parametric bootstrap under the fitted (ordered) model: each replicate draws
/// n0 points from F0_hat and n1 from F1_hat, refits with the order and basis
/// chosen on the observed data, and recomputes the statistic.
/// p = (1 + #{delta* >= delta}) / (B_ok + 1). Replicates that fail to fit are
/// dropped and counted.
inline GofResult gof_bootstrap(const TwoSampleData& data, int reps, std::uint64_t seed,
                               const BpOptions& options = {}) {
    if (reps < 1) throw Error(ErrorCode::InvalidArgument, "bootstrap needs at least one replicate");
    const BpModelFit fit = fit_bp(data, options);
    GofResult res;
    res.delta = gof_statistic(fit, data);
    res.bootstrap_reps = reps;
    res.order = fit.order;

    BpOptions refit = options;
    refit.order = fit.order;
    refit.mode = fit.spec.mode;

    const auto& c0 = fit.cdfs.cumulative(0);
    const auto& c1 = fit.cdfs.cumulative(1);
    std::vector<double> stats(static_cast<std::size_t>(reps), 0.0);
    std::vector<char> ok(static_cast<std::size_t>(reps), 0);
    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t b) {
        RandomStream rng(seed, b, stream_tag::kGofBootstrap);
        std::vector<double> x(data.n0()), y(data.n1());
        for (double& v : x) v = fit.support.t[rng.discrete(c0)];
        for (double& v : y) v = fit.support.t[rng.discrete(c1)];
        try {
            const TwoSampleData boot(std::move(x), std::move(y));
            const BpModelFit bf = fit_bp(boot, refit);
            stats[b] = gof_statistic(bf, boot);
            ok[b] = 1;
        } catch (const Error&) {
        }
    });

    int exceed = 0;
    for (std::size_t b = 0; b < stats.size(); ++b) {
        if (!ok[b]) {
            ++res.failed_reps;
            continue;
        }
        ++res.successful_reps;
        if (stats[b] >= res.delta) ++exceed;
    }
    res.p_value = (1.0 + exceed) / (res.successful_reps + 1.0);
    return res;
}

}  // namespace lrroc
