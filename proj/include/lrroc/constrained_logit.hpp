#pragma once

// Maximum likelihood for theta(x) = sigmoid(alpha0 + logit(lambda) + slopes . B*(x)),
// the weighted Bernoulli factor of the two-sample empirical likelihood. Slopes
// are kept nonnegative in the constrained fit, which is what makes the fitted
// log density ratio nondecreasing.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "lrroc/bernstein.hpp"
#include "lrroc/data_model.hpp"
#include "lrroc/error.hpp"

namespace lrroc {

struct CoefficientVector {
    double alpha0 = 0.0;
    Eigen::VectorXd slopes;  // alpha_1..alpha_p, all >= 0 for a constrained fit
};

struct FitReport {
    CoefficientVector coefficients;
    double loglik = 0.0;  // natural-log value of the Bernoulli factor at the optimum
    int iterations = 0;
    bool converged = false;
    bool separation_flag = false;
    double kkt_residual = 0.0;
    std::vector<double> history;  // loglik after every accepted iterate, starting point first
};

struct SolverOptions {
    int max_iterations = 500;
    double kkt_tolerance = 1e-6;
    double improvement_tolerance = 1e-10;
    /// |linear predictor| at which iterations stop and separation is flagged;
    /// probabilities are then within ~1e-13 of {0,1}.
    double eta_cap = 30.0;
    /// Optional ridge on the slopes (0 keeps the likelihood unpenalized).
    double ridge = 0.0;
};

inline double logit(double p) { return std::log(p / (1.0 - p)); }

inline double sigmoid(double u) {
    return u >= 0.0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
}

/// log(1 + e^u) without overflow.
inline double softplus(double u) {
    return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

namespace detail {

// Packs the intercept ahead of the slopes.
inline Eigen::VectorXd pack(const CoefficientVector& c) {
    Eigen::VectorXd w(c.slopes.size() + 1);
    w(0) = c.alpha0;
    w.tail(c.slopes.size()) = c.slopes;
    return w;
}

inline CoefficientVector unpack(const Eigen::VectorXd& w) {
    return {w(0), w.tail(w.size() - 1)};
}

class LogitProblem {
public:
    LogitProblem(const BasisDesign& design, const PooledSupport& support, double lambda,
                 const SolverOptions& opt)
        : a_(static_cast<Eigen::Index>(support.size())),
          b_(static_cast<Eigen::Index>(support.size())),
          offset_(logit(lambda)),
          ridge_(opt.ridge) {
        if (design.rows() != static_cast<Eigen::Index>(support.size()))
            throw Error(ErrorCode::InvalidArgument, "design rows do not match the pooled support");
        if (!(lambda > 0.0 && lambda < 1.0))
            throw Error(ErrorCode::InvalidArgument, "lambda must lie in (0,1)");
        x_.resize(design.rows(), design.cols() + 1);
        x_.col(0).setOnes();
        x_.rightCols(design.cols()) = design.matrix;
        for (std::size_t i = 0; i < support.size(); ++i) {
            a_(static_cast<Eigen::Index>(i)) = support.a[i];
            b_(static_cast<Eigen::Index>(i)) = support.b[i];
        }
    }

    Eigen::Index dim() const { return x_.cols(); }

    Eigen::VectorXd linear_predictor(const Eigen::VectorXd& w) const {
        return (x_ * w).array() + offset_;
    }

    // Negative log-likelihood plus the optional ridge.
    double objective(const Eigen::VectorXd& w) const {
        const Eigen::VectorXd lp = linear_predictor(w);
        double f = 0.0;
        for (Eigen::Index i = 0; i < lp.size(); ++i)
            f += b_(i) * softplus(-lp(i)) + a_(i) * softplus(lp(i));
        if (ridge_ > 0.0) f += 0.5 * ridge_ * w.tail(w.size() - 1).squaredNorm();
        return f;
    }

    // Derivative of the log-likelihood with respect to each predictor value.
    Eigen::VectorXd residuals(const Eigen::VectorXd& lp) const {
        Eigen::VectorXd r(lp.size());
        for (Eigen::Index i = 0; i < lp.size(); ++i) r(i) = b_(i) * sigmoid(-lp(i)) - a_(i) * sigmoid(lp(i));
        return r;
    }

    Eigen::VectorXd loglik_gradient(const Eigen::VectorXd& w) const {
        Eigen::VectorXd g = x_.transpose() * residuals(linear_predictor(w));
        if (ridge_ > 0.0) g.tail(g.size() - 1) -= ridge_ * w.tail(w.size() - 1);
        return g;
    }

    // Negative Hessian of the log-likelihood (positive semidefinite).
    Eigen::MatrixXd information(const Eigen::VectorXd& w) const {
        const Eigen::VectorXd lp = linear_predictor(w);
        Eigen::VectorXd wt(lp.size());
        for (Eigen::Index i = 0; i < lp.size(); ++i) {
            const double p = sigmoid(lp(i));
            wt(i) = (a_(i) + b_(i)) * p * (1.0 - p);
        }
        Eigen::MatrixXd h = x_.transpose() * wt.asDiagonal() * x_;
        if (ridge_ > 0.0) h.diagonal().tail(h.rows() - 1).array() += ridge_;
        return h;
    }

    double max_abs_predictor(const Eigen::VectorXd& w) const {
        return linear_predictor(w).cwiseAbs().maxCoeff();
    }

private:
    Eigen::MatrixXd x_;
    Eigen::VectorXd a_;
    Eigen::VectorXd b_;
    double offset_;
    double ridge_;
};

// Largest violation of the first-order conditions: free coordinates need a zero
// gradient, bounded slopes sitting at zero only need a nonpositive one.
inline double kkt_residual(const Eigen::VectorXd& w, const Eigen::VectorXd& grad, bool constrained) {
    double r = std::abs(grad(0));
    for (Eigen::Index j = 1; j < w.size(); ++j) {
        const bool at_bound = constrained && w(j) <= 0.0;
        r = std::max(r, at_bound ? std::max(grad(j), 0.0) : std::abs(grad(j)));
    }
    return r;
}

inline void project(Eigen::VectorXd& w, bool constrained) {
    if (!constrained) return;
    for (Eigen::Index j = 1; j < w.size(); ++j) w(j) = std::max(w(j), 0.0);
}

}  // namespace detail

/// Analytic gradient of the log-likelihood: intercept first, then one entry per slope column.
inline Eigen::VectorXd loglik_gradient(const CoefficientVector& coeffs, const BasisDesign& design,
                                       const PooledSupport& support, double lambda,
                                       const SolverOptions& opt = {}) {
    const detail::LogitProblem prob(design, support, lambda, opt);
    return prob.loglik_gradient(detail::pack(coeffs));
}

/// Log-likelihood sum_i b_i log theta_i + a_i log(1 - theta_i).
inline double loglik_value(const CoefficientVector& coeffs, const BasisDesign& design,
                           const PooledSupport& support, double lambda,
                           const SolverOptions& opt = {}) {
    const detail::LogitProblem prob(design, support, lambda, opt);
    return -prob.objective(detail::pack(coeffs));
}

/// Projected Newton with backtracking (Bertsekas-style active set). Slopes are
/// projected onto [0, inf) when `constrained`; the intercept is always free.
/// Non-convergence is reported through FitReport::converged rather than thrown.
inline FitReport fit_constrained(const BasisDesign& design, const PooledSupport& support,
                                 double lambda, bool constrained, const SolverOptions& opt = {}) {
    using Eigen::Index;
    const detail::LogitProblem prob(design, support, lambda, opt);
    const Index dim = prob.dim();

    // Predictors past this magnitude mean the data are (quasi-)separated along
    // some direction; iterations then continue until the cap is reached.
    constexpr double kSeparationProbe = 15.0;
    constexpr double kArmijo = 1e-4;

    Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
    double f = prob.objective(w);
    FitReport rep;
    rep.history.push_back(-f);

    bool pushing = false;
    bool stalled = false;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        const Eigen::VectorXd grad = prob.loglik_gradient(w);  // ascent direction
        const Eigen::VectorXd g = -grad;                       // descent gradient of f
        const double kkt = detail::kkt_residual(w, grad, constrained);
        if (it == 0 && kkt < opt.kkt_tolerance) {
            rep.converged = true;
            break;
        }

        // Active set: slopes at (or within eps of) zero whose gradient pushes outward.
        const double eps = std::min(1e-8, kkt);
        std::vector<Index> free_idx, active_idx;
        for (Index j = 0; j < dim; ++j) {
            const bool active = constrained && j > 0 && w(j) <= eps && g(j) > 0.0;
            (active ? active_idx : free_idx).push_back(j);
        }

        const Eigen::MatrixXd h = prob.information(w);
        Eigen::VectorXd dir = Eigen::VectorXd::Zero(dim);
        bool newton_ok = false;
        if (!free_idx.empty()) {
            const Index k = static_cast<Index>(free_idx.size());
            Eigen::MatrixXd hff(k, k);
            Eigen::VectorXd gf(k);
            for (Index r = 0; r < k; ++r) {
                gf(r) = g(free_idx[r]);
                for (Index c = 0; c < k; ++c) hff(r, c) = h(free_idx[r], free_idx[c]);
            }
            const double scale = std::max(1.0, hff.diagonal().cwiseAbs().maxCoeff());
            // Unregularized first; a vanishing shift rescues singular designs.
            for (double shift : {0.0, 1e-10 * scale, 1e-7 * scale, 1e-4 * scale}) {
                Eigen::MatrixXd hs = hff;
                hs.diagonal().array() += shift;
                Eigen::LLT<Eigen::MatrixXd> llt(hs);
                if (llt.info() != Eigen::Success) continue;
                const Eigen::VectorXd step = llt.solve(-gf);
                if (!step.allFinite() || step.dot(gf) >= 0.0) continue;
                for (Index r = 0; r < k; ++r) dir(free_idx[r]) = step(r);
                newton_ok = true;
                break;
            }
        }
        for (Index j : active_idx) dir(j) = -g(j) / std::max(h(j, j), 1e-8);
        if (!newton_ok) {
            // Projected gradient, diagonally scaled.
            for (Index j = 0; j < dim; ++j) dir(j) = -g(j) / std::max(h(j, j), 1e-8);
        }

        auto line_search = [&](const Eigen::VectorXd& d, Eigen::VectorXd& w_out, double& f_out) {
            double step = 1.0;
            for (int bt = 0; bt < 60; ++bt, step *= 0.5) {
                Eigen::VectorXd trial = w + step * d;
                detail::project(trial, constrained);
                const double ft = prob.objective(trial);
                const double decrease = g.dot(trial - w);
                if (std::isfinite(ft) && decrease < 0.0 && ft < f && ft <= f + kArmijo * decrease) {
                    w_out = std::move(trial);
                    f_out = ft;
                    return true;
                }
            }
            return false;
        };

        Eigen::VectorXd w_new;
        double f_new = f;
        bool moved = line_search(dir, w_new, f_new);
        if (!moved && newton_ok) {
            Eigen::VectorXd pg(dim);
            for (Index j = 0; j < dim; ++j) pg(j) = -g(j) / std::max(h(j, j), 1e-8);
            moved = line_search(pg, w_new, f_new);
        }
        if (!moved) {
            // No representable decrease: the iterate is as good as floating point allows.
            rep.converged = kkt < opt.kkt_tolerance || pushing;
            stalled = true;
            break;
        }

        const double improvement = f - f_new;
        const Eigen::VectorXd w_prev = w;
        const double f_prev = f;
        w = std::move(w_new);
        f = f_new;
        rep.history.push_back(-f);

        double max_lp = prob.max_abs_predictor(w);
        if (max_lp > opt.eta_cap) {
            // Back off along the accepted segment until the cap binds exactly;
            // convexity keeps the objective below its previous value.
            const Eigen::VectorXd lp_old = prob.linear_predictor(w_prev);
            const Eigen::VectorXd lp_new = prob.linear_predictor(w);
            double tau = 1.0;
            for (Index i = 0; i < lp_new.size(); ++i) {
                const double hi = std::abs(lp_new(i));
                if (hi <= opt.eta_cap) continue;
                const double lo = lp_new(i) > 0 ? lp_old(i) : -lp_old(i);
                if (lo < opt.eta_cap) tau = std::min(tau, (opt.eta_cap - lo) / (hi - lo));
            }
            Eigen::VectorXd trial = w_prev + tau * (w - w_prev);
            const double ft = prob.objective(trial);
            if (ft < f_prev) {
                w = std::move(trial);
                f = ft;
                rep.history.back() = -f;
                max_lp = opt.eta_cap;
            }
        }
        if (max_lp >= opt.eta_cap) {
            rep.separation_flag = true;
            rep.converged = true;
            ++it;
            break;
        }
        if (pushing) continue;
        const double kkt_new = detail::kkt_residual(w, prob.loglik_gradient(w), constrained);
        if (improvement < opt.improvement_tolerance * (1.0 + std::abs(f)) &&
            kkt_new < opt.kkt_tolerance) {
            if (max_lp > kSeparationProbe) {
                pushing = true;
                continue;
            }
            rep.converged = true;
            ++it;
            break;
        }
    }
    if (pushing) rep.converged = true;

    // Near the optimum the decrease of f drops below its rounding error and the
    // line search stalls. Full Newton steps on the free coordinates, judged by
    // the KKT residual instead of f, finish the job.
    const bool settled = rep.converged || stalled;
    const double rounding = 1e-13 * (1.0 + std::abs(f));
    if (settled && !pushing && !rep.separation_flag) {
        for (int polish = 0; polish < 5; ++polish) {
            const Eigen::VectorXd grad = prob.loglik_gradient(w);
            const double kkt = detail::kkt_residual(w, grad, constrained);
            std::vector<Index> free_idx;
            for (Index j = 0; j < dim; ++j)
                if (!constrained || j == 0 || w(j) > 0.0) free_idx.push_back(j);
            const Index k = static_cast<Index>(free_idx.size());
            const Eigen::MatrixXd h = prob.information(w);
            Eigen::MatrixXd hff(k, k);
            Eigen::VectorXd gf(k);
            for (Index r = 0; r < k; ++r) {
                gf(r) = grad(free_idx[r]);
                for (Index c = 0; c < k; ++c) hff(r, c) = h(free_idx[r], free_idx[c]);
            }
            Eigen::LDLT<Eigen::MatrixXd> ldlt(hff);
            if (ldlt.info() != Eigen::Success) break;
            const Eigen::VectorXd step = ldlt.solve(gf);
            if (!step.allFinite()) break;
            Eigen::VectorXd trial = w;
            for (Index r = 0; r < k; ++r) trial(free_idx[r]) += step(r);
            detail::project(trial, constrained);
            const double ft = prob.objective(trial);
            if (!(ft <= f + rounding) ||
                detail::kkt_residual(trial, prob.loglik_gradient(trial), constrained) >= kkt)
                break;
            w = std::move(trial);
            if (-ft > rep.history.back()) rep.history.push_back(-ft);
            f = ft;
        }
    }

    // Exact intercept with the slopes held fixed. This puts the intercept
    // gradient, and with it the mass identity, at rounding level, including
    // after a step that stopped at the cap.
    if (settled || rep.separation_flag) {
        const Eigen::VectorXd lp = prob.linear_predictor(w);
        auto excess = [&](double shift) {
            const Eigen::VectorXd lp_shift = lp.array() + shift;
            return -prob.residuals(lp_shift).sum();
        };
        const double reach = lp.cwiseAbs().maxCoeff() + 50.0;
        std::uintmax_t max_iter = 200;
        const auto root = boost::math::tools::toms748_solve(
            excess, -reach, reach, boost::math::tools::eps_tolerance<double>(52), max_iter);
        Eigen::VectorXd trial = w;
        trial(0) += 0.5 * (root.first + root.second);
        const double ft = prob.objective(trial);
        if (ft <= f + rounding) {
            w = std::move(trial);
            if (-ft > rep.history.back()) rep.history.push_back(-ft);
            f = ft;
        }
    }

    rep.coefficients = detail::unpack(w);
    rep.loglik = -f;
    rep.iterations = it;
    rep.kkt_residual = detail::kkt_residual(w, prob.loglik_gradient(w), constrained);
    if (stalled && rep.kkt_residual < opt.kkt_tolerance) rep.converged = true;
    if (!rep.separation_flag && prob.max_abs_predictor(w) >= opt.eta_cap) rep.separation_flag = true;
    return rep;
}

struct OrderSelection {
    std::vector<int> candidates;
    std::vector<double> bic;
    std::vector<int> df;
    int chosen = 1;
};

/// Default candidate orders 1..10.
inline std::vector<int> default_bic_candidates() {
    return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
}

/// BIC(N) = -2 loglik + log(n) df_N from the *unconstrained* fit, df_N counting
/// the intercept and every slope column. Non-converged candidates score +inf;
/// ties go to the smaller order.
inline OrderSelection select_order_bic(const PooledSupport& support, const TransformSpec& spec,
                                       double lambda, std::span<const int> candidates,
                                       const SolverOptions& opt = {}) {
    if (candidates.empty())
        throw Error(ErrorCode::InvalidArgument, "BIC needs at least one candidate order");
    OrderSelection sel;
    const double log_n = std::log(static_cast<double>(support.n()));
    double best = std::numeric_limits<double>::infinity();
    bool have_best = false;
    for (int order : candidates) {
        if (order < 1) throw Error(ErrorCode::InvalidArgument, "candidate orders must be >= 1");
        const BasisDesign design = build_design(support, spec, order);
        const FitReport fit = fit_constrained(design, support, lambda, /*constrained=*/false, opt);
        const int df = slope_count(order, spec.mode) + 1;
        const double bic = fit.converged ? -2.0 * fit.loglik + log_n * df
                                         : std::numeric_limits<double>::infinity();
        sel.candidates.push_back(order);
        sel.bic.push_back(bic);
        sel.df.push_back(df);
        if (!have_best || bic < best || (bic == best && order < sel.chosen)) {
            best = bic;
            sel.chosen = order;
            have_best = true;
        }
    }
    return sel;
}

}  // namespace lrroc
