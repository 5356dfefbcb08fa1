#pragma once

// Monte-Carlo scenarios, population truth, error metrics, the replication
// engine, and bootstrap percentile intervals.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "lrroc/baselines.hpp"
#include "lrroc/bp_estimator.hpp"
#include "lrroc/data_model.hpp"
#include "lrroc/error.hpp"
#include "lrroc/parallel.hpp"
#include "lrroc/random.hpp"
#include "lrroc/roc.hpp"
#include "lrroc/stats.hpp"

namespace lrroc {

enum class Family { Normal, Gamma, Beta };

inline const char* to_string(Family f) {
    switch (f) {
    case Family::Normal: return "normal";
    case Family::Gamma: return "gamma";
    case Family::Beta: return "beta";
    }
    return "unknown";
}

/// Two-population design. Parameters are (mean, sd) for normal, (shape, rate)
/// for gamma and (a, b) for beta.
struct Scenario {
    std::string name;
    Family family = Family::Normal;
    std::array<double, 2> params0{};
    std::array<double, 2> params1{};
    int n0 = 100;
    int n1 = 100;
    double true_auc = 0.0;
    double true_j = 0.0;
    double true_cutoff = 0.0;
};

struct TrueSummary {
    double auc = 0.0;
    double youden = 0.0;
    double cutoff = 0.0;
    std::function<double(double)> roc;
    std::function<double(double)> cdf0;
    std::function<double(double)> cdf1;
};

namespace detail {

struct Population {
    std::function<double(double)> cdf, pdf, quantile;
    double lo, hi;  // support endpoints (possibly infinite)
};

inline Population population(Family family, const std::array<double, 2>& p) {
    using boost::math::cdf;
    using boost::math::pdf;
    using boost::math::quantile;
    switch (family) {
    case Family::Normal: {
        const double mu = p[0], sd = p[1];
        return {[=](double x) { return normal_cdf((x - mu) / sd); },
                [=](double x) { return normal_pdf((x - mu) / sd) / sd; },
                [=](double q) { return mu + sd * normal_quantile(q); }, -HUGE_VAL, HUGE_VAL};
    }
    case Family::Gamma: {
        const boost::math::gamma_distribution<double> d(p[0], 1.0 / p[1]);
        return {[=](double x) { return x <= 0.0 ? 0.0 : cdf(d, x); },
                [=](double x) { return x <= 0.0 ? 0.0 : pdf(d, x); },
                [=](double q) { return q <= 0.0 ? 0.0 : q >= 1.0 ? HUGE_VAL : quantile(d, q); }, 0.0,
                HUGE_VAL};
    }
    case Family::Beta: {
        const boost::math::beta_distribution<double> d(p[0], p[1]);
        return {[=](double x) { return x <= 0.0 ? 0.0 : x >= 1.0 ? 1.0 : cdf(d, x); },
                [=](double x) { return x <= 0.0 || x >= 1.0 ? 0.0 : pdf(d, x); },
                [=](double q) { return q <= 0.0 ? 0.0 : q >= 1.0 ? 1.0 : quantile(d, q); }, 0.0,
                1.0};
    }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown family");
}

}  // namespace detail

/// Population AUC, Youden index, optimal cutoff and ROC curve. Normal designs
/// use closed forms; gamma and beta use Gauss-Kronrod quadrature and a bracketed
/// root of log f1 - log f0, both to about 1e-10.
inline TrueSummary true_summary(const Scenario& sc) {
    const auto pop0 = detail::population(sc.family, sc.params0);
    const auto pop1 = detail::population(sc.family, sc.params1);
    TrueSummary t;
    t.cdf0 = pop0.cdf;
    t.cdf1 = pop1.cdf;
    t.roc = [pop0, pop1](double s) {
        if (s <= 0.0) return 0.0;
        if (s >= 1.0) return 1.0;
        return 1.0 - pop1.cdf(pop0.quantile(1.0 - s));
    };

    if (sc.family == Family::Normal) {
        const double mu0 = sc.params0[0], sd0 = sc.params0[1];
        const double mu1 = sc.params1[0], sd1 = sc.params1[1];
        t.auc = normal_cdf((mu1 - mu0) / std::sqrt(sd0 * sd0 + sd1 * sd1));
        t.cutoff = binormal_cutoff(BoxCoxFit{1.0, mu0, sd0, mu1, sd1, 0.0});
    } else {
        using boost::math::quadrature::gauss_kronrod;
        auto integrand = [&](double x) { return pop0.pdf(x) * (1.0 - pop1.cdf(x)); };
        const double hi = sc.family == Family::Beta ? 1.0 : std::numeric_limits<double>::infinity();
        t.auc = gauss_kronrod<double, 61>::integrate(integrand, 0.0, hi, 20, 1e-12);

        auto log_ratio = [&](double x) { return std::log(pop1.pdf(x)) - std::log(pop0.pdf(x)); };
        double a = std::min(pop0.quantile(1e-6), pop1.quantile(1e-6));
        double b = std::max(pop0.quantile(1.0 - 1e-6), pop1.quantile(1.0 - 1e-6));
        boost::uintmax_t max_iter = 200;
        const auto root = boost::math::tools::toms748_solve(
            log_ratio, a, b, boost::math::tools::eps_tolerance<double>(50), max_iter);
        t.cutoff = 0.5 * (root.first + root.second);
    }
    t.youden = pop0.cdf(t.cutoff) - pop1.cdf(t.cutoff);
    return t;
}

inline Scenario with_truth(Scenario sc) {
    const TrueSummary t = true_summary(sc);
    sc.true_auc = t.auc;
    sc.true_j = t.youden;
    sc.true_cutoff = t.cutoff;
    return sc;
}

/// Built-in designs: normal/gamma/beta at Youden index 0.3, 0.5, 0.7.
inline std::vector<Scenario> scenario_catalog(int n0 = 100, int n1 = 100) {
    struct Row {
        const char* name;
        Family family;
        std::array<double, 2> p0, p1;
    };
    static const Row rows[] = {
        {"normal-0.3", Family::Normal, {10.0, 1.0}, {10.771, 1.0}},
        {"normal-0.5", Family::Normal, {10.0, 1.0}, {11.349, 1.0}},
        {"normal-0.7", Family::Normal, {10.0, 1.0}, {12.073, 1.0}},
        {"gamma-0.3", Family::Gamma, {2.0, 1.0}, {3.0, 0.937}},
        {"gamma-0.5", Family::Gamma, {2.0, 1.0}, {4.0, 0.944}},
        {"gamma-0.7", Family::Gamma, {2.0, 1.0}, {5.0, 0.827}},
        {"beta-0.3", Family::Beta, {2.0, 2.0}, {3.838, 2.0}},
        {"beta-0.5", Family::Beta, {2.0, 2.0}, {6.148, 2.0}},
        {"beta-0.7", Family::Beta, {2.0, 2.0}, {11.014, 2.0}},
    };
    std::vector<Scenario> out;
    for (const auto& r : rows) out.push_back(with_truth({r.name, r.family, r.p0, r.p1, n0, n1}));
    return out;
}

inline std::optional<Scenario> find_scenario(const std::string& name, int n0, int n1) {
    for (auto& sc : scenario_catalog(n0, n1))
        if (sc.name == name) return sc;
    return std::nullopt;
}

inline TwoSampleData generate(const Scenario& sc, std::uint64_t seed, std::uint64_t replicate) {
    RandomStream rng(seed, replicate, stream_tag::kSimulation);
    auto draw = [&](const std::array<double, 2>& p) {
        switch (sc.family) {
        case Family::Normal: return rng.normal(p[0], p[1]);
        case Family::Gamma: return rng.gamma(p[0], p[1]);
        case Family::Beta: return rng.beta(p[0], p[1]);
        }
        return 0.0;
    };
    std::vector<double> x(static_cast<std::size_t>(sc.n0)), y(static_cast<std::size_t>(sc.n1));
    for (double& v : x) v = draw(sc.params0);
    for (double& v : y) v = draw(sc.params1);
    return TwoSampleData(std::move(x), std::move(y));
}

// ---------------------------------------------------------------- metrics

struct Distance {
    double l1 = 0.0;
    double l2 = 0.0;
};

/// L1 and L2 distances between two curves on [0,1], by the midpoint rule with
/// `points` cells.
inline Distance l1_l2_distance(const std::function<double(double)>& est,
                               const std::function<double(double)>& truth,
                               std::size_t points = 2001) {
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < points; ++k) {
        const double s = (static_cast<double>(k) + 0.5) / static_cast<double>(points);
        const double d = est(s) - truth(s);
        s1 += std::abs(d);
        s2 += d * d;
    }
    const double np = static_cast<double>(points);
    return {s1 / np, std::sqrt(s2 / np)};
}

struct BiasMse {
    double rb_percent = 0.0;
    double mse = 0.0;  // unscaled
};

inline BiasMse rb_mse(std::span<const double> estimates, double truth) {
    if (truth == 0.0) throw Error(ErrorCode::ZeroTruth, "relative bias undefined for a zero target");
    if (estimates.empty()) throw Error(ErrorCode::InvalidArgument, "no estimates");
    BiasMse r;
    for (double e : estimates) {
        r.rb_percent += (e - truth) / truth;
        r.mse += (e - truth) * (e - truth);
    }
    const double b = static_cast<double>(estimates.size());
    r.rb_percent = r.rb_percent / b * 100.0;
    r.mse /= b;
    return r;
}

/// sup_x |F_hat(x) - F(x)| for a step cdf against a continuous one: checked on
/// both sides of every jump.
inline double sup_cdf_error(const StepCdfPair& cdfs, int group,
                            const std::function<double(double)>& truth) {
    const auto& t = cdfs.t();
    const auto& c = cdfs.cumulative(group);
    double sup = 0.0, prev = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double f = truth(t[i]);
        sup = std::max({sup, std::abs(prev - f), std::abs(c[i] - f)});
        prev = c[i];
    }
    return sup;
}

// ---------------------------------------------------------------- replication engine

enum class Method { Bp, Ecdf, Kernel, BoxCox };

inline const char* to_string(Method m) {
    switch (m) {
    case Method::Bp: return "bp";
    case Method::Ecdf: return "ecdf";
    case Method::Kernel: return "kernel";
    case Method::BoxCox: return "boxcox";
    }
    return "unknown";
}

inline std::optional<Method> parse_method(const std::string& s) {
    for (Method m : {Method::Bp, Method::Ecdf, Method::Kernel, Method::BoxCox})
        if (s == to_string(m)) return m;
    return std::nullopt;
}

inline RocSummary estimate(Method m, const TwoSampleData& data, const BpOptions& bp = {}) {
    switch (m) {
    case Method::Bp: return bp_summary(fit_bp(data, bp));
    case Method::Ecdf: return ecdf_summary(data);
    case Method::Kernel: return kernel_summary(data);
    case Method::BoxCox: return boxcox_summary(data);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown method");
}

struct MetricReport {
    std::string method;
    double l1_mean = 0.0;
    double l2_mean = 0.0;
    BiasMse auc;
    BiasMse youden;
    BiasMse cutoff;
    int replications = 0;  // successful replicates
    int failures = 0;
    std::uint64_t seed = 0;
    std::map<int, int> order_counts;  // BP only: chosen order -> frequency
};

/// Runs `reps` replicates. Each replicate generates one dataset and feeds it to
/// every method. Aggregation runs in replicate order, so results do not depend
/// on the worker count.
inline std::vector<MetricReport> run_scenario(const Scenario& sc, std::span<const Method> methods,
                                              int reps, std::uint64_t seed,
                                              const BpOptions& bp = {}) {
    if (reps < 1) throw Error(ErrorCode::InvalidArgument, "need at least one replicate");
    const TrueSummary truth = true_summary(sc);
    struct Cell {
        bool ok = false;
        double l1 = 0, l2 = 0, auc = 0, j = 0, c = 0;
        int order = 0;
    };
    const std::size_t nm = methods.size();
    std::vector<Cell> cells(static_cast<std::size_t>(reps) * nm);

    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t r) {
        const TwoSampleData data = generate(sc, seed, r);
        for (std::size_t k = 0; k < nm; ++k) {
            Cell& cell = cells[r * nm + k];
            try {
                RocSummary s;
                if (methods[k] == Method::Bp) {
                    const BpModelFit fit = fit_bp(data, bp);
                    cell.order = fit.order;
                    s = bp_summary(fit);
                } else {
                    s = estimate(methods[k], data, bp);
                }
                const Distance d = l1_l2_distance(s.roc, truth.roc);
                cell = {true, d.l1, d.l2, s.auc, s.youden, s.cutoff, cell.order};
            } catch (const Error&) {
                cell.ok = false;
            }
        }
    });

    std::vector<MetricReport> out;
    for (std::size_t k = 0; k < nm; ++k) {
        MetricReport rep;
        rep.method = to_string(methods[k]);
        rep.seed = seed;
        std::vector<double> auc, j, c;
        double l1 = 0.0, l2 = 0.0;
        for (std::size_t r = 0; r < static_cast<std::size_t>(reps); ++r) {
            const Cell& cell = cells[r * nm + k];
            if (!cell.ok) {
                ++rep.failures;
                continue;
            }
            l1 += cell.l1;
            l2 += cell.l2;
            auc.push_back(cell.auc);
            j.push_back(cell.j);
            c.push_back(cell.c);
            if (methods[k] == Method::Bp) ++rep.order_counts[cell.order];
        }
        rep.replications = static_cast<int>(auc.size());
        if (rep.replications > 0) {
            rep.l1_mean = l1 / rep.replications;
            rep.l2_mean = l2 / rep.replications;
            rep.auc = rb_mse(auc, sc.true_auc);
            rep.youden = rb_mse(j, sc.true_j);
            rep.cutoff = rb_mse(c, sc.true_cutoff);
        }
        out.push_back(std::move(rep));
    }
    return out;
}

// ---------------------------------------------------------------- bootstrap intervals

enum class Statistic { Auc, Youden, Cutoff };

inline const char* to_string(Statistic s) {
    switch (s) {
    case Statistic::Auc: return "auc";
    case Statistic::Youden: return "youden";
    case Statistic::Cutoff: return "cutoff";
    }
    return "unknown";
}

inline double statistic_of(const RocSummary& s, Statistic st) {
    switch (st) {
    case Statistic::Auc: return s.auc;
    case Statistic::Youden: return s.youden;
    case Statistic::Cutoff: return s.cutoff;
    }
    return 0.0;
}

struct ConfidenceInterval {
    Statistic statistic = Statistic::Auc;
    double point = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.95;
    int replicates = 0;
    int dropped = 0;
};

/// Percentile bootstrap: resample n0 healthy and n1 diseased values with
/// replacement, re-estimate, and take the type-7 quantiles at (1-level)/2 and
/// 1-(1-level)/2. Failed replicates are dropped; more than 10% dropped is an error.
inline std::vector<ConfidenceInterval> bootstrap_ci(const TwoSampleData& data,
                                                    std::span<const Statistic> stats, Method method,
                                                    int reps, double level, std::uint64_t seed,
                                                    const BpOptions& bp = {}) {
    if (!(level > 0.0 && level < 1.0))
        throw Error(ErrorCode::InvalidArgument, "confidence level must lie in (0,1)");
    if (reps < 2.0 / (1.0 - level) - 1e-9)
        throw Error(ErrorCode::InvalidArgument, "too few bootstrap replicates for this level");

    const RocSummary point = estimate(method, data, bp);
    const std::size_t ns = stats.size();
    std::vector<double> values(static_cast<std::size_t>(reps) * ns, 0.0);
    std::vector<char> ok(static_cast<std::size_t>(reps), 0);
    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t b) {
        RandomStream rng(seed, b, stream_tag::kPercentileBootstrap);
        std::vector<double> x(data.n0()), y(data.n1());
        for (double& v : x) v = data.healthy()[rng.index(data.n0())];
        for (double& v : y) v = data.diseased()[rng.index(data.n1())];
        try {
            const RocSummary s = estimate(method, TwoSampleData(std::move(x), std::move(y)), bp);
            for (std::size_t k = 0; k < ns; ++k) values[b * ns + k] = statistic_of(s, stats[k]);
            ok[b] = 1;
        } catch (const Error&) {
        }
    });

    int dropped = 0;
    for (char o : ok) dropped += o ? 0 : 1;
    if (dropped > reps / 10)
        throw Error(ErrorCode::TooManyFailures,
                    std::to_string(dropped) + " of " + std::to_string(reps) + " replicates failed");

    std::vector<ConfidenceInterval> out;
    for (std::size_t k = 0; k < ns; ++k) {
        std::vector<double> v;
        for (std::size_t b = 0; b < static_cast<std::size_t>(reps); ++b)
            if (ok[b]) v.push_back(values[b * ns + k]);
        std::sort(v.begin(), v.end());
        ConfidenceInterval ci;
        ci.statistic = stats[k];
        ci.point = statistic_of(point, stats[k]);
        ci.lower = quantile_type7(v, (1.0 - level) / 2.0);
        ci.upper = quantile_type7(v, 1.0 - (1.0 - level) / 2.0);
        ci.level = level;
        ci.replicates = static_cast<int>(v.size());
        ci.dropped = dropped;
        out.push_back(ci);
    }
    return out;
}

}  // namespace lrroc
