// lrroc: command-line front end for the likelihood-ratio-ordered ROC estimator.
//
//   lrroc fit      --input data.csv [--method bp|ecdf|kernel|boxcox] [--order auto|N]
//   lrroc gof      --input data.csv [--bootstrap 1000] [--seed S]
//   lrroc ci       --input data.csv [--method bp] [--level 0.95] [--bootstrap 1000] [--seed S]
//   lrroc simulate --scenario normal-0.5 [--n0 100 --n1 100 --reps 2000 --methods bp,ecdf]
//
// Exit status: 0 success, 2 input error, 3 estimation error.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lrroc/lrroc.hpp"

using json = nlohmann::ordered_json;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitEstimation = 3;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string input, healthy, diseased;
    std::string order = "auto";
    std::string basis = "auto";
    std::string precision = "6";
    std::string format = "json";
    std::optional<std::uint64_t> seed;
};

// ---------------------------------------------------------------- output helpers

class Printer {
public:
    explicit Printer(bool full) : full_(full) {}

    json num(double v) const {
        if (!std::isfinite(v)) return nullptr;
        if (full_) return v;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return std::strtod(buf, nullptr);
    }

    std::string text(double v) const {
        if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
        char buf[32];
        std::snprintf(buf, sizeof buf, full_ ? "%.17g" : "%.6g", v);
        return buf;
    }

private:
    bool full_;
};

void emit_json(const json& doc) { std::cout << doc.dump(2) << '\n'; }

// ---------------------------------------------------------------- input

std::ifstream open_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    return in;
}

lrroc::TwoSampleData load_data(const Common& c) {
    try {
        if (!c.input.empty()) {
            auto in = open_file(c.input);
            return lrroc::records_to_data(lrroc::parse_records_csv(in));
        }
        if (c.healthy.empty() || c.diseased.empty())
            throw InputError("give --input, or both --healthy and --diseased");
        auto h = open_file(c.healthy);
        auto d = open_file(c.diseased);
        return lrroc::TwoSampleData(lrroc::parse_value_list(h), lrroc::parse_value_list(d));
    } catch (const lrroc::Error& e) {
        throw InputError(e.what());
    }
}

lrroc::BpOptions bp_options(const Common& c) {
    lrroc::BpOptions opt;
    if (c.order != "auto") {
        int n = 0;
        try {
            std::size_t pos = 0;
            n = std::stoi(c.order, &pos);
            if (pos != c.order.size()) n = 0;
        } catch (const std::exception&) {
        }
        if (n < 1) throw InputError("--order must be 'auto' or a positive integer");
        opt.order = n;
    }
    if (c.basis == "single") opt.mode = lrroc::BasisMode::Single;
    else if (c.basis == "dual") opt.mode = lrroc::BasisMode::Dual;
    else if (c.basis != "auto") throw InputError("--basis must be auto, single or dual");
    return opt;
}

lrroc::Method method_of(const std::string& s) {
    if (auto m = lrroc::parse_method(s)) return *m;
    throw InputError("unknown method '" + s + "'");
}

std::uint64_t resolve_seed(const Common& c) {
    if (c.seed) return *c.seed;
    std::random_device rd;
    const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::cerr << "lrroc: no --seed given, using " << s << '\n';
    return s;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

void warn_fallback(const lrroc::BpModelFit& fit) {
    if (fit.mode_fallback)
        std::cerr << "lrroc: warning: data contain non-positive values, using the single basis\n";
}

json bp_diagnostics(const lrroc::BpModelFit& fit, const Printer& p) {
    json d;
    d["converged"] = fit.report.converged;
    d["separation"] = fit.report.separation_flag;
    d["iterations"] = fit.report.iterations;
    d["kkt_residual"] = p.num(fit.report.kkt_residual);
    d["mode_fallback"] = fit.mode_fallback;
    if (fit.selection) {
        json bic = json::array();
        for (std::size_t k = 0; k < fit.selection->candidates.size(); ++k)
            bic.push_back({{"order", fit.selection->candidates[k]}, {"bic", p.num(fit.selection->bic[k])}});
        d["bic"] = bic;
    }
    return d;
}

// ---------------------------------------------------------------- commands

struct FitArgs {
    std::string method = "bp";
    int roc_grid = 101;
    bool vertices = false;
};

int cmd_fit(const Common& c, const FitArgs& a) {
    const Printer p(c.precision == "full");
    const auto data = load_data(c);
    const auto method = method_of(a.method);
    const auto opt = bp_options(c);
    if (a.roc_grid < 2) throw InputError("--roc-grid must be at least 2");

    json doc;
    doc["schema"] = "lrroc/1";
    doc["command"] = "fit";
    doc["method"] = a.method;
    doc["n0"] = data.n0();
    doc["n1"] = data.n1();

    lrroc::RocSummary s;
    try {
        if (method == lrroc::Method::Bp) {
            const auto fit = lrroc::fit_bp(data, opt);
            warn_fallback(fit);
            s = lrroc::bp_summary(fit);
            doc["order"] = fit.order;
            doc["mode"] = lrroc::to_string(fit.spec.mode);
            doc["diagnostics"] = bp_diagnostics(fit, p);
        } else {
            s = lrroc::estimate(method, data);
            doc["order"] = nullptr;
            doc["mode"] = nullptr;
        }
    } catch (const lrroc::Error& e) {
        std::cerr << "lrroc: " << e.what() << '\n';
        return kExitEstimation;
    }

    std::vector<std::pair<double, double>> pts;
    for (int k = 0; k < a.roc_grid; ++k) {
        const double sv = static_cast<double>(k) / (a.roc_grid - 1);
        pts.emplace_back(sv, s.roc(sv));
    }

    if (c.format == "csv") {
        std::cout << "s,roc\n";
        for (const auto& [sv, r] : pts) std::cout << p.text(sv) << ',' << p.text(r) << '\n';
        return 0;
    }
    doc["auc"] = p.num(s.auc);
    doc["youden"] = p.num(s.youden);
    doc["cutoff"] = p.num(s.cutoff);
    doc["cutoff_method"] = lrroc::to_string(s.cutoff_method);
    json roc = json::array();
    for (const auto& [sv, r] : pts) roc.push_back({p.num(sv), p.num(r)});
    doc["roc_points"] = roc;
    if (a.vertices) {
        json v = json::array();
        for (const auto& [x, y] : s.vertices) v.push_back({p.num(x), p.num(y)});
        doc["vertices"] = v;
    }
    emit_json(doc);
    return 0;
}

int cmd_gof(const Common& c, int reps) {
    const Printer p(c.precision == "full");
    const auto data = load_data(c);
    const auto opt = bp_options(c);
    if (reps < 1) throw InputError("--bootstrap must be at least 1");
    const std::uint64_t seed = resolve_seed(c);

    lrroc::GofResult g;
    lrroc::BpModelFit fit;
    try {
        fit = lrroc::fit_bp(data, opt);
        warn_fallback(fit);
        g = lrroc::gof_bootstrap(data, reps, seed, opt);
    } catch (const lrroc::Error& e) {
        std::cerr << "lrroc: " << e.what() << '\n';
        return kExitEstimation;
    }

    if (c.format == "csv") {
        std::cout << "delta,p_value,bootstrap_reps,successful_reps,failed_reps,order,seed\n"
                  << p.text(g.delta) << ',' << p.text(g.p_value) << ',' << g.bootstrap_reps << ','
                  << g.successful_reps << ',' << g.failed_reps << ',' << g.order << ',' << seed << '\n';
        return 0;
    }
    json doc;
    doc["schema"] = "lrroc/1";
    doc["command"] = "gof";
    doc["method"] = "bp";
    doc["n0"] = data.n0();
    doc["n1"] = data.n1();
    doc["order"] = fit.order;
    doc["mode"] = lrroc::to_string(fit.spec.mode);
    doc["seed"] = seed;
    doc["gof"] = {{"delta", p.num(g.delta)},
                  {"p_value", p.num(g.p_value)},
                  {"bootstrap_reps", g.bootstrap_reps},
                  {"successful_reps", g.successful_reps},
                  {"failed_reps", g.failed_reps}};
    doc["diagnostics"] = bp_diagnostics(fit, p);
    emit_json(doc);
    return 0;
}

struct CiArgs {
    std::string method = "bp";
    std::string statistics = "auc,youden,cutoff";
    int reps = 1000;
    double level = 0.95;
};

int cmd_ci(const Common& c, const CiArgs& a) {
    const Printer p(c.precision == "full");
    const auto data = load_data(c);
    const auto method = method_of(a.method);
    const auto opt = bp_options(c);
    std::vector<lrroc::Statistic> stats;
    for (const auto& name : split_list(a.statistics)) {
        if (name == "auc") stats.push_back(lrroc::Statistic::Auc);
        else if (name == "youden") stats.push_back(lrroc::Statistic::Youden);
        else if (name == "cutoff") stats.push_back(lrroc::Statistic::Cutoff);
        else throw InputError("unknown statistic '" + name + "'");
    }
    if (stats.empty()) throw InputError("no statistics requested");
    if (!(a.level > 0.0 && a.level < 1.0)) throw InputError("--level must lie in (0,1)");
    if (a.reps < 2.0 / (1.0 - a.level) - 1e-9)
        throw InputError("--bootstrap must be at least 2/(1-level)");
    const std::uint64_t seed = resolve_seed(c);

    std::vector<lrroc::ConfidenceInterval> cis;
    try {
        cis = lrroc::bootstrap_ci(data, stats, method, a.reps, a.level, seed, opt);
    } catch (const lrroc::Error& e) {
        std::cerr << "lrroc: " << e.what() << '\n';
        return kExitEstimation;
    }

    if (c.format == "csv") {
        std::cout << "statistic,point,lower,upper,level,replicates,dropped\n";
        for (const auto& ci : cis)
            std::cout << lrroc::to_string(ci.statistic) << ',' << p.text(ci.point) << ','
                      << p.text(ci.lower) << ',' << p.text(ci.upper) << ',' << p.text(ci.level) << ','
                      << ci.replicates << ',' << ci.dropped << '\n';
        return 0;
    }
    json doc;
    doc["schema"] = "lrroc/1";
    doc["command"] = "ci";
    doc["method"] = a.method;
    doc["n0"] = data.n0();
    doc["n1"] = data.n1();
    doc["seed"] = seed;
    doc["bootstrap_reps"] = a.reps;
    json arr = json::array();
    for (const auto& ci : cis)
        arr.push_back({{"statistic", lrroc::to_string(ci.statistic)},
                       {"point", p.num(ci.point)},
                       {"lower", p.num(ci.lower)},
                       {"upper", p.num(ci.upper)},
                       {"level", p.num(ci.level)},
                       {"replicates", ci.replicates}});
    doc["ci"] = arr;
    doc["diagnostics"] = {{"dropped_replicates", cis.front().dropped}};
    emit_json(doc);
    return 0;
}

struct SimArgs {
    std::string scenario;
    std::string family;
    std::vector<double> params0, params1;
    int n0 = 100, n1 = 100, reps = 2000;
    std::string methods = "bp,ecdf,kernel,boxcox";
};

int cmd_simulate(const Common& c, const SimArgs& a) {
    const Printer p(c.precision == "full");
    if (a.n0 < 2 || a.n1 < 2) throw InputError("--n0 and --n1 must be at least 2");
    if (a.reps < 1) throw InputError("--reps must be at least 1");

    lrroc::Scenario sc;
    if (!a.scenario.empty()) {
        auto found = lrroc::find_scenario(a.scenario, a.n0, a.n1);
        if (!found) throw InputError("unknown scenario '" + a.scenario + "'");
        sc = *found;
    } else {
        if (a.params0.size() != 2 || a.params1.size() != 2)
            throw InputError("give --scenario, or --family with two --params0 and two --params1 values");
        sc.name = "custom";
        if (a.family == "normal") sc.family = lrroc::Family::Normal;
        else if (a.family == "gamma") sc.family = lrroc::Family::Gamma;
        else if (a.family == "beta") sc.family = lrroc::Family::Beta;
        else throw InputError("--family must be normal, gamma or beta");
        for (double v : {a.params0[1], a.params1[1]})
            if (!(v > 0.0)) throw InputError("scale parameters must be positive");
        if (sc.family != lrroc::Family::Normal)
            for (double v : {a.params0[0], a.params1[0]})
                if (!(v > 0.0)) throw InputError("shape parameters must be positive");
        sc.params0 = {a.params0[0], a.params0[1]};
        sc.params1 = {a.params1[0], a.params1[1]};
        sc.n0 = a.n0;
        sc.n1 = a.n1;
        try {
            sc = lrroc::with_truth(sc);
        } catch (const std::exception& e) {
            std::cerr << "lrroc: cannot compute population truth: " << e.what() << '\n';
            return kExitEstimation;
        }
    }
    std::vector<lrroc::Method> methods;
    for (const auto& m : split_list(a.methods)) methods.push_back(method_of(m));
    if (methods.empty()) throw InputError("no methods requested");
    const auto opt = bp_options(c);
    const std::uint64_t seed = resolve_seed(c);

    std::vector<lrroc::MetricReport> rows;
    try {
        rows = lrroc::run_scenario(sc, methods, a.reps, seed, opt);
    } catch (const lrroc::Error& e) {
        std::cerr << "lrroc: " << e.what() << '\n';
        return kExitEstimation;
    }

    if (c.format == "csv") {
        std::cout << "scenario,method,n0,n1,l1_mean,l2_mean,auc_rb_percent,auc_mse_x1000,"
                     "youden_rb_percent,youden_mse_x1000,cutoff_rb_percent,cutoff_mse_x1000,"
                     "replications,failures,seed\n";
        for (const auto& r : rows)
            std::cout << sc.name << ',' << r.method << ',' << sc.n0 << ',' << sc.n1 << ','
                      << p.text(r.l1_mean) << ',' << p.text(r.l2_mean) << ','
                      << p.text(r.auc.rb_percent) << ',' << p.text(1000 * r.auc.mse) << ','
                      << p.text(r.youden.rb_percent) << ',' << p.text(1000 * r.youden.mse) << ','
                      << p.text(r.cutoff.rb_percent) << ',' << p.text(1000 * r.cutoff.mse) << ','
                      << r.replications << ',' << r.failures << ',' << r.seed << '\n';
        return 0;
    }
    json doc;
    doc["schema"] = "lrroc/1";
    doc["command"] = "simulate";
    doc["scenario"] = {{"name", sc.name},
                       {"family", lrroc::to_string(sc.family)},
                       {"params0", {sc.params0[0], sc.params0[1]}},
                       {"params1", {sc.params1[0], sc.params1[1]}},
                       {"n0", sc.n0},
                       {"n1", sc.n1},
                       {"true_auc", p.num(sc.true_auc)},
                       {"true_youden", p.num(sc.true_j)},
                       {"true_cutoff", p.num(sc.true_cutoff)}};
    doc["reps"] = a.reps;
    doc["seed"] = seed;
    json arr = json::array();
    for (const auto& r : rows) {
        json row = {{"method", r.method},
                    {"l1_mean", p.num(r.l1_mean)},
                    {"l2_mean", p.num(r.l2_mean)},
                    {"auc", {{"rb_percent", p.num(r.auc.rb_percent)}, {"mse_x1000", p.num(1000 * r.auc.mse)}}},
                    {"youden",
                     {{"rb_percent", p.num(r.youden.rb_percent)}, {"mse_x1000", p.num(1000 * r.youden.mse)}}},
                    {"cutoff",
                     {{"rb_percent", p.num(r.cutoff.rb_percent)}, {"mse_x1000", p.num(1000 * r.cutoff.mse)}}},
                    {"replications", r.replications},
                    {"failures", r.failures}};
        if (!r.order_counts.empty()) {
            json oc = json::object();
            for (const auto& [n, k] : r.order_counts) oc[std::to_string(n)] = k;
            row["order_counts"] = oc;
        }
        arr.push_back(row);
    }
    doc["rows"] = arr;
    emit_json(doc);
    return 0;
}

void add_input_options(CLI::App* cmd, Common& c) {
    cmd->add_option("--input", c.input, "CSV file with header value,group");
    cmd->add_option("--healthy", c.healthy, "file of healthy values, one per line");
    cmd->add_option("--diseased", c.diseased, "file of diseased values, one per line");
}

void add_model_options(CLI::App* cmd, Common& c) {
    cmd->add_option("--order", c.order, "Bernstein order: auto (BIC) or a positive integer");
    cmd->add_option("--basis", c.basis, "auto, single or dual");
}

void add_output_options(CLI::App* cmd, Common& c) {
    cmd->add_option("--precision", c.precision, "6 significant digits, or 'full'")
        ->check(CLI::IsMember({"6", "full"}));
    cmd->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-sample ROC estimation under likelihood-ratio ordering"};
    app.require_subcommand(1);
    Common common;

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "estimate ROC, AUC, Youden index and cutoff");
    add_input_options(fit_cmd, common);
    add_model_options(fit_cmd, common);
    add_output_options(fit_cmd, common);
    fit_cmd->add_option("--method", fit.method, "bp, ecdf, kernel or boxcox");
    fit_cmd->add_option("--roc-grid", fit.roc_grid, "number of equally spaced ROC samples");
    fit_cmd->add_flag("--vertices", fit.vertices, "also report the staircase vertices");

    int gof_reps = 1000;
    auto* gof_cmd = app.add_subcommand("gof", "bootstrap goodness-of-fit test of the ordering");
    add_input_options(gof_cmd, common);
    add_model_options(gof_cmd, common);
    add_output_options(gof_cmd, common);
    gof_cmd->add_option("--bootstrap", gof_reps, "bootstrap replicates");
    gof_cmd->add_option("--seed", common.seed, "random seed");

    CiArgs ci;
    auto* ci_cmd = app.add_subcommand("ci", "bootstrap percentile confidence intervals");
    add_input_options(ci_cmd, common);
    add_model_options(ci_cmd, common);
    add_output_options(ci_cmd, common);
    ci_cmd->add_option("--method", ci.method, "bp, ecdf, kernel or boxcox");
    ci_cmd->add_option("--statistics", ci.statistics, "comma-separated subset of auc,youden,cutoff");
    ci_cmd->add_option("--bootstrap", ci.reps, "bootstrap replicates");
    ci_cmd->add_option("--level", ci.level, "confidence level");
    ci_cmd->add_option("--seed", common.seed, "random seed");

    SimArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo comparison of estimators");
    add_model_options(sim_cmd, common);
    add_output_options(sim_cmd, common);
    sim_cmd->add_option("--scenario", sim.scenario, "built-in scenario, e.g. normal-0.5");
    sim_cmd->add_option("--family", sim.family, "normal, gamma or beta (custom scenario)");
    sim_cmd->add_option("--params0", sim.params0, "healthy parameters")->delimiter(',')->expected(2);
    sim_cmd->add_option("--params1", sim.params1, "diseased parameters")->delimiter(',')->expected(2);
    sim_cmd->add_option("--n0", sim.n0, "healthy sample size");
    sim_cmd->add_option("--n1", sim.n1, "diseased sample size");
    sim_cmd->add_option("--reps", sim.reps, "replications");
    sim_cmd->add_option("--methods", sim.methods, "comma-separated methods");
    sim_cmd->add_option("--seed", common.seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*fit_cmd) return cmd_fit(common, fit);
        if (*gof_cmd) return cmd_gof(common, gof_reps);
        if (*ci_cmd) return cmd_ci(common, ci);
        if (*sim_cmd) return cmd_simulate(common, sim);
    } catch (const InputError& e) {
        std::cerr << "lrroc: " << e.what() << '\n';
        return kExitInput;
    } catch (const lrroc::Error& e) {
        std::cerr << "lrroc: " << e.what() << '\n';
        return kExitEstimation;
    }
    return kExitInput;
}
