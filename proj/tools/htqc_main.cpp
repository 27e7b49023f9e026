// Command-line front end: solves the workload free-boundary problem, runs the
// finite-buffer queue simulator, the two-class MDP study and the
// throughput-time compliance sweep, persisting CSV/JSON artifacts.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "htqc/fbp.hpp"
#include "htqc/io.hpp"
#include "htqc/mdp.hpp"
#include "htqc/metrics.hpp"
#include "htqc/qsim.hpp"
#include "htqc/reduction.hpp"
#include "htqc/reflect.hpp"
#include "htqc/scenario.hpp"

using namespace htqc;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string scenario_path;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    double n_override = 0.0;
    std::vector<double> n_list;
    int replications = 0;
    int grid = 2000;
    std::string policy = "ao";
    double eps_override = -1.0;
    double horizon = 0.0;
    double sample_dt = 0.1;
    bool adversarial = false;
    int sign_k = 8;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--scenario", args.scenario_path, "scenario JSON file")->required();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "64-bit master seed");
    cmd->add_option("--n", args.n_override, "override the scale index n");
    cmd->add_option("--n-list", args.n_list, "sweep over these n values")->delimiter(',');
    cmd->add_option("--replications", args.replications, "Monte-Carlo replications / seeds");
    cmd->add_option("--grid", args.grid, "Bellman grid size");
    cmd->add_option("--eps", args.eps_override, "override the policy margin epsilon");
    cmd->add_option("--horizon", args.horizon, "simulation horizon");
    cmd->add_option("--sample-dt", args.sample_dt, "trajectory sampling step");
}

struct LoadedScenario {
    ScenarioParams params;
    DerivedConstants derived;
    ReductionObjects red;
    std::string fp;
};

LoadedScenario load(const CommonArgs& args) {
    ScenarioParams p = load_scenario(args.scenario_path);
    if (args.n_override > 0.0) p.n = args.n_override;
    if (args.eps_override >= 0.0) p.epsilon = args.eps_override;
    LoadedScenario out{p, validate(p), {}, {}};
    out.red = make_reduction(out.params, out.derived);
    out.fp = fingerprint(scenario_to_json_text(out.params));
    return out;
}

void ensure_out(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory: " + dir);
}

void write_meta(const CommonArgs& args, const std::string& fp) {
    json meta;
    meta["fingerprint"] = fp;
    meta["seed"] = args.seed;
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    meta["timestamp_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    write_file(args.out_dir + "/run_meta.json", meta.dump(2));
}

int cmd_solve(const CommonArgs& args) {
    LoadedScenario sc = load(args);
    ensure_out(args.out_dir);
    SolveOptions opts;
    opts.grid_size = args.grid;
    const BellmanSolution sol = solve_bellman(sc.derived, sc.red, opts);

    write_file(args.out_dir + "/bellman.csv", stamp_csv(bellman_to_csv(sol), sc.fp, args.seed));
    json summary;
    summary["fingerprint"] = sc.fp;
    summary["seed"] = args.seed;
    summary["xstar"] = sol.xstar;
    summary["astar"] = std::min(sol.xstar, sc.red.theta_dot_a);
    summary["xbar"] = sc.red.xbar;
    summary["rbar"] = sc.red.rbar;
    summary["istar"] = sc.red.istar + 1; // class labels are 1-based in artifacts
    summary["value_at_x0"] = [&] {
        double w0 = 0.0;
        for (int i = 0; i < sc.params.num_classes; ++i)
            w0 += sc.derived.theta[i] * sc.params.x0[i];
        return value_at(sol, w0);
    }();
    summary["grid_size"] = args.grid;
    summary["iterations"] = sol.iterations;
    summary["residual_max"] = sol.residual_max;
    write_file(args.out_dir + "/solve_summary.json", summary.dump(2));
    write_meta(args, sc.fp);
    std::printf("xstar = %.6f\n", sol.xstar);
    return 0;
}

int cmd_simulate(const CommonArgs& args) {
    LoadedScenario sc = load(args);
    if (args.policy != "ao" && args.policy != "fixed_priority" && args.policy != "fixed")
        throw ConfigError("policy must be 'ao' or 'fixed_priority'");
    const PolicyKind kind = policy_kind_from_string(args.policy);
    ensure_out(args.out_dir);

    SolveOptions sopts;
    sopts.grid_size = args.grid;
    const BellmanSolution sol = solve_bellman(sc.derived, sc.red, sopts);
    const double astar = std::min(sol.xstar, sc.red.theta_dot_a);

    std::vector<double> ns = args.n_list;
    if (ns.empty()) ns.push_back(sc.params.n);
    json rows = json::array();
    for (double n : ns) {
        ScenarioParams p = sc.params;
        p.n = n;
        const DerivedConstants derived = validate(p);
        const ReductionObjects red = make_reduction(p, derived);
        const SimInput in = make_sim_input(p, derived, red, kind, astar);

        RunOptions ro;
        ro.horizon = args.horizon > 0.0 ? args.horizon : std::log(1e8) / p.alpha;
        ro.sample_dt = args.sample_dt;
        ro.seed = args.seed;
        ro.record_paths = true;
        ro.record_customers = false;
        const SimRecord rec = run(in, ro);
        char fname[64];
        std::snprintf(fname, sizeof(fname), "/trajectory_n%g.csv", n);
        write_file(args.out_dir + fname, stamp_csv(trajectory_to_csv(rec), sc.fp, args.seed));

        CostOptions copts;
        copts.replications = args.replications > 0 ? args.replications : 100;
        copts.horizon = ro.horizon;
        copts.seed = args.seed;
        if (args.horizon > 0.0) // an explicit horizon overrides the bias guard
            copts.bias_budget = std::numeric_limits<double>::infinity();
        const CostEstimate est = cost_estimate(in, copts);

        json row;
        row["n"] = n;
        row["policy"] = to_string(kind);
        row["estimate"] = est.estimate;
        row["std_error"] = est.std_error;
        row["replications"] = est.replications;
        row["horizon"] = est.horizon;
        row["mean_integrated"] = est.mean_integrated;
        row["mean_forced_rejections"] = est.mean_forced_rejections;
        row["ssc_deviation"] = ssc_deviation(rec, red);
        double fr = 0.0;
        for (auto c : rec.forced_rejections) fr += static_cast<double>(c);
        row["path_forced_rejections"] = fr;
        row["value_bcp_at_x0"] = [&] {
            double w0 = 0.0;
            for (int i = 0; i < p.num_classes; ++i) w0 += derived.theta[i] * p.x0[i];
            return value_at(sol, w0);
        }();
        rows.push_back(row);
    }
    json summary;
    summary["fingerprint"] = sc.fp;
    summary["seed"] = args.seed;
    summary["xstar"] = sol.xstar;
    summary["astar"] = astar;
    summary["rows"] = rows;
    write_file(args.out_dir + "/simulate_summary.json", summary.dump(2));
    write_meta(args, sc.fp);
    std::printf("simulate: %zu run(s) written to %s\n", rows.size(), args.out_dir.c_str());
    return 0;
}

int cmd_mdp(const CommonArgs& args) {
    LoadedScenario sc = load(args);
    ensure_out(args.out_dir);
    const MdpSpec spec = make_mdp_spec(sc.params, sc.derived); // throws UnsupportedPrimitives
    const MdpSolution sol = value_iteration(spec);

    write_file(args.out_dir + "/mdp_value.csv",
               stamp_csv(value_grid_to_csv(spec, sol.V), sc.fp, args.seed));
    write_file(args.out_dir + "/mdp_policy.csv",
               stamp_csv(policy_grid_to_csv(spec, sol), sc.fp, args.seed));

    const double hist_T = args.horizon > 0.0 ? args.horizon : 2000.0;
    const std::int64_t x1 = static_cast<std::int64_t>(
        std::floor(sc.params.x0[0] * sc.derived.sqrt_n + 1e-9));
    const std::int64_t x2 = static_cast<std::int64_t>(
        std::floor(sc.params.x0[1] * sc.derived.sqrt_n + 1e-9));
    const auto hist = simulate_optimal(spec, sol, hist_T, args.seed, x1, x2);
    write_file(args.out_dir + "/mdp_histogram.csv",
               stamp_csv(histogram_to_csv(spec, hist), sc.fp, args.seed));

    if (!args.n_list.empty()) {
        RatioOptions ropts;
        if (args.replications > 0) ropts.replications = args.replications;
        ropts.horizon = args.horizon;
        ropts.seed = args.seed;
        ropts.bellman_grid = args.grid;
        const auto curve = ratio_curve(sc.params, args.n_list, ropts);
        write_file(args.out_dir + "/mdp_ratio.csv",
                   stamp_csv(ratio_curve_to_csv(curve), sc.fp, args.seed));
    }
    write_meta(args, sc.fp);
    std::printf("mdp: value/policy/histogram written to %s\n", args.out_dir.c_str());
    return 0;
}

int cmd_littles(const CommonArgs& args) {
    ScenarioParams base = load_scenario(args.scenario_path);
    if (!base.deadlines) throw ConfigError("littles requires a scenario with deadlines 'd'");
    // buffer sizes induced by the deadlines
    for (int i = 0; i < base.num_classes; ++i)
        base.b[i] = base.lambda[i] * (*base.deadlines)[i];
    base.epsilon = 0.0; // the compliance policy runs with zero margin
    ensure_out(args.out_dir);

    const DerivedConstants derived0 = validate(base);
    const ReductionObjects red0 = make_reduction(base, derived0);
    SolveOptions sopts;
    sopts.grid_size = args.grid;
    const BellmanSolution sol = solve_bellman(derived0, red0, sopts);
    const double astar = std::min(sol.xstar, red0.theta_dot_a);
    const std::string fp = fingerprint(scenario_to_json_text(base));

    std::vector<double> ns = args.n_list;
    if (ns.empty()) ns.push_back(base.n);
    const int seeds = args.replications > 0 ? args.replications : 10;
    const double T = args.horizon > 0.0 ? args.horizon : 50.0;
    const PolicyKind kind =
        args.adversarial ? PolicyKind::ServeFirstOnly : PolicyKind::AsymptoticOptimal;

    std::vector<std::vector<double>> stats(ns.size());
    std::vector<std::vector<double>> residuals(ns.size());
    for (std::size_t j = 0; j < ns.size(); ++j) {
        ScenarioParams p = base;
        p.n = ns[j];
        const DerivedConstants derived = validate(p);
        const ReductionObjects red = make_reduction(p, derived);
        const SimInput in = make_sim_input(p, derived, red, kind, astar);
        for (int s = 0; s < seeds; ++s) {
            RunOptions ro;
            ro.horizon = T;
            ro.sample_dt = args.sample_dt;
            ro.seed = args.seed;
            ro.replication = static_cast<std::uint64_t>(s);
            ro.record_paths = true;
            ro.record_customers = true;
            const SimRecord rec = run(in, ro);
            const ThroughputSeries series =
                throughput_times(rec.customers, rec.t, T, derived.sqrt_n);
            stats[j].push_back(compliance_statistic(series, *base.deadlines));
            const auto res = littles_residual(rec, series, p.lambda);
            residuals[j].push_back(*std::max_element(res.begin(), res.end()));
        }
    }
    const ComplianceReport rep = compliance_check(ns, stats, *base.deadlines, args.sign_k);
    json out = json::parse(compliance_to_json(rep));
    out["fingerprint"] = fp;
    out["seed"] = args.seed;
    out["policy"] = to_string(kind);
    out["derived_b"] = base.b;
    out["horizon"] = T;
    write_file(args.out_dir + "/compliance.json", out.dump(2));
    write_file(args.out_dir + "/littles_residuals.csv",
               stamp_csv(residual_series_to_csv(ns, residuals), fp, args.seed));
    CommonArgs meta_args = args;
    write_meta(meta_args, fp);
    std::printf("littles: compliance report written to %s\n", args.out_dir.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"heavy-traffic control for the multiclass finite-buffer queue"};
    app.require_subcommand(1);

    CommonArgs solve_args, sim_args, mdp_args, littles_args;
    CLI::App* solve = app.add_subcommand("solve", "solve the workload free-boundary problem");
    add_common(solve, solve_args);
    CLI::App* simulate = app.add_subcommand("simulate", "simulate the n-th system");
    add_common(simulate, sim_args);
    simulate->add_option("--policy", sim_args.policy, "ao | fixed_priority");
    CLI::App* mdp = app.add_subcommand("mdp", "two-class MDP study");
    add_common(mdp, mdp_args);
    CLI::App* littles = app.add_subcommand("littles", "throughput-time compliance sweep");
    add_common(littles, littles_args);
    littles->add_flag("--adversarial", littles_args.adversarial,
                      "run the serve-first-only baseline instead");
    littles->add_option("--sign-k", littles_args.sign_k, "sign-test success threshold");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (solve->parsed()) return cmd_solve(solve_args);
        if (simulate->parsed()) return cmd_simulate(sim_args);
        if (mdp->parsed()) return cmd_mdp(mdp_args);
        if (littles->parsed()) return cmd_littles(littles_args);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const LoadNotCritical& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const NonPositiveParameter& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const InitialStateOutsideDomain& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const UnsupportedPrimitives& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 4;
    } catch (const Error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
    return 2;
}
