#include "htqc/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "htqc/fbp.hpp"
#include "htqc/rng.hpp"

namespace htqc {

MdpSpec make_mdp_spec(const ScenarioParams& params, const DerivedConstants& derived) {
    if (params.num_classes != 2)
        throw UnsupportedPrimitives("the MDP oracle handles exactly two classes");
    for (int i = 0; i < 2; ++i) {
        if (params.ia_dist[i] != DistKind::Exponential || params.st_dist[i] != DistKind::Exponential)
            throw UnsupportedPrimitives("the MDP oracle requires exponential primitives");
    }
    MdpSpec spec;
    spec.cap1 = static_cast<std::int64_t>(std::floor(params.b[0] * derived.sqrt_n + 1e-9));
    spec.cap2 = static_cast<std::int64_t>(std::floor(params.b[1] * derived.sqrt_n + 1e-9));
    spec.lambda_n1 = derived.lambda_n[0];
    spec.lambda_n2 = derived.lambda_n[1];
    spec.mu_n1 = derived.mu_n[0];
    spec.mu_n2 = derived.mu_n[1];
    spec.h1 = params.h[0];
    spec.h2 = params.h[1];
    spec.r1 = params.r[0];
    spec.r2 = params.r[1];
    spec.alpha = params.alpha;
    spec.sqrt_n = derived.sqrt_n;
    if (!(spec.uniformization() > 0.0)) throw NonPositiveParameter("uniformization rate is zero");
    return spec;
}

namespace {

// One Bellman backup. Holding cost accrues continuously between uniformized
// epochs; admissions and the serve decision are per-transition actions.
void backup(const MdpSpec& s, const std::vector<double>& V, std::vector<double>& out,
            MdpSolution* policy) {
    const double Lam = s.uniformization();
    const double beta = Lam / (Lam + s.alpha);
    const double pl1 = s.lambda_n1 / Lam, pl2 = s.lambda_n2 / Lam;
    const double pm1 = s.mu_n1 / Lam, pm2 = s.mu_n2 / Lam;
    const double c1 = s.r1 / s.sqrt_n, c2 = s.r2 / s.sqrt_n;
    const std::int64_t B1 = s.cap1, B2 = s.cap2;

    for (std::int64_t x1 = 0; x1 <= B1; ++x1) {
        for (std::int64_t x2 = 0; x2 <= B2; ++x2) {
            const std::size_t idx = s.index(x1, x2);
            const double here = V[idx];
            const double g = (s.h1 * x1 + s.h2 * x2) / s.sqrt_n;

            const double a1 = (x1 < B1) ? std::min(V[s.index(x1 + 1, x2)], c1 + here)
                                        : c1 + here;
            const double a2 = (x2 < B2) ? std::min(V[s.index(x1, x2 + 1)], c2 + here)
                                        : c2 + here;

            const double idle = pm1 * here + pm2 * here;
            const double serve1 = (x1 > 0) ? pm1 * V[s.index(x1 - 1, x2)] + pm2 * here : idle;
            const double serve2 = (x2 > 0) ? pm1 * here + pm2 * V[s.index(x1, x2 - 1)] : idle;
            const double best_serve = std::min({serve1, serve2, idle});

            out[idx] = g / (Lam + s.alpha) + beta * (pl1 * a1 + pl2 * a2 + best_serve);

            if (policy) {
                std::uint8_t sv = 0;
                if (x1 > 0 && serve1 <= serve2 && serve1 <= idle) sv = 1;
                else if (x2 > 0 && serve2 <= idle) sv = 2;
                policy->serve[idx] = sv;
                policy->admit1[idx] =
                    (x1 < B1 && V[s.index(x1 + 1, x2)] <= c1 + here) ? 1 : 0;
                policy->admit2[idx] =
                    (x2 < B2 && V[s.index(x1, x2 + 1)] <= c2 + here) ? 1 : 0;
            }
        }
    }
}

} // namespace

MdpSolution value_iteration(const MdpSpec& spec, double tol, long max_iters) {
    const double Lam = spec.uniformization();
    const double beta = Lam / (Lam + spec.alpha);
    const double stop = tol * (1.0 - beta) / (2.0 * beta);

    MdpSolution sol;
    sol.V.assign(spec.states(), 0.0);
    std::vector<double> next(spec.states(), 0.0);
    long it = 0;
    double delta = 0.0;
    for (; it < max_iters; ++it) {
        backup(spec, sol.V, next, nullptr);
        delta = 0.0;
        for (std::size_t k = 0; k < next.size(); ++k)
            delta = std::max(delta, std::abs(next[k] - sol.V[k]));
        sol.V.swap(next);
        if (delta < stop) break;
    }
    if (delta >= stop) throw NoConvergence("value iteration did not converge");
    sol.iterations = static_cast<int>(it + 1);

    sol.serve.assign(spec.states(), 0);
    sol.admit1.assign(spec.states(), 0);
    sol.admit2.assign(spec.states(), 0);
    backup(spec, sol.V, next, &sol);
    double res = 0.0;
    for (std::size_t k = 0; k < next.size(); ++k) res = std::max(res, std::abs(next[k] - sol.V[k]));
    sol.bellman_residual = res;
    sol.V.swap(next);
    return sol;
}

std::vector<double> simulate_optimal(const MdpSpec& spec, const MdpSolution& sol, double T,
                                     std::uint64_t seed, std::int64_t x1_init,
                                     std::int64_t x2_init) {
    std::vector<double> hist(spec.states(), 0.0);
    RngStream rng(seed, {0x3d9ul});
    const double Lam = spec.uniformization();
    const double pl1 = spec.lambda_n1 / Lam, pl2 = spec.lambda_n2 / Lam, pm1 = spec.mu_n1 / Lam;

    std::int64_t x1 = std::min(x1_init, spec.cap1), x2 = std::min(x2_init, spec.cap2);
    double t = 0.0;
    while (t < T) {
        double dt = rng.exponential() / Lam;
        if (t + dt > T) dt = T - t;
        hist[spec.index(x1, x2)] += dt;
        t += dt;
        if (t >= T) break;
        const std::size_t idx = spec.index(x1, x2);
        const double u = rng.u01();
        if (u < pl1) {
            if (x1 < spec.cap1 && sol.admit1[idx]) ++x1;
        } else if (u < pl1 + pl2) {
            if (x2 < spec.cap2 && sol.admit2[idx]) ++x2;
        } else if (u < pl1 + pl2 + pm1) {
            if (sol.serve[idx] == 1 && x1 > 0) --x1;
        } else {
            if (sol.serve[idx] == 2 && x2 > 0) --x2;
        }
    }
    for (auto& v : hist) v /= T;
    return hist;
}

std::vector<RatioPoint> ratio_curve(const ScenarioParams& base, const std::vector<double>& n_list,
                                    const RatioOptions& opts) {
    // the free boundary depends only on the diffusion parameters, solve once
    ScenarioParams proto = base;
    const DerivedConstants derived0 = validate(proto);
    const ReductionObjects red0 = make_reduction(proto, derived0);
    SolveOptions sopts;
    sopts.grid_size = opts.bellman_grid;
    const BellmanSolution bell = solve_bellman(derived0, red0, sopts);
    const double astar = std::min(bell.xstar, red0.theta_dot_a);

    std::vector<RatioPoint> out;
    for (double n : n_list) {
        ScenarioParams p = base;
        p.n = n;
        const DerivedConstants derived = validate(p);
        const ReductionObjects red = make_reduction(p, derived);
        const MdpSpec spec = make_mdp_spec(p, derived);
        const MdpSolution sol = value_iteration(spec, opts.solver_tol);
        const std::int64_t x1 =
            std::min<std::int64_t>(spec.cap1, static_cast<std::int64_t>(
                                                  std::floor(p.x0[0] * derived.sqrt_n + 1e-9)));
        const std::int64_t x2 =
            std::min<std::int64_t>(spec.cap2, static_cast<std::int64_t>(
                                                  std::floor(p.x0[1] * derived.sqrt_n + 1e-9)));
        const double v_opt = sol.V[spec.index(x1, x2)];

        SimInput in = make_sim_input(p, derived, red, PolicyKind::AsymptoticOptimal, astar);
        CostOptions copts;
        copts.replications = opts.replications;
        copts.horizon = opts.horizon;
        copts.seed = opts.seed + static_cast<std::uint64_t>(n);
        if (opts.horizon > 0.0) // an explicit horizon overrides the bias guard
            copts.bias_budget = std::numeric_limits<double>::infinity();
        const CostEstimate est = cost_estimate(in, copts);

        RatioPoint pt;
        pt.n = n;
        pt.v_opt = v_opt;
        pt.j_policy = est.estimate;
        pt.ratio = est.estimate / v_opt;
        pt.std_error = est.std_error / v_opt;
        out.push_back(pt);
    }
    return out;
}

std::string histogram_to_csv(const MdpSpec& spec, const std::vector<double>& hist) {
    std::ostringstream os;
    char buf[64];
    for (std::int64_t x1 = 0; x1 <= spec.cap1; ++x1) {
        for (std::int64_t x2 = 0; x2 <= spec.cap2; ++x2) {
            std::snprintf(buf, sizeof(buf), "%s%.17g", x2 ? "," : "",
                          hist[spec.index(x1, x2)]);
            os << buf;
        }
        os << "\n";
    }
    return os.str();
}

std::string value_grid_to_csv(const MdpSpec& spec, const std::vector<double>& V) {
    return histogram_to_csv(spec, V);
}

std::string policy_grid_to_csv(const MdpSpec& spec, const MdpSolution& sol) {
    std::ostringstream os;
    for (std::int64_t x1 = 0; x1 <= spec.cap1; ++x1) {
        for (std::int64_t x2 = 0; x2 <= spec.cap2; ++x2) {
            const std::size_t idx = spec.index(x1, x2);
            // encode serve/admit1/admit2 as a compact triple
            os << (x2 ? "," : "") << static_cast<int>(sol.serve[idx])
               << static_cast<int>(sol.admit1[idx]) << static_cast<int>(sol.admit2[idx]);
        }
        os << "\n";
    }
    return os.str();
}

std::string ratio_curve_to_csv(const std::vector<RatioPoint>& pts) {
    std::ostringstream os;
    os << "n,ratio,std_error,v_opt,j_policy\n";
    char buf[200];
    for (const auto& p : pts) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", p.n, p.ratio,
                      p.std_error, p.v_opt, p.j_policy);
        os << buf;
    }
    return os.str();
}

} // namespace htqc
