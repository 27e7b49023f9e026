#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "htqc/qsim.hpp"
#include "htqc/scenario.hpp"

namespace htqc {

// Exact finite-buffer MDP for the two-class system with Poisson arrivals and
// exponential services, solved by uniformized discounted value iteration.
// Costs are kept in diffusion-scaled units so values compare directly with
// the workload-problem value function.
struct MdpSpec {
    std::int64_t cap1 = 0, cap2 = 0;   // floor(b_i sqrt(n))
    double lambda_n1 = 0, lambda_n2 = 0;
    double mu_n1 = 0, mu_n2 = 0;
    double h1 = 0, h2 = 0;             // holding rates (per scaled customer)
    double r1 = 0, r2 = 0;             // rejection penalties (per scaled customer)
    double alpha = 1.0;
    double sqrt_n = 1.0;
    double uniformization() const { return lambda_n1 + lambda_n2 + mu_n1 + mu_n2; }

    std::size_t states() const {
        return static_cast<std::size_t>(cap1 + 1) * static_cast<std::size_t>(cap2 + 1);
    }
    std::size_t index(std::int64_t x1, std::int64_t x2) const {
        return static_cast<std::size_t>(x1) * static_cast<std::size_t>(cap2 + 1) +
               static_cast<std::size_t>(x2);
    }
};

// Requires exponential primitives; throws UnsupportedPrimitives otherwise.
MdpSpec make_mdp_spec(const ScenarioParams& params, const DerivedConstants& derived);

struct MdpSolution {
    std::vector<double> V;              // value per state
    std::vector<std::uint8_t> serve;    // 0 = idle, 1 or 2 = class served
    std::vector<std::uint8_t> admit1;   // admit flags at arrival epochs
    std::vector<std::uint8_t> admit2;
    int iterations = 0;
    double bellman_residual = 0.0;
};

MdpSolution value_iteration(const MdpSpec& spec, double tol = 1e-6, long max_iters = 2000000);

// Time-weighted occupancy histogram of the CTMC under the extracted policy.
std::vector<double> simulate_optimal(const MdpSpec& spec, const MdpSolution& sol, double T,
                                     std::uint64_t seed, std::int64_t x1_init = 0,
                                     std::int64_t x2_init = 0);

struct RatioPoint {
    double n = 0.0;
    double v_opt = 0.0;
    double j_policy = 0.0;
    double ratio = 0.0;
    double std_error = 0.0; // of the ratio
};

struct RatioOptions {
    int replications = 200;
    double horizon = 0.0; // 0 = default log(1e8)/alpha
    std::uint64_t seed = 1;
    double solver_tol = 1e-6;
    int bellman_grid = 2000; // grid for the workload solve that pins astar
};

// For each n: optimal value via value_iteration and the simulated cost of the
// threshold/priority policy, with the free boundary solved once at the
// scenario's diffusion parameters.
std::vector<RatioPoint> ratio_curve(const ScenarioParams& base, const std::vector<double>& n_list,
                                    const RatioOptions& opts = {});

std::string histogram_to_csv(const MdpSpec& spec, const std::vector<double>& hist);
std::string value_grid_to_csv(const MdpSpec& spec, const std::vector<double>& V);
std::string policy_grid_to_csv(const MdpSpec& spec, const MdpSolution& sol);
std::string ratio_curve_to_csv(const std::vector<RatioPoint>& pts);

} // namespace htqc
