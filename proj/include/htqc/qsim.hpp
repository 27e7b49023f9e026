#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "htqc/distributions.hpp"
#include "htqc/reduction.hpp"
#include "htqc/scenario.hpp"

namespace htqc {

enum class PolicyKind {
    AsymptoticOptimal, // threshold rejection + state-dependent priorities
    FixedPriority,     // full effort to the nonempty class with highest h*mu
    ServeFirstOnly     // adversarial baseline: only ever serves class 1
};

PolicyKind policy_kind_from_string(const std::string& name);
std::string to_string(PolicyKind kind);

// Everything the n-th system needs at event time, precomputed once.
struct SimInput {
    int num_classes = 0;
    double sqrt_n = 1.0;
    std::vector<double> lambda_n, mu_n;  // n-th system rates
    std::vector<double> theta_n;         // n / mu^n_i
    std::vector<double> rho;
    std::vector<double> h, r;            // cost parameters
    double alpha = 1.0;
    std::vector<std::int64_t> cap;       // floor(b_i sqrt(n)): hard buffer limits
    std::vector<std::int64_t> x_init;    // floor(x0_i sqrt(n))
    std::vector<UnitMeanDist> ia, st;
    // policy context
    PolicyKind kind = PolicyKind::AsymptoticOptimal;
    std::vector<double> a;               // b_i - epsilon
    std::vector<int> order;              // descending h*mu positions -> class
    int istar = 0;
    double astar = 0.0;                  // min(xstar, theta.a)
};

SimInput make_sim_input(const ScenarioParams& params, const DerivedConstants& derived,
                        const ReductionObjects& red, PolicyKind kind, double astar);

// Per-customer event log for the metrics module. Departure is NaN for
// customers still in the system at the horizon.
struct CustomerLog {
    std::vector<std::vector<double>> arrival;    // [class][k], admitted, FIFO
    std::vector<std::vector<double>> departure;  // [class][k]
    std::vector<std::vector<double>> rejected_at;     // [class][k]
    std::vector<std::vector<std::uint8_t>> rejected_forced;
};

struct SimRecord {
    // sampled diffusion-scaled trajectories
    std::vector<double> t;
    std::vector<std::vector<double>> xhat;     // [class][sample]
    std::vector<std::vector<double>> zhat;     // [class][sample]
    std::vector<std::vector<double>> yhat;     // [class][sample]
    std::vector<double> workload;              // theta^n . xhat
    // exact discounted-cost accumulators at the horizon
    double cost_direct = 0.0;       // int e^{-at}(h.xhat)dt + sum e^{-at} r dzhat
    double cost_integrated = 0.0;   // alpha IH-form + alpha^2 IZ-form
    double holding_cost = 0.0;
    double rejection_cost = 0.0;
    double ih_at_horizon = 0.0;     // int_0^T h.xhat dt
    double irz_at_horizon = 0.0;    // int_0^T r.zhat dt
    double rz_at_horizon = 0.0;     // r.zhat(T)
    double horizon = 0.0;
    // counters
    std::vector<std::int64_t> arrivals, departures, rejections, forced_rejections;
    CustomerLog customers;
    std::uint64_t seed = 0;
    std::uint64_t events = 0;
};

struct RunOptions {
    double horizon = 0.0;
    double sample_dt = 0.1;
    std::uint64_t seed = 1;
    std::uint64_t replication = 0;
    bool record_paths = true;
    bool record_customers = false;
    bool paranoid = true; // check state invariants at every event
};

// Event-driven execution of the n-th system under the configured policy.
// Throws HorizonNonPositive or SimInvariantViolation.
SimRecord run(const SimInput& input, const RunOptions& opts);

// Allocation rules, exposed for tests. xhat is the scaled queue-length vector.
std::vector<double> policy_ao_allocation(const SimInput& input,
                                         const std::vector<std::int64_t>& x);
bool policy_ao_reject(const SimInput& input, int cls, const std::vector<std::int64_t>& x);
std::vector<double> policy_fixed_priority_allocation(const SimInput& input,
                                                     const std::vector<std::int64_t>& x);

struct CostEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    int replications = 0;
    double horizon = 0.0;
    std::uint64_t seed = 0;
    double mean_integrated = 0.0;
    double mean_forced_rejections = 0.0;
};

struct CostOptions {
    int replications = 100;
    double horizon = 0.0;     // 0 = default log(1e8)/alpha
    std::uint64_t seed = 1;
    double bias_budget = 1e-5;
};

// Monte-Carlo mean of the truncated discounted cost over independent
// replications; the direct and integrated forms are cross-checked per path.
CostEstimate cost_estimate(const SimInput& input, const CostOptions& opts);

// State-space-collapse statistic sup_t |xhat(t) - gamma_a(workload(t))|_1
// over the sampled trajectory.
double ssc_deviation(const SimRecord& record, const ReductionObjects& red);

std::string trajectory_to_csv(const SimRecord& record);

} // namespace htqc
