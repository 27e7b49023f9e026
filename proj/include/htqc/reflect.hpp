#pragma once

#include <cstdint>
#include <vector>

#include "htqc/reduction.hpp"
#include "htqc/scenario.hpp"

namespace htqc {

// Sampled real-valued time series on a uniform grid; piecewise constant
// between samples.
struct Path {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double time_at(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
};

// Output of the two-sided Skorohod map: phi = psi + eta1 - eta2, phi in [a,b],
// eta1/eta2 nondecreasing with eta_i(0-) = 0 (an initial jump is allowed).
struct ReflectionTriple {
    Path phi, eta1, eta2;
};

// Exact discrete recursion for piecewise-constant interpolants:
// phi_0 = clamp(psi_0), then phi_{k+1} = clamp(phi_k + dpsi_k), with the
// clamped overflow booked to eta2 and underflow to eta1.
ReflectionTriple skorohod_two_sided(const Path& psi, double a, double b);

struct RbmPaths {
    Path x, y, z; // constrained path and lower/upper boundary processes
};

// Euler-sampled (mbar, sigmabar)-BM passed through the Skorohod map on
// [0, upper]; an initial jump z(0) = (x0 - upper)^+ is booked per the
// reflected start convention.
RbmPaths rbm_simulate(double mbar, double sigmabar, double x0, double upper, double dt, double T,
                      std::uint64_t seed, std::uint64_t replication = 0);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    int replications = 0;
    double dt = 0.0;
    double t_trunc = 0.0;
    std::uint64_t seed = 0;
};

struct McOptions {
    double dt = 0.0;           // 0 = default 1e-4 / alpha
    double t_trunc = 0.0;      // 0 = default with exp(-alpha T) < 1e-8
    int replications = 10000;
    std::uint64_t seed = 1;
    double bias_budget = 1e-5; // throws BiasBudgetExceeded when the tail bound exceeds this
};

// Monte-Carlo mean of the discounted cost of the reflected control on
// [0, xstar] started from x0bar, computed in the integrated form
// alpha*int e^{-at} IH dt + alpha^2*rbar*int e^{-at} IZ dt, which avoids
// Stieltjes integration against the jumps of z.
McEstimate bcp_cost_mc(const DerivedConstants& derived, const ReductionObjects& red, double xstar,
                       double x0bar, const McOptions& opts = {});

std::string rbm_to_csv(const RbmPaths& paths);

} // namespace htqc
