#pragma once

#include <vector>

#include "htqc/scenario.hpp"

namespace htqc {

// Piecewise-linear convex function on [0, xmax] given by ascending knots and
// one slope per segment; value(knots[0]) = 0.
struct PiecewiseLinear {
    std::vector<double> knots;   // size k+1, knots.front() == 0
    std::vector<double> slopes;  // size k, ascending for a convex function
    std::vector<double> values;  // size k+1, values at the knots

    double operator()(double w) const;
};

// Workload-reduction objects for a rectangular buffer domain: the class
// ordering by h*mu, the rejection class, the minimal-cost rate function hbar
// and the minimizing curves gamma / gamma^a.
struct ReductionObjects {
    int num_classes = 0;
    std::vector<int> order;      // order[p] = class at priority position p (descending h*mu)
    std::vector<int> position;   // inverse permutation
    int istar = 0;               // class minimizing r_i mu_i (0-based)
    double rbar = 0.0;           // r_{istar} mu_{istar}
    double xbar = 0.0;           // theta . b
    std::vector<double> bhat;    // bhat[p] = sum_{q>p} theta_(q) b_(q), p = 0..I-1 (sorted coords)
    std::vector<double> ahat;    // same with a_i = b_i - epsilon
    double theta_dot_a = 0.0;
    double epsilon = 0.0;
    PiecewiseLinear hbar;        // on [0, xbar]
    double astar = 0.0;          // min(xstar, theta.a); filled after the Bellman solve

    // Minimizing curve: fills buffers in ascending h*mu order. DomainError
    // outside [0, xbar] (up to a relative 1e-12 slack).
    std::vector<double> gamma(double w) const;
    // Margin-shifted curve with capacities a_i = b_i - epsilon on [0, theta.a],
    // linear interpolation from (theta.a, a) to (theta.b, b) beyond.
    std::vector<double> gamma_a(double w) const;

private:
    std::vector<double> theta_;  // per class
    std::vector<double> b_;
    std::vector<double> a_;
    friend ReductionObjects make_reduction(const ScenarioParams&, const DerivedConstants&);
};

ReductionObjects make_reduction(const ScenarioParams& params, const DerivedConstants& derived);

// Stable descending sort of classes by h_i mu_i (ties keep original order).
std::vector<int> class_order(const ScenarioParams& params);

// argmin_i r_i mu_i with smallest-index tie-break; returns (istar, rbar).
std::pair<int, double> rejection_class(const ScenarioParams& params);

} // namespace htqc
