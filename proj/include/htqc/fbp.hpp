#pragma once

#include <string>
#include <vector>

#include "htqc/reduction.hpp"
#include "htqc/scenario.hpp"

namespace htqc {

// Discrete solution of the workload Bellman variational inequality
//   min( 1/2 sigmabar2 f'' + mbar f' - alpha f + hbar,  f',  rbar - f' ) = 0
// on [0, xbar] with f'(0) = 0 and f'(xbar) = rbar.
struct BellmanSolution {
    std::vector<double> w;    // uniform grid on [0, xbar]
    std::vector<double> V;    // value
    std::vector<double> Vp;   // derivative (central differences, one-sided at the ends)
    double xstar = 0.0;       // free boundary estimate
    double residual_max = 0.0; // max |PDE bracket| over the contact-free region
    int iterations = 0;
    double tol = 0.0;
    double rbar = 0.0;
    double alpha = 0.0;
    std::string method = "psor";

    double dw() const { return w[1] - w[0]; }
};

struct SolveOptions {
    int grid_size = 2000;      // number of cells (grid has grid_size+1 nodes)
    double tol = 1e-10;        // PSOR sup-norm update tolerance
    long max_iters = 400000;   // PSOR sweep cap
    double omega = 0.0;        // over-relaxation factor; 0 = auto
};

// Projected SOR on the monotone upwind discretization. The gradient
// constraints enter as local obstacles: pushing up moves one cell right at
// zero cost, rejection moves one cell left at cost rbar*dw, so
//   f_k = min( PDE candidate, f_{k+1}, f_{k-1} + rbar*dw ).
// Throws NoConvergence or GridTooCoarse.
BellmanSolution solve_bellman(const DerivedConstants& derived, const ReductionObjects& red,
                              const SolveOptions& opts = {});

// Smallest grid point y with Vp >= rbar - boundary_tol on [y, xbar], refined
// by linear interpolation between the bracketing cells. Default boundary_tol
// is 5e-4 * rbar. Throws BoundaryNotFound.
double free_boundary(const BellmanSolution& sol, double boundary_tol = -1.0);

// Piecewise-linear interpolation of V; DomainError outside [0, xbar].
double value_at(const BellmanSolution& sol, double w);

// CSV export with columns w,V,Vp.
std::string bellman_to_csv(const BellmanSolution& sol);

} // namespace htqc
