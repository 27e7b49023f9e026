#pragma once

#include <vector>

#include "htqc/scenario.hpp"

namespace htqc::testing {

// The three-class instance whose workload problem has a known free boundary
// near 1.47: rates rounded to table precision, so the critical-load check
// needs the relaxed tolerance.
inline ScenarioParams three_class_reference() {
    ScenarioParams p;
    p.num_classes = 3;
    p.lambda = {9.33, 7.67, 6.0};
    p.lambda_hat = {0.0, 0.0, 0.0};
    p.mu = {28.0, 23.0, 18.0};
    p.mu_hat = {0.0, 0.0, 0.0};
    p.c2_ia = {1.0, 1.0, 1.0};
    p.c2_st = {1.0, 1.0, 1.0};
    p.h = {32.9, 35.0, 39.0};
    p.r = {5.0, 4.0, 5.5};
    p.b = {15.0, 15.0, 10.0};
    p.alpha = 10.0;
    p.n = 400.0;
    p.epsilon = 1.0;
    p.x0 = {0.0, 0.0, 0.0};
    p.sigmabar2 = 0.1;
    p.load_tolerance = 1e-3;
    p.ia_dist.assign(3, DistKind::Exponential);
    p.st_dist.assign(3, DistKind::Exponential);
    return p;
}

// Two-class M/M/1 instance used by the simulator and MDP studies. The
// workload problem has a closed-form free boundary (see test_fbp).
inline ScenarioParams two_class_reference() {
    ScenarioParams p;
    p.num_classes = 2;
    p.lambda = {0.5, 0.5};
    p.lambda_hat = {0.0, 0.0};
    p.mu = {1.0, 1.0};
    p.mu_hat = {0.0, 0.0};
    p.c2_ia = {1.0, 1.0};
    p.c2_st = {1.0, 1.0};
    p.h = {3.0, 1.0};
    p.r = {6.0, 2.5};
    p.b = {5.0, 5.0};
    p.alpha = 1.0;
    p.n = 100.0;
    p.epsilon = 0.5;
    p.x0 = {0.0, 2.0};
    p.ia_dist.assign(2, DistKind::Exponential);
    p.st_dist.assign(2, DistKind::Exponential);
    return p;
}

// Closed-form free boundary of the two-class reference instance: with
// 1/2 sigmabar2 = 1, alpha = 1, mbar = 0, hbar slopes (1, 3) with knee at 5
// and rbar = 5/2, smooth fit gives e^{xstar} = 2S + sqrt(4S^2 - 1),
// S = 1 + e^5 + e^-5.
inline double two_class_xstar_closed_form() {
    const double S = 1.0 + std::exp(5.0) + std::exp(-5.0);
    return std::log(2.0 * S + std::sqrt(4.0 * S * S - 1.0));
}

} // namespace htqc::testing
