#include "htqc/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace htqc {

namespace {

// Relative slack for domain checks on float-typed workload arguments.
double domain_slack(double xmax) { return 1e-12 * (1.0 + xmax); }

} // namespace

double PiecewiseLinear::operator()(double w) const {
    const double xmax = knots.back();
    if (w < -domain_slack(xmax) || w > xmax + domain_slack(xmax))
        throw DomainError("argument outside [0, xbar]");
    w = std::clamp(w, 0.0, xmax);
    // small knot counts; linear scan
    std::size_t s = 0;
    while (s + 1 < slopes.size() && w > knots[s + 1]) ++s;
    return values[s] + slopes[s] * (w - knots[s]);
}

std::vector<int> class_order(const ScenarioParams& params) {
    std::vector<int> order(params.num_classes);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        return params.h[i] * params.mu[i] > params.h[j] * params.mu[j];
    });
    return order;
}

std::pair<int, double> rejection_class(const ScenarioParams& params) {
    int istar = 0;
    double best = params.r[0] * params.mu[0];
    for (int i = 1; i < params.num_classes; ++i) {
        const double v = params.r[i] * params.mu[i];
        if (v < best) {
            best = v;
            istar = i;
        }
    }
    return {istar, best};
}

ReductionObjects make_reduction(const ScenarioParams& params, const DerivedConstants& derived) {
    const int I = params.num_classes;
    ReductionObjects red;
    red.num_classes = I;
    red.order = class_order(params);
    red.position.resize(I);
    for (int p = 0; p < I; ++p) red.position[red.order[p]] = p;
    auto [istar, rbar] = rejection_class(params);
    red.istar = istar;
    red.rbar = rbar;
    red.xbar = derived.xbar;
    red.epsilon = params.epsilon;
    red.theta_ = derived.theta;
    red.b_ = params.b;
    red.a_.resize(I);
    for (int i = 0; i < I; ++i) red.a_[i] = params.b[i] - params.epsilon;

    // Tail sums over sorted positions: bhat[p] = sum_{q>p} theta_(q) b_(q).
    red.bhat.assign(I, 0.0);
    red.ahat.assign(I, 0.0);
    for (int p = I - 2; p >= 0; --p) {
        const int cls = red.order[p + 1];
        red.bhat[p] = red.bhat[p + 1] + derived.theta[cls] * params.b[cls];
        red.ahat[p] = red.ahat[p + 1] + derived.theta[cls] * red.a_[cls];
    }
    red.theta_dot_a = 0.0;
    for (int i = 0; i < I; ++i) red.theta_dot_a += derived.theta[i] * red.a_[i];

    // hbar: fills classes from the cheapest h*mu upward, so the segment
    // starting at 0 has the smallest slope.
    red.hbar.knots.resize(I + 1);
    red.hbar.slopes.resize(I);
    red.hbar.values.resize(I + 1);
    red.hbar.knots[0] = 0.0;
    red.hbar.values[0] = 0.0;
    for (int s = 0; s < I; ++s) {
        const int p = I - 1 - s; // sorted position filled on segment s
        const int cls = red.order[p];
        red.hbar.knots[s + 1] = (p == 0) ? red.xbar : red.bhat[p - 1];
        red.hbar.slopes[s] = params.h[cls] * params.mu[cls];
        red.hbar.values[s + 1] =
            red.hbar.values[s] + red.hbar.slopes[s] * (red.hbar.knots[s + 1] - red.hbar.knots[s]);
    }
    red.astar = std::numeric_limits<double>::quiet_NaN();
    return red;
}

namespace {

std::vector<double> fill_curve(double w, const std::vector<int>& order,
                               const std::vector<double>& theta, const std::vector<double>& caps,
                               const std::vector<double>& tails) {
    const int I = static_cast<int>(order.size());
    // first sorted position p with tails[p] <= w (tails is decreasing in p)
    int p = 0;
    while (p < I - 1 && tails[p] > w) ++p;
    std::vector<double> x(I, 0.0);
    for (int q = p + 1; q < I; ++q) x[order[q]] = caps[order[q]];
    x[order[p]] = (w - tails[p]) / theta[order[p]];
    return x;
}

} // namespace

std::vector<double> ReductionObjects::gamma(double w) const {
    if (w < -domain_slack(xbar) || w > xbar + domain_slack(xbar))
        throw DomainError("gamma: workload outside [0, xbar]");
    w = std::clamp(w, 0.0, xbar);
    return fill_curve(w, order, theta_, b_, bhat);
}

std::vector<double> ReductionObjects::gamma_a(double w) const {
    if (w < -domain_slack(xbar) || w > xbar + domain_slack(xbar))
        throw DomainError("gamma_a: workload outside [0, xbar]");
    w = std::clamp(w, 0.0, xbar);
    if (epsilon == 0.0) return fill_curve(w, order, theta_, b_, bhat);
    if (w <= theta_dot_a) return fill_curve(w, order, theta_, a_, ahat);
    // linear interpolation (theta.a, a) -> (theta.b, b)
    const double t = (w - theta_dot_a) / (xbar - theta_dot_a);
    std::vector<double> x(num_classes);
    for (int i = 0; i < num_classes; ++i) x[i] = a_[i] + t * (b_[i] - a_[i]);
    return x;
}

} // namespace htqc
