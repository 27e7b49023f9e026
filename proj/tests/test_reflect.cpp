#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "htqc/fbp.hpp"
#include "htqc/reflect.hpp"
#include "htqc/rng.hpp"

#include "helpers.hpp"
#include "oracles.hpp"

using namespace htqc;

namespace {

// Random path whose increments are exact multiples of 2^-16, so every step of
// the reflection recursion is exact in double precision.
Path dyadic_path(RngStream& rng, std::size_t len, double scale) {
    Path p{0.0, 0.01, std::vector<double>(len)};
    double v = std::floor(rng.normal() * scale * 65536.0) / 65536.0;
    for (std::size_t k = 0; k < len; ++k) {
        p.values[k] = v;
        v += std::floor(rng.normal() * scale * 65536.0) / 65536.0;
    }
    return p;
}

} // namespace

TEST_CASE("constant path inside the interval is untouched") {
    Path psi{0.0, 0.1, std::vector<double>(50, 0.7)};
    const auto t = skorohod_two_sided(psi, 0.0, 2.0);
    for (std::size_t k = 0; k < psi.size(); ++k) {
        CHECK(t.phi.values[k] == 0.7);
        CHECK(t.eta1.values[k] == 0.0);
        CHECK(t.eta2.values[k] == 0.0);
    }
}

TEST_CASE("steady downward drift from the lower edge is absorbed by eta1") {
    const std::size_t n = 101;
    Path psi{0.0, 0.01, std::vector<double>(n)};
    for (std::size_t k = 0; k < n; ++k) psi.values[k] = 1.0 - 0.01 * static_cast<double>(k);
    const auto t = skorohod_two_sided(psi, 1.0, 2.0);
    for (std::size_t k = 0; k < n; ++k) {
        CHECK(t.phi.values[k] == 1.0);
        CHECK(t.eta1.values[k] == doctest::Approx(0.01 * static_cast<double>(k)).epsilon(1e-12));
        CHECK(t.eta2.values[k] == 0.0);
    }
}

TEST_CASE("initial jump convention books the clamp into the boundary terms") {
    Path below{0.0, 1.0, {-3.0, -3.0}};
    auto t = skorohod_two_sided(below, 0.0, 1.0);
    CHECK(t.phi.values[0] == 0.0);
    CHECK(t.eta1.values[0] == 3.0);
    CHECK(t.eta2.values[0] == 0.0);

    Path above{0.0, 1.0, {4.5, 4.5}};
    t = skorohod_two_sided(above, 0.0, 1.0);
    CHECK(t.phi.values[0] == 1.0);
    CHECK(t.eta2.values[0] == 3.5);
}

TEST_CASE("guards: empty path and inverted interval") {
    Path empty{0.0, 0.1, {}};
    CHECK_THROWS_AS(skorohod_two_sided(empty, 0.0, 1.0), EmptyPath);
    Path ok{0.0, 0.1, {0.5}};
    CHECK_THROWS_AS(skorohod_two_sided(ok, 1.0, 1.0), InvalidInterval);
}

TEST_CASE("integer-increment walks match the exact integer oracle bit for bit") {
    RngStream rng(5, {21});
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t len = 2 + static_cast<std::size_t>(rng.u01() * 400);
        std::vector<std::int64_t> walk(len);
        std::int64_t v = static_cast<std::int64_t>(rng.u01() * 7.0) - 2;
        for (std::size_t k = 0; k < len; ++k) {
            walk[k] = v;
            v += (rng.u01() < 0.5) ? 1 : -1;
        }
        const auto oracle = testing::skorohod_int(walk, 0, 2);

        Path psi{0.0, 1.0, std::vector<double>(len)};
        for (std::size_t k = 0; k < len; ++k) psi.values[k] = static_cast<double>(walk[k]);
        const auto t = skorohod_two_sided(psi, 0.0, 2.0);
        for (std::size_t k = 0; k < len; ++k) {
            CHECK(t.phi.values[k] == static_cast<double>(oracle.phi[k]));
            CHECK(t.eta1.values[k] == static_cast<double>(oracle.eta1[k]));
            CHECK(t.eta2.values[k] == static_cast<double>(oracle.eta2[k]));
        }
    }
}

TEST_CASE("dyadic random paths: exact decomposition, containment, complementarity") {
    RngStream rng(5, {22});
    for (int rep = 0; rep < 300; ++rep) {
        const double a = 0.0, b = 2.0;
        const auto psi = dyadic_path(rng, 2 + static_cast<std::size_t>(rng.u01() * 300), 0.3);
        const auto t = skorohod_two_sided(psi, a, b);
        double prev1 = 0.0, prev2 = 0.0;
        for (std::size_t k = 0; k < psi.size(); ++k) {
            // decomposition holds exactly: all quantities are dyadic rationals
            CHECK(t.phi.values[k] == psi.values[k] + t.eta1.values[k] - t.eta2.values[k]);
            CHECK(t.phi.values[k] >= a);
            CHECK(t.phi.values[k] <= b);
            // boundary terms are nondecreasing and only move at the boundary
            CHECK(t.eta1.values[k] >= prev1);
            CHECK(t.eta2.values[k] >= prev2);
            if (t.eta1.values[k] > prev1) CHECK(t.phi.values[k] == a);
            if (t.eta2.values[k] > prev2) CHECK(t.phi.values[k] == b);
            prev1 = t.eta1.values[k];
            prev2 = t.eta2.values[k];
        }
    }
}

TEST_CASE("zero response: the zero path maps to (0,0,0)") {
    Path zero{0.0, 0.5, std::vector<double>(20, 0.0)};
    const auto t = skorohod_two_sided(zero, 0.0, 1.0);
    for (std::size_t k = 0; k < zero.size(); ++k) {
        CHECK(t.phi.values[k] == 0.0);
        CHECK(t.eta1.values[k] == 0.0);
        CHECK(t.eta2.values[k] == 0.0);
    }
}

TEST_CASE("empirical Lipschitz bound of the map on paired inputs") {
    RngStream rng(5, {23});
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t len = 200;
        Path psi1{0.0, 0.01, std::vector<double>(len)};
        Path psi2{0.0, 0.01, std::vector<double>(len)};
        double v = 0.5;
        for (std::size_t k = 0; k < len; ++k) {
            v += 0.2 * rng.normal();
            psi1.values[k] = v;
            psi2.values[k] = v + 0.05 * rng.normal();
        }
        const auto t1 = skorohod_two_sided(psi1, 0.0, 1.5);
        const auto t2 = skorohod_two_sided(psi2, 0.0, 1.5);
        double din = 0.0, dout = 0.0;
        for (std::size_t k = 0; k < len; ++k) {
            din = std::max(din, std::abs(psi1.values[k] - psi2.values[k]));
            const double d = std::abs(t1.phi.values[k] - t2.phi.values[k]) +
                             std::abs(t1.eta1.values[k] - t2.eta1.values[k]) +
                             std::abs(t1.eta2.values[k] - t2.eta2.values[k]);
            dout = std::max(dout, d);
        }
        worst = std::max(worst, dout / din);
    }
    // the two-sided map is uniformly Lipschitz; the classical constant for
    // phi alone is 2 and the boundary terms add at most twice that again
    CHECK(worst <= 6.0);
    MESSAGE("empirical Lipschitz ratio: ", worst);
}

TEST_CASE("noiseless drift: hits the lower boundary and pushes linearly") {
    const double mbar = -0.5, T = 4.0, dt = 1e-3, c = 1.0;
    const auto paths = rbm_simulate(mbar, 0.0, 0.5, c, dt, T, 42);
    const double t_hit = 0.5 / 0.5;
    for (std::size_t k = 0; k < paths.x.size(); ++k) {
        const double t = paths.x.time_at(k);
        if (t < t_hit - 1e-9) {
            CHECK(paths.x.values[k] == doctest::Approx(0.5 + mbar * t).epsilon(1e-9));
            CHECK(paths.y.values[k] == 0.0);
        } else {
            CHECK(paths.x.values[k] == doctest::Approx(0.0));
            CHECK(paths.y.values[k] == doctest::Approx(0.5 * (t - t_hit)).epsilon(1e-6));
        }
        CHECK(paths.z.values[k] == 0.0);
    }
}

TEST_CASE("start above the interval books the initial rejection jump") {
    const auto paths = rbm_simulate(0.0, 1.0, 1.4, 1.0, 1e-3, 0.5, 7);
    CHECK(paths.x.values[0] == 1.0);
    CHECK(paths.z.values[0] == doctest::Approx(0.4));
}

TEST_CASE("driftless long-run time average is the midpoint of the interval") {
    const double c = 2.0;
    double acc = 0.0;
    long count = 0;
    for (std::uint64_t rep = 0; rep < 8; ++rep) {
        const auto paths = rbm_simulate(0.0, 1.0, 1.0, c, 1e-3, 400.0, 11, rep);
        for (std::size_t k = paths.x.size() / 4; k < paths.x.size(); ++k) {
            acc += paths.x.values[k];
            ++count;
        }
    }
    CHECK(acc / static_cast<double>(count) == doctest::Approx(c / 2.0).epsilon(0.03));
}

TEST_CASE("bcp_cost_mc: zero holding leaves only the rejection charge") {
    ScenarioParams p = htqc::testing::two_class_reference();
    p.h = {1e-14, 1e-14};
    p.alpha = 2.0;
    const DerivedConstants d = validate(p);
    const ReductionObjects red = make_reduction(p, d);
    McOptions opts;
    opts.replications = 2000;
    opts.dt = 1e-3 / p.alpha;
    opts.seed = 5;
    const McEstimate est = bcp_cost_mc(d, red, red.xbar, 0.0, opts);
    // discounted upper-boundary pushes are rare from 0 on [0, xbar]: tiny cost
    CHECK(est.estimate >= 0.0);
    CHECK(est.estimate <= 0.05);

    // starting above the boundary pays the immediate rejection charge
    const McEstimate jump = bcp_cost_mc(d, red, 5.0, 5.5, opts);
    CHECK(jump.estimate >= red.rbar * 0.5);
}

TEST_CASE("refinement consistency under common random numbers") {
    ScenarioParams p = htqc::testing::two_class_reference();
    p.alpha = 2.0;
    const DerivedConstants d = validate(p);
    const ReductionObjects red = make_reduction(p, d);
    McOptions coarse, fine;
    coarse.replications = fine.replications = 3000;
    coarse.seed = fine.seed = 31;
    coarse.dt = 2e-3 / p.alpha;
    fine.dt = 1e-3 / p.alpha;
    const McEstimate e1 = bcp_cost_mc(d, red, 6.0, 0.0, coarse);
    const McEstimate e2 = bcp_cost_mc(d, red, 6.0, 0.0, fine);
    // same replication streams, so the difference is discretization only
    CHECK(std::abs(e1.estimate - e2.estimate) <=
          3.0 * (e1.std_error + e2.std_error) + 0.02 * std::abs(e2.estimate));
}

TEST_CASE("bcp_cost_mc enforces the bias budget") {
    ScenarioParams p = htqc::testing::two_class_reference();
    const DerivedConstants d = validate(p);
    const ReductionObjects red = make_reduction(p, d);
    McOptions opts;
    opts.replications = 10;
    opts.t_trunc = 0.5; // far too short for alpha = 1
    CHECK_THROWS_AS(bcp_cost_mc(d, red, 6.0, 0.0, opts), BiasBudgetExceeded);
}

TEST_CASE("trajectory CSV carries the four columns") {
    const auto paths = rbm_simulate(0.0, 1.0, 0.5, 1.0, 0.01, 0.2, 3);
    const std::string csv = rbm_to_csv(paths);
    CHECK(csv.substr(0, 8) == "t,X,Y,Z\n");
}
