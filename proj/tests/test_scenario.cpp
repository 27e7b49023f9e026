#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "htqc/reduction.hpp"
#include "htqc/rng.hpp"
#include "htqc/scenario.hpp"

#include "helpers.hpp"
#include "oracles.hpp"

using namespace htqc;
using htqc::testing::three_class_reference;
using htqc::testing::two_class_reference;

TEST_CASE("validate accepts the rounded three-class table under the relaxed tolerance") {
    ScenarioParams p = three_class_reference();
    REQUIRE(p.relaxed_load_tolerance());
    const DerivedConstants d = validate(p);
    CHECK(d.rho[0] == doctest::Approx(9.33 / 28.0).epsilon(1e-12));
    CHECK(d.rho[1] == doctest::Approx(7.67 / 23.0).epsilon(1e-12));
    CHECK(d.rho[2] == doctest::Approx(6.0 / 18.0).epsilon(1e-12));
    CHECK(d.xbar == doctest::Approx(15.0 / 28 + 15.0 / 23 + 10.0 / 18).epsilon(1e-14));
    CHECK(d.sigmabar2 == 0.1); // override wins over the derived value
    CHECK(d.mbar == 0.0);

    // same instance fails under the strict default tolerance
    p.load_tolerance = 1e-9;
    CHECK_THROWS_AS(validate(p), LoadNotCritical);
}

TEST_CASE("validate: single class at exact critical load") {
    ScenarioParams p;
    p.num_classes = 1;
    p.lambda = {1.0};
    p.lambda_hat = {0.0};
    p.mu = {1.0};
    p.mu_hat = {0.0};
    p.c2_ia = {1.0};
    p.c2_st = {1.0};
    p.h = {1.0};
    p.r = {1.0};
    p.b = {2.0};
    p.alpha = 1.0;
    p.n = 25.0;
    p.x0 = {0.0};
    p.ia_dist = {DistKind::Exponential};
    p.st_dist = {DistKind::Exponential};
    const DerivedConstants d = validate(p);
    CHECK(d.rho[0] == 1.0);
}

TEST_CASE("validate rejects overload and bad parameters") {
    ScenarioParams p = two_class_reference();
    p.lambda = {1.0, 1.0};
    p.mu = {1.0, 1.0};
    CHECK_THROWS_AS(validate(p), LoadNotCritical);

    p = two_class_reference();
    p.h[0] = -1.0;
    CHECK_THROWS_AS(validate(p), NonPositiveParameter);

    p = two_class_reference();
    p.x0 = {0.0, 7.5}; // above b_2
    CHECK_THROWS_AS(validate(p), InitialStateOutsideDomain);

    p = two_class_reference();
    p.epsilon = 5.0; // == min b
    CHECK_THROWS_AS(validate(p), NonPositiveParameter);
}

TEST_CASE("class_order sorts by h*mu descending with stable ties") {
    ScenarioParams p = three_class_reference();
    CHECK(class_order(p) == std::vector<int>{0, 1, 2}); // 921.2 > 805 > 702

    // all equal -> identity
    p.h = {1.0, 1.0, 1.0};
    p.mu = {2.0, 2.0, 2.0};
    CHECK(class_order(p) == std::vector<int>{0, 1, 2});

    // h*mu = (702, 921.2, 805) -> classes 2,3,1 in table labels
    p = three_class_reference();
    p.h = {702.0 / 28.0, 921.2 / 23.0, 805.0 / 18.0};
    CHECK(class_order(p) == std::vector<int>{1, 2, 0});
}

TEST_CASE("rejection_class picks min r*mu with smallest-index ties") {
    ScenarioParams p = three_class_reference();
    auto [istar, rbar] = rejection_class(p);
    CHECK(istar == 1); // class 2 in table labels
    CHECK(rbar == doctest::Approx(92.0).epsilon(1e-12));

    p.r = {5.0 / 28.0, 5.0 / 23.0, 7.0 / 18.0};
    p.mu = {28.0, 23.0, 18.0};
    auto [i2, r2] = rejection_class(p);
    CHECK(i2 == 0);
    CHECK(r2 == doctest::Approx(5.0));

    ScenarioParams q = two_class_reference();
    q.num_classes = 1;
    q.lambda = {1.0};
    q.lambda_hat = {0.0};
    q.mu = {2.0};
    q.mu_hat = {0.0};
    q.c2_ia = {1.0};
    q.c2_st = {1.0};
    q.h = {1.0};
    q.r = {3.0};
    q.b = {1.0};
    q.x0 = {0.0};
    q.ia_dist = {DistKind::Exponential};
    q.st_dist = {DistKind::Exponential};
    auto [i1, r1] = rejection_class(q);
    CHECK(i1 == 0);
    CHECK(r1 == doctest::Approx(6.0));
}

TEST_CASE("rejection_class is invariant under positive scaling of r") {
    RngStream rng(7, {1});
    for (int rep = 0; rep < 50; ++rep) {
        ScenarioParams p = three_class_reference();
        for (int i = 0; i < 3; ++i) p.r[i] = 0.1 + 5.0 * rng.u01();
        const int before = rejection_class(p).first;
        const double c = 0.01 + 100.0 * rng.u01();
        for (int i = 0; i < 3; ++i) p.r[i] *= c;
        CHECK(rejection_class(p).first == before);
    }
}

TEST_CASE("hbar matches the closed form of the three-class instance") {
    ScenarioParams p = three_class_reference();
    const DerivedConstants d = validate(p);
    const ReductionObjects red = make_reduction(p, d);

    CHECK(red.hbar(0.3) == doctest::Approx(210.6).epsilon(1e-12));
    CHECK(red.hbar(0.0) == 0.0);
    // second branch with the exact knee 10/18: 702*(10/18) = 390
    const double expected = 390.0 + 805.0 * (1.0 - 10.0 / 18.0);
    CHECK(red.hbar(1.0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK_THROWS_AS(red.hbar(red.xbar + 0.1), DomainError);
    CHECK_THROWS_AS(red.hbar(-0.1), DomainError);
}

TEST_CASE("hbar equals the brute-force LP oracle on random rectangles") {
    RngStream rng(11, {2});
    for (int rep = 0; rep < 60; ++rep) {
        const int I = 1 + static_cast<int>(rng.u01() * 5.0);
        ScenarioParams p;
        p.num_classes = I;
        p.lambda_hat.assign(I, 0.0);
        p.mu_hat.assign(I, 0.0);
        p.c2_ia.assign(I, 1.0);
        p.c2_st.assign(I, 1.0);
        p.alpha = 1.0;
        p.n = 25.0;
        p.x0.assign(I, 0.0);
        p.ia_dist.assign(I, DistKind::Exponential);
        p.st_dist.assign(I, DistKind::Exponential);
        std::vector<double> rho(I);
        double sum = 0.0;
        for (int i = 0; i < I; ++i) {
            rho[i] = 0.2 + rng.u01();
            sum += rho[i];
        }
        for (int i = 0; i < I; ++i) {
            p.mu.push_back(0.5 + 2.5 * rng.u01());
            p.lambda.push_back(rho[i] / sum * p.mu[i]);
            p.h.push_back(0.2 + 3.0 * rng.u01());
            p.r.push_back(0.2 + 3.0 * rng.u01());
            p.b.push_back(0.5 + 4.0 * rng.u01());
        }
        const DerivedConstants d = validate(p);
        const ReductionObjects red = make_reduction(p, d);
        for (int k = 0; k < 25; ++k) {
            const double w = rng.u01() * red.xbar;
            const double oracle = testing::min_cost_at_workload(p.h, d.theta, p.b, w);
            CHECK(red.hbar(w) == doctest::Approx(oracle).epsilon(1e-8));
        }
    }
}

TEST_CASE("gamma reproduces the three-class breakpoints and third branch") {
    ScenarioParams p = three_class_reference();
    const DerivedConstants d = validate(p);
    const ReductionObjects red = make_reduction(p, d);

    const double knee2 = 10.0 / 18.0;              // theta_3 b_3
    const double knee1 = 10.0 / 18.0 + 15.0 / 23.0; // + theta_2 b_2
    auto g = red.gamma(knee2);
    CHECK(g[0] == doctest::Approx(0.0));
    CHECK(g[1] == doctest::Approx(0.0));
    CHECK(g[2] == doctest::Approx(10.0).epsilon(1e-12));

    g = red.gamma(knee1);
    CHECK(g[0] == doctest::Approx(0.0));
    CHECK(g[1] == doctest::Approx(15.0).epsilon(1e-12));
    CHECK(g[2] == doctest::Approx(10.0).epsilon(1e-12));

    g = red.gamma(0.0);
    CHECK(g == std::vector<double>{0.0, 0.0, 0.0});

    // third branch at w = 1.47 with exact knees
    g = red.gamma(1.47);
    CHECK(g[0] == doctest::Approx(28.0 * (1.47 - knee1)).epsilon(1e-12));
    CHECK(g[1] == doctest::Approx(15.0));
    CHECK(g[2] == doctest::Approx(10.0));

    CHECK_THROWS_AS(red.gamma(red.xbar + 1e-3), DomainError);
}

TEST_CASE("gamma properties: workload identity, monotonicity, endpoint") {
    ScenarioParams p = three_class_reference();
    const DerivedConstants d = validate(p);
    const ReductionObjects red = make_reduction(p, d);

    RngStream rng(3, {4});
    std::vector<double> prev(3, 0.0);
    for (int k = 0; k <= 400; ++k) {
        const double w = red.xbar * k / 400.0;
        const auto g = red.gamma(w);
        const auto ga = red.gamma_a(w);
        double back = 0.0, back_a = 0.0;
        for (int i = 0; i < 3; ++i) {
            back += d.theta[i] * g[i];
            back_a += d.theta[i] * ga[i];
            CHECK(g[i] >= prev[i] - 1e-12); // componentwise monotone in w
            CHECK(g[i] >= -1e-15);
            CHECK(g[i] <= p.b[i] + 1e-12);
            CHECK(ga[i] >= -1e-15);
            CHECK(ga[i] <= p.b[i] + 1e-12);
        }
        CHECK(back == doctest::Approx(w).epsilon(1e-12));
        CHECK(back_a == doctest::Approx(w).epsilon(1e-12));
        prev = g;
    }
    const auto gend = red.gamma(red.xbar);
    for (int i = 0; i < 3; ++i) CHECK(gend[i] == doctest::Approx(p.b[i]).epsilon(1e-12));
}

TEST_CASE("gamma_a converges to gamma uniformly as epsilon -> 0") {
    RngStream rng(19, {5});
    for (int rep = 0; rep < 20; ++rep) {
        const int I = 2 + static_cast<int>(rng.u01() * 3.0);
        ScenarioParams p;
        p.num_classes = I;
        p.lambda_hat.assign(I, 0.0);
        p.mu_hat.assign(I, 0.0);
        p.c2_ia.assign(I, 1.0);
        p.c2_st.assign(I, 1.0);
        p.alpha = 1.0;
        p.n = 25.0;
        p.x0.assign(I, 0.0);
        p.ia_dist.assign(I, DistKind::Exponential);
        p.st_dist.assign(I, DistKind::Exponential);
        std::vector<double> rho(I);
        double sum = 0.0;
        for (int i = 0; i < I; ++i) {
            rho[i] = 0.2 + rng.u01();
            sum += rho[i];
        }
        double min_b = 1e9, sum_theta = 0.0, mu_max = 0.0;
        for (int i = 0; i < I; ++i) {
            p.mu.push_back(0.5 + 2.5 * rng.u01());
            p.lambda.push_back(rho[i] / sum * p.mu[i]);
            p.h.push_back(0.2 + 3.0 * rng.u01());
            p.r.push_back(0.2 + 3.0 * rng.u01());
            p.b.push_back(1.0 + 4.0 * rng.u01());
            min_b = std::min(min_b, p.b.back());
            sum_theta += 1.0 / p.mu[i];
            mu_max = std::max(mu_max, p.mu[i]);
        }
        const double K = 4.0 * I * (1.0 + sum_theta * mu_max);
        for (double frac : {0.4, 0.2, 0.1, 0.05}) {
            p.epsilon = frac * min_b;
            const DerivedConstants d = validate(p);
            const ReductionObjects red = make_reduction(p, d);
            double sup = 0.0;
            for (int k = 0; k <= 300; ++k) {
                const double w = red.xbar * k / 300.0;
                const auto g = red.gamma(w);
                const auto ga = red.gamma_a(w);
                double l1 = 0.0;
                for (int i = 0; i < I; ++i) l1 += std::abs(g[i] - ga[i]);
                sup = std::max(sup, l1);
            }
            CHECK(sup <= K * p.epsilon);
        }
    }
}

TEST_CASE("scenario JSON round trip, schema and unknown keys") {
    ScenarioParams p = three_class_reference();
    const std::string text = scenario_to_json_text(p);
    const ScenarioParams q = scenario_from_json_text(text);
    CHECK(q.num_classes == p.num_classes);
    CHECK(q.lambda == p.lambda);
    CHECK(q.b == p.b);
    CHECK(q.sigmabar2.value() == p.sigmabar2.value());
    CHECK(q.load_tolerance == p.load_tolerance);

    CHECK_THROWS_AS(scenario_from_json_text("{\"I\": 1}"), ConfigError); // no schema
    std::string bad = text;
    bad.insert(bad.size() - 2, ",\"lambda_typo\": [1,2,3]\n");
    CHECK_THROWS_AS(scenario_from_json_text(bad), ConfigError);
}

TEST_CASE("unit-mean distributions: analytic constraints and sampled moments") {
    CHECK_THROWS_AS(UnitMeanDist::make(DistKind::Erlang, 0.4), DomainError);
    CHECK_THROWS_AS(UnitMeanDist::make(DistKind::Uniform, 0.5), DomainError);
    CHECK_THROWS_AS(UnitMeanDist::make(DistKind::HyperExp2, 0.5), DomainError);
    CHECK_THROWS_AS(UnitMeanDist::make(DistKind::Exponential, 2.0), DomainError);

    const struct {
        DistKind kind;
        double c2;
    } cases[] = {
        {DistKind::Exponential, 1.0}, {DistKind::Erlang, 0.25},  {DistKind::HyperExp2, 2.5},
        {DistKind::Gamma, 0.7},       {DistKind::Lognormal, 1.8}, {DistKind::Uniform, 0.2},
    };
    for (const auto& c : cases) {
        const UnitMeanDist dist = UnitMeanDist::make(c.kind, c.c2);
        CHECK(dist.mean() == 1.0);
        CHECK(dist.c2() == doctest::Approx(c.c2).epsilon(1e-9));
        RngStream rng(101, {static_cast<std::uint64_t>(c.kind)});
        const int N = 200000;
        double s1 = 0.0, s2 = 0.0;
        for (int k = 0; k < N; ++k) {
            const double v = dist.sample(rng);
            REQUIRE(v > 0.0);
            s1 += v;
            s2 += v * v;
        }
        const double mean = s1 / N;
        const double var = s2 / N - mean * mean;
        // 5 sigma Monte-Carlo tolerance
        CHECK(mean == doctest::Approx(1.0).epsilon(5.0 * std::sqrt((c.c2 + 0.05) / N) + 1e-3));
        CHECK(var / (mean * mean) == doctest::Approx(c.c2).epsilon(0.1));
    }
}
