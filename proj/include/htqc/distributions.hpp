#pragma once

#include <cmath>
#include <string>

#include "htqc/errors.hpp"
#include "htqc/rng.hpp"

namespace htqc {

// Unit-mean positive distributions with configurable squared coefficient of
// variation, used as renewal-process primitives. Mean and C2 are analytic
// properties of the chosen parameterization, not sampled estimates.
enum class DistKind { Exponential, Erlang, HyperExp2, Gamma, Lognormal, Uniform };

DistKind dist_kind_from_string(const std::string& name);
std::string to_string(DistKind kind);

class UnitMeanDist {
public:
    // Throws DomainError when c2 is incompatible with the kind:
    // exponential needs c2 == 1, erlang needs 1/c2 integral, uniform needs
    // c2 <= 1/3, hyperexp2 needs c2 >= 1.
    static UnitMeanDist make(DistKind kind, double c2);

    double sample(RngStream& rng) const;

    double mean() const { return 1.0; }
    double c2() const { return c2_; }
    DistKind kind() const { return kind_; }

private:
    UnitMeanDist(DistKind kind, double c2) : kind_(kind), c2_(c2) {}

    DistKind kind_;
    double c2_ = 1.0;
    // precomputed parameters, meaning depends on kind
    double p0_ = 0.0, p1_ = 0.0, p2_ = 0.0, p3_ = 0.0;
    int k_ = 1;
};

} // namespace htqc
