#include "htqc/distributions.hpp"

#include <cmath>

namespace htqc {

DistKind dist_kind_from_string(const std::string& name) {
    if (name == "exponential") return DistKind::Exponential;
    if (name == "erlang") return DistKind::Erlang;
    if (name == "hyperexp2") return DistKind::HyperExp2;
    if (name == "gamma") return DistKind::Gamma;
    if (name == "lognormal") return DistKind::Lognormal;
    if (name == "uniform") return DistKind::Uniform;
    throw DomainError("unknown distribution kind: " + name);
}

std::string to_string(DistKind kind) {
    switch (kind) {
        case DistKind::Exponential: return "exponential";
        case DistKind::Erlang: return "erlang";
        case DistKind::HyperExp2: return "hyperexp2";
        case DistKind::Gamma: return "gamma";
        case DistKind::Lognormal: return "lognormal";
        case DistKind::Uniform: return "uniform";
    }
    return "?";
}

UnitMeanDist UnitMeanDist::make(DistKind kind, double c2) {
    if (!(c2 > 0.0) || !std::isfinite(c2))
        throw DomainError("distribution c2 must be in (0, inf)");
    UnitMeanDist d(kind, c2);
    switch (kind) {
        case DistKind::Exponential: {
            if (std::abs(c2 - 1.0) > 1e-9)
                throw DomainError("exponential requires c2 == 1");
            d.c2_ = 1.0;
            break;
        }
        case DistKind::Erlang: {
            // sum of k unit-rate exponentials scaled by 1/k; c2 = 1/k
            const double kf = 1.0 / c2;
            const int k = static_cast<int>(std::lround(kf));
            if (k < 1 || std::abs(kf - k) > 1e-9)
                throw DomainError("erlang requires 1/c2 to be a positive integer");
            d.k_ = k;
            d.c2_ = 1.0 / k;
            break;
        }
        case DistKind::HyperExp2: {
            // balanced-means two-phase mixture; requires c2 >= 1
            if (c2 < 1.0 - 1e-12) throw DomainError("hyperexp2 requires c2 >= 1");
            const double p = 0.5 * (1.0 + std::sqrt((c2 - 1.0) / (c2 + 1.0)));
            d.p0_ = p;            // branch probability
            d.p1_ = 2.0 * p;      // rate of branch 1
            d.p2_ = 2.0 * (1.0 - p); // rate of branch 2
            break;
        }
        case DistKind::Gamma: {
            d.p0_ = 1.0 / c2; // shape
            d.p1_ = c2;       // scale
            break;
        }
        case DistKind::Lognormal: {
            const double s2 = std::log1p(c2);
            d.p0_ = -0.5 * s2;      // mu of underlying normal
            d.p1_ = std::sqrt(s2);  // sigma of underlying normal
            break;
        }
        case DistKind::Uniform: {
            // on [1-w, 1+w], w = sqrt(3 c2); positivity needs c2 <= 1/3
            if (c2 > 1.0 / 3.0 + 1e-12)
                throw DomainError("uniform requires c2 <= 1/3");
            d.p0_ = std::sqrt(3.0 * c2);
            break;
        }
    }
    return d;
}

double UnitMeanDist::sample(RngStream& rng) const {
    switch (kind_) {
        case DistKind::Exponential:
            return rng.exponential();
        case DistKind::Erlang: {
            // -log of a product of k uniforms, scaled to mean 1
            double prod = 1.0;
            for (int i = 0; i < k_; ++i) prod *= rng.u01_pos();
            return -std::log(prod) / k_;
        }
        case DistKind::HyperExp2: {
            const double rate = (rng.u01() < p0_) ? p1_ : p2_;
            return rng.exponential() / rate;
        }
        case DistKind::Gamma:
            return rng.gamma(p0_, p1_);
        case DistKind::Lognormal:
            return std::exp(p0_ + p1_ * rng.normal());
        case DistKind::Uniform:
            return 1.0 - p0_ + 2.0 * p0_ * rng.u01();
    }
    return 1.0;
}

} // namespace htqc
