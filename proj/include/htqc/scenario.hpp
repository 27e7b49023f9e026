#pragma once

#include <optional>
#include <string>
#include <vector>

#include "htqc/distributions.hpp"
#include "htqc/errors.hpp"

namespace htqc {

inline constexpr const char* kScenarioSchema = "htqc-scenario-v1";

// All model constants for one problem instance. Class labels are 1-based in
// serialized artifacts and documentation; in-memory vectors are 0-based.
struct ScenarioParams {
    int num_classes = 0;                  // I
    std::vector<double> lambda;           // first-order arrival rates
    std::vector<double> lambda_hat;       // second-order arrival corrections
    std::vector<double> mu;               // first-order service rates
    std::vector<double> mu_hat;           // second-order corrections
    std::vector<double> c2_ia;            // squared coeff. of variation, interarrival
    std::vector<double> c2_st;            // squared coeff. of variation, service
    std::vector<double> h;                // holding cost rates
    std::vector<double> r;                // rejection penalties
    std::vector<double> b;                // scaled buffer sizes
    double alpha = 1.0;                   // discount rate
    double n = 100.0;                     // heavy-traffic scale index
    double epsilon = 0.0;                 // policy margin, in [0, min b)
    std::vector<double> x0;               // scaled initial state, in X
    std::optional<double> sigmabar2;      // optional override of the derived value
    double load_tolerance = 1e-9;         // |sum rho - 1| tolerance; >1e-9 marks relaxed
    std::optional<std::vector<double>> deadlines; // throughput-time deadlines d_i
    std::vector<DistKind> ia_dist;        // defaults to exponential
    std::vector<DistKind> st_dist;        // defaults to exponential

    bool relaxed_load_tolerance() const { return load_tolerance > 1e-9; }
};

struct DerivedConstants {
    double alpha = 0.0;            // discount rate, copied from the params
    std::vector<double> rho;       // lambda_i / mu_i
    std::vector<double> theta;     // 1 / mu_i
    std::vector<double> theta_n;   // 1 / (mu^n_i / n); converges to theta
    std::vector<double> m;         // lambda_hat_i - rho_i mu_hat_i
    std::vector<double> sigma2;    // lambda_i (c2_ia_i + c2_st_i)
    double mbar = 0.0;             // theta . m
    double sigmabar2 = 0.0;        // sum theta_i^2 sigma2_i, or the override
    double xbar = 0.0;             // theta . b
    std::vector<double> lambda_n;  // n lambda_i + sqrt(n) lambda_hat_i
    std::vector<double> mu_n;      // n mu_i + sqrt(n) mu_hat_i
    double sqrt_n = 0.0;
};

// Checks every ScenarioParams invariant and computes the derived constants.
// Throws LoadNotCritical, NonPositiveParameter or InitialStateOutsideDomain.
DerivedConstants validate(const ScenarioParams& params);

// JSON round trip. Parsing rejects unknown keys and requires the schema field.
ScenarioParams scenario_from_json_text(const std::string& text);
ScenarioParams load_scenario(const std::string& path);
std::string scenario_to_json_text(const ScenarioParams& params);

} // namespace htqc
