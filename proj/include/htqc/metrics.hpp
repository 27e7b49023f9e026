#pragma once

#include <string>
#include <vector>

#include "htqc/qsim.hpp"

namespace htqc {

// Per-class throughput-time step function evaluated on the record's sampling
// grid. For sample time t the value is DT - AT of the first class-i customer
// admitted strictly after t. Samples with no later admission are flagged
// NoLaterAdmission and excluded from sup statistics; samples whose customer
// has not departed by the horizon carry the clipped value T - AT (a lower
// bound) and are flagged ClippedDeparture.
enum class ThroughputFlag : std::uint8_t { Valid = 0, ClippedDeparture = 1, NoLaterAdmission = 2 };

struct ThroughputSeries {
    std::vector<double> t;                       // sampling grid
    std::vector<std::vector<double>> theta;      // [class][sample], unscaled
    std::vector<std::vector<double>> theta_hat;  // sqrt(n) * theta
    std::vector<std::vector<ThroughputFlag>> flag;
};

// Throws NoAdmissions for a class with no admitted customer in [0, T].
ThroughputSeries throughput_times(const CustomerLog& log, const std::vector<double>& grid,
                                  double horizon, double sqrt_n);

// sup_t |xhat_i(t) - lambda_i * theta_hat_i(t)| over valid samples.
std::vector<double> littles_residual(const SimRecord& record, const ThroughputSeries& series,
                                     const std::vector<double>& lambda);

struct CompliancePoint {
    double n = 0.0;
    double statistic = 0.0; // max_i sup_t (theta_hat_i - d_i)^+, averaged over seeds
    std::vector<double> per_seed;
};

enum class TrendVerdict { Decreasing, NotDecreasing, InsufficientSeries };

struct ComplianceReport {
    std::vector<CompliancePoint> points; // ascending n
    TrendVerdict verdict = TrendVerdict::InsufficientSeries;
    std::vector<double> deadlines;
    int sign_successes = 0; // worst pair count across consecutive n
    int sign_trials = 0;
};

// Compliance statistic per record: max_i sup_t (theta_hat_i(t) - d_i)^+ with
// clipped-departure samples included (they lower-bound the true value).
double compliance_statistic(const ThroughputSeries& series, const std::vector<double>& deadlines);

// Seed-paired trend test: statistic at 4n below statistic at n in at least
// sign_k of the paired runs, for every consecutive pair in the n-series.
// Pairs that are exactly zero on both sides count as successes.
ComplianceReport compliance_check(const std::vector<double>& n_series,
                                  const std::vector<std::vector<double>>& per_seed_stats,
                                  const std::vector<double>& deadlines, int sign_k);

std::string compliance_to_json(const ComplianceReport& report);
std::string residual_series_to_csv(const std::vector<double>& n_series,
                                   const std::vector<std::vector<double>>& per_seed_residuals);

} // namespace htqc
