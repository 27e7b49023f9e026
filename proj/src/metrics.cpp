#include "htqc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace htqc {

ThroughputSeries throughput_times(const CustomerLog& log, const std::vector<double>& grid,
                                  double horizon, double sqrt_n) {
    const int I = static_cast<int>(log.arrival.size());
    ThroughputSeries out;
    out.t = grid;
    out.theta.assign(I, std::vector<double>(grid.size(), 0.0));
    out.theta_hat.assign(I, std::vector<double>(grid.size(), 0.0));
    out.flag.assign(I, std::vector<ThroughputFlag>(grid.size(), ThroughputFlag::Valid));

    for (int i = 0; i < I; ++i) {
        const auto& at = log.arrival[i];
        const auto& dt = log.departure[i];
        if (at.empty()) throw NoAdmissions("no admitted customers for a class");
        for (std::size_t k = 0; k < grid.size(); ++k) {
            // first admission strictly after grid[k]; arrivals are sorted
            const auto it = std::upper_bound(at.begin(), at.end(), grid[k]);
            if (it == at.end()) {
                out.theta[i][k] = 0.0;
                out.flag[i][k] = ThroughputFlag::NoLaterAdmission;
                continue;
            }
            const std::size_t c = static_cast<std::size_t>(it - at.begin());
            double depart = dt[c];
            if (std::isnan(depart)) {
                depart = horizon; // still in system: clipped lower bound
                out.flag[i][k] = ThroughputFlag::ClippedDeparture;
            }
            out.theta[i][k] = depart - at[c];
            out.theta_hat[i][k] = sqrt_n * out.theta[i][k];
        }
    }
    return out;
}

std::vector<double> littles_residual(const SimRecord& record, const ThroughputSeries& series,
                                     const std::vector<double>& lambda) {
    const int I = static_cast<int>(series.theta.size());
    std::vector<double> out(I, 0.0);
    for (int i = 0; i < I; ++i) {
        double sup = 0.0;
        for (std::size_t k = 0; k < series.t.size(); ++k) {
            if (series.flag[i][k] != ThroughputFlag::Valid) continue;
            const double res = std::abs(record.xhat[i][k] - lambda[i] * series.theta_hat[i][k]);
            sup = std::max(sup, res);
        }
        out[i] = sup;
    }
    return out;
}

double compliance_statistic(const ThroughputSeries& series, const std::vector<double>& deadlines) {
    double worst = 0.0;
    const int I = static_cast<int>(series.theta.size());
    for (int i = 0; i < I; ++i) {
        for (std::size_t k = 0; k < series.t.size(); ++k) {
            if (series.flag[i][k] == ThroughputFlag::NoLaterAdmission) continue;
            worst = std::max(worst, series.theta_hat[i][k] - deadlines[i]);
        }
    }
    return std::max(worst, 0.0);
}

ComplianceReport compliance_check(const std::vector<double>& n_series,
                                  const std::vector<std::vector<double>>& per_seed_stats,
                                  const std::vector<double>& deadlines, int sign_k) {
    if (n_series.size() != per_seed_stats.size())
        throw MismatchedScenarios("n series and statistics disagree in length");
    ComplianceReport rep;
    rep.deadlines = deadlines;
    for (std::size_t j = 0; j < n_series.size(); ++j) {
        CompliancePoint pt;
        pt.n = n_series[j];
        pt.per_seed = per_seed_stats[j];
        double mean = 0.0;
        for (double v : pt.per_seed) mean += v;
        pt.statistic = pt.per_seed.empty() ? 0.0 : mean / pt.per_seed.size();
        rep.points.push_back(std::move(pt));
    }
    if (n_series.size() < 2) {
        rep.verdict = TrendVerdict::InsufficientSeries;
        return rep;
    }
    int worst_succ = -1;
    int trials = 0;
    bool ok = true;
    for (std::size_t j = 0; j + 1 < rep.points.size(); ++j) {
        const auto& lo = rep.points[j].per_seed;
        const auto& hi = rep.points[j + 1].per_seed;
        if (lo.size() != hi.size() || lo.empty())
            throw MismatchedScenarios("paired seeds disagree across n");
        int succ = 0;
        for (std::size_t s = 0; s < lo.size(); ++s) {
            if (hi[s] < lo[s] || (hi[s] == 0.0 && lo[s] == 0.0)) ++succ;
        }
        trials = static_cast<int>(lo.size());
        if (worst_succ < 0 || succ < worst_succ) worst_succ = succ;
        if (succ < sign_k) ok = false;
    }
    rep.sign_successes = worst_succ;
    rep.sign_trials = trials;
    rep.verdict = ok ? TrendVerdict::Decreasing : TrendVerdict::NotDecreasing;
    return rep;
}

std::string compliance_to_json(const ComplianceReport& rep) {
    nlohmann::json j;
    j["deadlines"] = rep.deadlines;
    j["sign_successes"] = rep.sign_successes;
    j["sign_trials"] = rep.sign_trials;
    switch (rep.verdict) {
        case TrendVerdict::Decreasing: j["verdict"] = "decreasing"; break;
        case TrendVerdict::NotDecreasing: j["verdict"] = "not_decreasing"; break;
        case TrendVerdict::InsufficientSeries: j["verdict"] = "insufficient series"; break;
    }
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : rep.points) {
        nlohmann::json e;
        e["n"] = p.n;
        e["statistic"] = p.statistic;
        e["per_seed"] = p.per_seed;
        pts.push_back(e);
    }
    j["points"] = pts;
    return j.dump(2);
}

std::string residual_series_to_csv(const std::vector<double>& n_series,
                                   const std::vector<std::vector<double>>& per_seed_residuals) {
    std::ostringstream os;
    os << "n,seed_index,residual\n";
    char buf[96];
    for (std::size_t j = 0; j < n_series.size(); ++j) {
        for (std::size_t s = 0; s < per_seed_residuals[j].size(); ++s) {
            std::snprintf(buf, sizeof(buf), "%.17g,%zu,%.17g\n", n_series[j], s,
                          per_seed_residuals[j][s]);
            os << buf;
        }
    }
    return os.str();
}

} // namespace htqc
