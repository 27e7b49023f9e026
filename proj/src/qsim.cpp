#include "htqc/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "htqc/parallel.hpp"
#include "htqc/rng.hpp"

namespace htqc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

PolicyKind policy_kind_from_string(const std::string& name) {
    if (name == "ao") return PolicyKind::AsymptoticOptimal;
    if (name == "fixed_priority" || name == "fixed") return PolicyKind::FixedPriority;
    if (name == "serve_first_only" || name == "adversarial") return PolicyKind::ServeFirstOnly;
    throw ConfigError("unknown policy: " + name);
}

std::string to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::AsymptoticOptimal: return "ao";
        case PolicyKind::FixedPriority: return "fixed_priority";
        case PolicyKind::ServeFirstOnly: return "serve_first_only";
    }
    return "?";
}

SimInput make_sim_input(const ScenarioParams& params, const DerivedConstants& derived,
                        const ReductionObjects& red, PolicyKind kind, double astar) {
    SimInput in;
    in.num_classes = params.num_classes;
    in.sqrt_n = derived.sqrt_n;
    in.lambda_n = derived.lambda_n;
    in.mu_n = derived.mu_n;
    in.theta_n = derived.theta_n;
    in.rho = derived.rho;
    in.h = params.h;
    in.r = params.r;
    in.alpha = params.alpha;
    in.cap.resize(params.num_classes);
    in.x_init.resize(params.num_classes);
    in.a.resize(params.num_classes);
    for (int i = 0; i < params.num_classes; ++i) {
        // exact integer buffer limit: X_i + 1 > b_i sqrt(n) tested as X_i + 1 > cap_i
        in.cap[i] = static_cast<std::int64_t>(std::floor(params.b[i] * derived.sqrt_n + 1e-9));
        in.x_init[i] = static_cast<std::int64_t>(std::floor(params.x0[i] * derived.sqrt_n + 1e-9));
        in.a[i] = params.b[i] - params.epsilon;
    }
    for (int i = 0; i < params.num_classes; ++i) {
        in.ia.push_back(UnitMeanDist::make(params.ia_dist[i], params.c2_ia[i]));
        in.st.push_back(UnitMeanDist::make(params.st_dist[i], params.c2_st[i]));
    }
    in.kind = kind;
    in.order = red.order;
    in.istar = red.istar;
    in.astar = astar;
    return in;
}

namespace {

struct Allocation {
    std::vector<double> B;
    std::uint32_t hplus_mask = 0; // bit per class in the high-priority nonempty set
    double sum = 0.0;
};

Allocation allocate_ao(const SimInput& in, const std::vector<std::int64_t>& x) {
    const int I = in.num_classes;
    Allocation out;
    out.B.assign(I, 0.0);
    bool all_empty = true;
    for (int i = 0; i < I; ++i)
        if (x[i] != 0) all_empty = false;
    if (all_empty) return out;

    // low-priority class: the lowest h*mu priority among classes whose buffer
    // is not nearly full; defaults to the overall lowest priority
    int lowpos = I - 1;
    for (int p = I - 1; p >= 0; --p) {
        const int cls = in.order[p];
        if (static_cast<double>(x[cls]) / in.sqrt_n < in.a[cls]) {
            lowpos = p;
            break;
        }
    }
    const int lowcls = in.order[lowpos];
    double rho_sum = 0.0;
    for (int i = 0; i < I; ++i) {
        if (i != lowcls && x[i] > 0) {
            out.hplus_mask |= (1u << i);
            rho_sum += in.rho[i];
        }
    }
    if (out.hplus_mask != 0) {
        for (int i = 0; i < I; ++i)
            if (out.hplus_mask & (1u << i)) {
                out.B[i] = in.rho[i] / rho_sum;
                out.sum += out.B[i];
            }
    } else {
        // only the lowest-priority class is occupied
        out.B[in.order[I - 1]] = 1.0;
        out.sum = 1.0;
    }
    return out;
}

Allocation allocate_fixed(const SimInput& in, const std::vector<std::int64_t>& x) {
    Allocation out;
    out.B.assign(in.num_classes, 0.0);
    for (int p = 0; p < in.num_classes; ++p) {
        const int cls = in.order[p];
        if (x[cls] > 0) {
            out.B[cls] = 1.0;
            out.sum = 1.0;
            break;
        }
    }
    return out;
}

Allocation allocate_serve_first(const SimInput& in, const std::vector<std::int64_t>& x) {
    Allocation out;
    out.B.assign(in.num_classes, 0.0);
    if (x[0] > 0) {
        out.B[0] = 1.0;
        out.sum = 1.0;
    }
    return out;
}

Allocation allocate(const SimInput& in, const std::vector<std::int64_t>& x) {
    switch (in.kind) {
        case PolicyKind::AsymptoticOptimal: return allocate_ao(in, x);
        case PolicyKind::FixedPriority: return allocate_fixed(in, x);
        case PolicyKind::ServeFirstOnly: return allocate_serve_first(in, x);
    }
    return {};
}

double workload_n(const SimInput& in, const std::vector<std::int64_t>& x) {
    double w = 0.0;
    for (int i = 0; i < in.num_classes; ++i)
        w += in.theta_n[i] * static_cast<double>(x[i]);
    return w / in.sqrt_n;
}

} // namespace

std::vector<double> policy_ao_allocation(const SimInput& in, const std::vector<std::int64_t>& x) {
    return allocate_ao(in, x).B;
}

std::vector<double> policy_fixed_priority_allocation(const SimInput& in,
                                                     const std::vector<std::int64_t>& x) {
    return allocate_fixed(in, x).B;
}

bool policy_ao_reject(const SimInput& in, int cls, const std::vector<std::int64_t>& x) {
    if (x[cls] + 1 > in.cap[cls]) return true; // forced
    return cls == in.istar && workload_n(in, x) >= in.astar;
}

SimRecord run(const SimInput& in, const RunOptions& opts) {
    if (!(opts.horizon > 0.0)) throw HorizonNonPositive("run: horizon must be positive");
    const int I = in.num_classes;
    const double T = opts.horizon;
    const double alpha = in.alpha;
    const double inv_sqrt_n = 1.0 / in.sqrt_n;

    std::vector<RngStream> ia_store, st_store;
    for (int i = 0; i < I; ++i) {
        ia_store.push_back(
            RngStream(opts.seed, {0xa1ul, opts.replication, static_cast<std::uint64_t>(i)}));
        st_store.push_back(
            RngStream(opts.seed, {0x51ul, opts.replication, static_cast<std::uint64_t>(i)}));
    }

    std::vector<std::int64_t> x = in.x_init;
    std::vector<std::int64_t> arrivals(I, 0), departures(I, 0), rejections(I, 0), forced(I, 0);
    std::vector<double> tcum(I, 0.0), next_arr(I, 0.0), threshold(I, 0.0);
    for (int i = 0; i < I; ++i) {
        next_arr[i] =
            in.lambda_n[i] > 0.0 ? in.ia[i].sample(ia_store[i]) / in.lambda_n[i] : kInf;
        threshold[i] = in.st[i].sample(st_store[i]) / in.mu_n[i];
    }
    Allocation alloc = allocate(in, x);

    SimRecord rec;
    rec.seed = opts.seed;
    rec.horizon = T;
    if (opts.record_customers) {
        rec.customers.arrival.resize(I);
        rec.customers.departure.resize(I);
        rec.customers.rejected_at.resize(I);
        rec.customers.rejected_forced.resize(I);
    }
    std::size_t nsamples = 0;
    if (opts.record_paths) {
        nsamples = static_cast<std::size_t>(std::floor(T / opts.sample_dt)) + 1;
        rec.t.reserve(nsamples);
        rec.xhat.assign(I, {});
        rec.zhat.assign(I, {});
        rec.yhat.assign(I, {});
        for (int i = 0; i < I; ++i) {
            rec.xhat[i].reserve(nsamples);
            rec.zhat[i].reserve(nsamples);
            rec.yhat[i].reserve(nsamples);
        }
        rec.workload.reserve(nsamples);
    }

    double sum_rho = 0.0;
    for (int i = 0; i < I; ++i) sum_rho += in.rho[i];

    auto check_invariants = [&](double when) {
        for (int i = 0; i < I; ++i) {
            if (x[i] < 0 || x[i] > in.cap[i])
                throw SimInvariantViolation("buffer constraint violated");
            if (x[i] != in.x_init[i] + arrivals[i] - departures[i] - rejections[i])
                throw SimInvariantViolation("flow conservation violated");
            if (x[i] == 0 && alloc.B[i] != 0.0)
                throw SimInvariantViolation("allocation to an empty class");
        }
        if (alloc.sum > sum_rho + 1e-12)
            throw SimInvariantViolation("theta^n . yhat would decrease (sum B > sum rho)");
        if (in.kind == PolicyKind::AsymptoticOptimal) {
            bool nonzero = false;
            for (int i = 0; i < I; ++i) nonzero = nonzero || (x[i] != 0);
            if (nonzero && std::abs(alloc.sum - 1.0) > 1e-12)
                throw SimInvariantViolation("work conservation violated");
            if (alloc.hplus_mask != 0) {
                for (int i = 0; i < I; ++i)
                    if ((alloc.hplus_mask & (1u << i)) && !(alloc.B[i] > in.rho[i]))
                        throw SimInvariantViolation("priority premium violated");
            }
        }
        (void)when;
    };
    if (opts.paranoid) check_invariants(0.0);

    // sample the state at a given time ts in [t_prev, t_event]
    double t = 0.0;
    double next_sample = 0.0;
    std::size_t sample_idx = 0;
    auto take_sample = [&](double ts) {
        rec.t.push_back(ts);
        double w = 0.0;
        for (int i = 0; i < I; ++i) {
            const double xi = static_cast<double>(x[i]) * inv_sqrt_n;
            rec.xhat[i].push_back(xi);
            rec.zhat[i].push_back(static_cast<double>(rejections[i]) * inv_sqrt_n);
            const double ti = tcum[i] + alloc.B[i] * (ts - t);
            rec.yhat[i].push_back(in.mu_n[i] * inv_sqrt_n * (in.rho[i] * ts - ti));
            w += in.theta_n[i] * xi;
        }
        rec.workload.push_back(w);
        ++sample_idx;
        next_sample = static_cast<double>(sample_idx) * opts.sample_dt;
    };

    // cost accumulators (direct and integrated forms, exact between events)
    double hold_direct = 0.0, rej_direct = 0.0;
    double acc_h = 0.0, acc_z = 0.0; // raw integrals of e^{-as}(IH-linear), e^{-as}(IRZ-linear)
    double IH = 0.0, IRZ = 0.0, RZ = 0.0;
    double e1 = 1.0; // e^{-alpha t}

    const double sum_h_init = [&] {
        double s = 0.0;
        for (int i = 0; i < I; ++i) s += in.h[i] * static_cast<double>(x[i]);
        return s * inv_sqrt_n;
    }();
    double g = sum_h_init; // current holding-cost rate h . xhat

    while (true) {
        // next event: arrivals first, then departures, ascending class on ties
        double te = T;
        int ev_class = -1;
        bool ev_arrival = false;
        for (int i = 0; i < I; ++i) {
            if (next_arr[i] < te) {
                te = next_arr[i];
                ev_class = i;
                ev_arrival = true;
            }
        }
        for (int i = 0; i < I; ++i) {
            if (x[i] > 0 && alloc.B[i] > 0.0) {
                const double dep = t + (threshold[i] - tcum[i]) / alloc.B[i];
                if (dep < te) {
                    te = dep;
                    ev_class = i;
                    ev_arrival = false;
                }
            }
        }

        // exact discounted-cost integration over [t, te)
        const double e2 = std::exp(-alpha * te);
        const double dt_ev = te - t;
        const double de = e1 - e2;
        hold_direct += g * de / alpha;
        acc_h += IH * de / alpha + g * (de / (alpha * alpha) - dt_ev * e2 / alpha);
        acc_z += IRZ * de / alpha + RZ * (de / (alpha * alpha) - dt_ev * e2 / alpha);
        IH += g * dt_ev;
        IRZ += RZ * dt_ev;

        if (opts.record_paths) {
            while (next_sample < te && sample_idx < nsamples) take_sample(next_sample);
        }

        // advance service clocks
        for (int i = 0; i < I; ++i) tcum[i] += alloc.B[i] * dt_ev;

        if (ev_class < 0) { // horizon reached
            t = T;
            e1 = e2;
            if (opts.record_paths) {
                while (sample_idx < nsamples && next_sample <= T + 1e-12) take_sample(next_sample);
            }
            break;
        }

        t = te;
        e1 = e2;
        ++rec.events;
        if (ev_arrival) {
            const int i = ev_class;
            ++arrivals[i];
            const bool is_forced = x[i] + 1 > in.cap[i];
            bool reject = is_forced;
            if (!reject && in.kind == PolicyKind::AsymptoticOptimal && i == in.istar)
                reject = workload_n(in, x) >= in.astar;
            if (reject) {
                ++rejections[i];
                if (is_forced) ++forced[i];
                const double charge = in.r[i] * inv_sqrt_n;
                rej_direct += e1 * charge;
                RZ += charge;
                if (opts.record_customers) {
                    rec.customers.rejected_at[i].push_back(t);
                    rec.customers.rejected_forced[i].push_back(is_forced ? 1 : 0);
                }
            } else {
                ++x[i];
                if (opts.record_customers) {
                    rec.customers.arrival[i].push_back(t);
                    rec.customers.departure[i].push_back(std::numeric_limits<double>::quiet_NaN());
                }
            }
            next_arr[i] = t + in.ia[i].sample(ia_store[i]) / in.lambda_n[i];
        } else {
            const int i = ev_class;
            --x[i];
            ++departures[i];
            tcum[i] = threshold[i]; // exact renewal alignment
            threshold[i] += in.st[i].sample(st_store[i]) / in.mu_n[i];
            if (opts.record_customers) {
                // FIFO within class; initial customers depart before logged admissions
                const std::int64_t k = departures[i] - in.x_init[i];
                if (k >= 1 && k <= static_cast<std::int64_t>(rec.customers.arrival[i].size()))
                    rec.customers.departure[i][static_cast<std::size_t>(k - 1)] = t;
            }
        }

        alloc = allocate(in, x);
        g = 0.0;
        for (int i = 0; i < I; ++i) g += in.h[i] * static_cast<double>(x[i]);
        g *= inv_sqrt_n;
        if (opts.paranoid) check_invariants(t);

        if (opts.record_paths) {
            while (sample_idx < nsamples && next_sample <= t) take_sample(next_sample);
        }
    }

    rec.cost_direct = hold_direct + rej_direct;
    rec.cost_integrated = alpha * acc_h + alpha * alpha * acc_z;
    rec.holding_cost = hold_direct;
    rec.rejection_cost = rej_direct;
    rec.ih_at_horizon = IH;
    rec.irz_at_horizon = IRZ;
    rec.rz_at_horizon = RZ;
    rec.arrivals = std::move(arrivals);
    rec.departures = std::move(departures);
    rec.rejections = std::move(rejections);
    rec.forced_rejections = std::move(forced);
    return rec;
}

CostEstimate cost_estimate(const SimInput& in, const CostOptions& opts) {
    const double T = opts.horizon > 0.0 ? opts.horizon : std::log(1e8) / in.alpha;
    if (opts.replications < 2) throw InvalidInterval("cost_estimate: needs >= 2 replications");

    // truncation-tail bound: xhat <= b (hard buffers) and zhat grows at most
    // like the scaled arrival processes
    double hb = 0.0, rl = 0.0;
    for (int i = 0; i < in.num_classes; ++i) {
        hb += in.h[i] * static_cast<double>(in.cap[i]) / in.sqrt_n;
        rl += in.r[i] * in.lambda_n[i] / in.sqrt_n;
    }
    const double tail = std::exp(-in.alpha * T) * (hb + rl / in.alpha) / in.alpha;
    if (tail > opts.bias_budget)
        throw BiasBudgetExceeded("cost_estimate: truncation tail bound exceeds the bias budget");

    std::vector<double> direct(opts.replications), integrated(opts.replications),
        forced(opts.replications);
    parallel_for_index(static_cast<std::size_t>(opts.replications), [&](std::size_t rep) {
        RunOptions ro;
        ro.horizon = T;
        ro.seed = opts.seed;
        ro.replication = rep;
        ro.record_paths = false;
        ro.record_customers = false;
        SimRecord r = run(in, ro);
        // finite-horizon integration-by-parts identity between the two forms
        const double eT = std::exp(-in.alpha * T);
        const double boundary = eT * (r.ih_at_horizon + in.alpha * r.irz_at_horizon + r.rz_at_horizon);
        const double gap = r.cost_direct - (r.cost_integrated + boundary);
        if (std::abs(gap) > 1e-9 * (1.0 + std::abs(r.cost_direct)))
            throw SimInvariantViolation("direct and integrated cost forms disagree");
        direct[rep] = r.cost_direct;
        integrated[rep] = r.cost_integrated;
        double f = 0.0;
        for (auto c : r.forced_rejections) f += static_cast<double>(c);
        forced[rep] = f;
    });

    CostEstimate est;
    est.replications = opts.replications;
    est.horizon = T;
    est.seed = opts.seed;
    double mean = 0.0, mi = 0.0, mf = 0.0;
    for (int k = 0; k < opts.replications; ++k) {
        mean += direct[k];
        mi += integrated[k];
        mf += forced[k];
    }
    mean /= opts.replications;
    mi /= opts.replications;
    mf /= opts.replications;
    double var = 0.0;
    for (int k = 0; k < opts.replications; ++k) var += (direct[k] - mean) * (direct[k] - mean);
    var /= (opts.replications - 1.0);
    est.estimate = mean;
    est.std_error = std::sqrt(var / opts.replications);
    est.mean_integrated = mi;
    est.mean_forced_rejections = mf;
    return est;
}

double ssc_deviation(const SimRecord& rec, const ReductionObjects& red) {
    double worst = 0.0;
    const int I = red.num_classes;
    for (std::size_t k = 0; k < rec.t.size(); ++k) {
        const double w = std::clamp(rec.workload[k], 0.0, red.xbar);
        const std::vector<double> target = red.gamma_a(w);
        double dev = 0.0;
        for (int i = 0; i < I; ++i) dev += std::abs(rec.xhat[i][k] - target[i]);
        worst = std::max(worst, dev);
    }
    return worst;
}

std::string trajectory_to_csv(const SimRecord& rec) {
    std::ostringstream os;
    const int I = static_cast<int>(rec.xhat.size());
    os << "t";
    for (int i = 0; i < I; ++i) os << ",xhat_" << (i + 1);
    os << ",workload";
    for (int i = 0; i < I; ++i) os << ",zhat_" << (i + 1);
    os << "\n";
    char buf[64];
    for (std::size_t k = 0; k < rec.t.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g", rec.t[k]);
        os << buf;
        for (int i = 0; i < I; ++i) {
            std::snprintf(buf, sizeof(buf), ",%.17g", rec.xhat[i][k]);
            os << buf;
        }
        std::snprintf(buf, sizeof(buf), ",%.17g", rec.workload[k]);
        os << buf;
        for (int i = 0; i < I; ++i) {
            std::snprintf(buf, sizeof(buf), ",%.17g", rec.zhat[i][k]);
            os << buf;
        }
        os << "\n";
    }
    return os.str();
}

} // namespace htqc
