#include "htqc/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace htqc {

namespace {

void require_size(const std::vector<double>& v, int I, const char* name) {
    if (static_cast<int>(v.size()) != I)
        throw NonPositiveParameter(std::string(name) + " must have exactly I entries");
}

void require_positive(const std::vector<double>& v, const char* name) {
    for (double x : v)
        if (!(x > 0.0) || !std::isfinite(x))
            throw NonPositiveParameter(std::string(name) + " entries must be strictly positive");
}

} // namespace

DerivedConstants validate(const ScenarioParams& p) {
    const int I = p.num_classes;
    if (I < 1) throw NonPositiveParameter("class count I must be >= 1");
    require_size(p.lambda, I, "lambda");
    require_size(p.lambda_hat, I, "lambda_hat");
    require_size(p.mu, I, "mu");
    require_size(p.mu_hat, I, "mu_hat");
    require_size(p.c2_ia, I, "C2_IA");
    require_size(p.c2_st, I, "C2_ST");
    require_size(p.h, I, "h");
    require_size(p.r, I, "r");
    require_size(p.b, I, "b");
    require_size(p.x0, I, "x0");

    require_positive(p.lambda, "lambda");
    require_positive(p.mu, "mu");
    require_positive(p.h, "h");
    require_positive(p.r, "r");
    require_positive(p.b, "b");
    require_positive(p.c2_ia, "C2_IA");
    require_positive(p.c2_st, "C2_ST");
    if (!(p.alpha > 0.0)) throw NonPositiveParameter("alpha must be strictly positive");
    if (!(p.n > 0.0)) throw NonPositiveParameter("n must be strictly positive");

    double min_b = p.b[0];
    for (double bi : p.b) min_b = std::min(min_b, bi);
    if (p.epsilon < 0.0 || p.epsilon >= min_b)
        throw NonPositiveParameter("epsilon must lie in [0, min_i b_i)");

    DerivedConstants d;
    d.alpha = p.alpha;
    d.rho.resize(I);
    d.theta.resize(I);
    d.theta_n.resize(I);
    d.m.resize(I);
    d.sigma2.resize(I);
    d.lambda_n.resize(I);
    d.mu_n.resize(I);
    d.sqrt_n = std::sqrt(p.n);

    double sum_rho = 0.0;
    for (int i = 0; i < I; ++i) {
        d.rho[i] = p.lambda[i] / p.mu[i];
        d.theta[i] = 1.0 / p.mu[i];
        sum_rho += d.rho[i];
    }
    if (std::abs(sum_rho - 1.0) > p.load_tolerance) {
        std::ostringstream os;
        os << "critical load violated: sum rho = " << sum_rho
           << " (tolerance " << p.load_tolerance << ")";
        throw LoadNotCritical(os.str());
    }

    d.mbar = 0.0;
    double sig2 = 0.0;
    d.xbar = 0.0;
    for (int i = 0; i < I; ++i) {
        d.m[i] = p.lambda_hat[i] - d.rho[i] * p.mu_hat[i];
        d.sigma2[i] = p.lambda[i] * (p.c2_ia[i] + p.c2_st[i]);
        d.mbar += d.theta[i] * d.m[i];
        sig2 += d.theta[i] * d.theta[i] * d.sigma2[i];
        d.xbar += d.theta[i] * p.b[i];
        d.lambda_n[i] = p.n * p.lambda[i] + d.sqrt_n * p.lambda_hat[i];
        d.mu_n[i] = p.n * p.mu[i] + d.sqrt_n * p.mu_hat[i];
        if (!(d.lambda_n[i] > 0.0) || !(d.mu_n[i] > 0.0))
            throw NonPositiveParameter("lambda^n and mu^n must be positive at the configured n");
        // theta^n_i = 1/(mu^n_i/n): the per-unit-n reciprocal rate, which
        // converges to theta_i.
        d.theta_n[i] = p.n / d.mu_n[i];
    }
    d.sigmabar2 = p.sigmabar2.value_or(sig2);
    if (!(d.sigmabar2 > 0.0)) throw NonPositiveParameter("sigmabar2 must be strictly positive");
    if (!(d.xbar > 0.0)) throw NonPositiveParameter("xbar must be strictly positive");

    for (int i = 0; i < I; ++i) {
        if (p.x0[i] < 0.0 || p.x0[i] > p.b[i])
            throw InitialStateOutsideDomain("x0 must lie in the buffer domain");
    }
    if (p.deadlines) {
        require_size(*p.deadlines, I, "d");
        require_positive(*p.deadlines, "d");
    }
    return d;
}

namespace {

using nlohmann::json;

std::vector<double> get_array(const json& j, const char* key, int I) {
    const auto& a = j.at(key);
    if (!a.is_array() || static_cast<int>(a.size()) != I)
        throw ConfigError(std::string("field '") + key + "' must be an array of length I");
    std::vector<double> v(I);
    for (int i = 0; i < I; ++i) v[i] = a[i].get<double>();
    return v;
}

std::vector<DistKind> get_dists(const json& j, const char* key, int I) {
    std::vector<DistKind> v(I, DistKind::Exponential);
    if (!j.contains(key)) return v;
    const auto& a = j.at(key);
    if (!a.is_array() || static_cast<int>(a.size()) != I)
        throw ConfigError(std::string("field '") + key + "' must be an array of length I");
    for (int i = 0; i < I; ++i) v[i] = dist_kind_from_string(a[i].get<std::string>());
    return v;
}

} // namespace

ScenarioParams scenario_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid scenario JSON: ") + e.what());
    }
    static const std::set<std::string> known = {
        "schema", "I", "lambda", "lambda_hat", "mu", "mu_hat", "C2_IA", "C2_ST",
        "h", "r", "b", "alpha", "n", "epsilon", "x0", "sigmabar2",
        "load_tolerance", "d", "ia_dist", "st_dist"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.count(it.key()))
            throw ConfigError("unknown scenario key: '" + it.key() + "'");
    }
    if (!j.contains("schema") || j.at("schema").get<std::string>() != kScenarioSchema)
        throw ConfigError(std::string("scenario requires schema == \"") + kScenarioSchema + "\"");

    ScenarioParams p;
    p.num_classes = j.at("I").get<int>();
    const int I = p.num_classes;
    if (I < 1) throw ConfigError("I must be >= 1");
    p.lambda = get_array(j, "lambda", I);
    p.mu = get_array(j, "mu", I);
    p.lambda_hat = j.contains("lambda_hat") ? get_array(j, "lambda_hat", I)
                                            : std::vector<double>(I, 0.0);
    p.mu_hat = j.contains("mu_hat") ? get_array(j, "mu_hat", I) : std::vector<double>(I, 0.0);
    p.c2_ia = j.contains("C2_IA") ? get_array(j, "C2_IA", I) : std::vector<double>(I, 1.0);
    p.c2_st = j.contains("C2_ST") ? get_array(j, "C2_ST", I) : std::vector<double>(I, 1.0);
    p.h = get_array(j, "h", I);
    p.r = get_array(j, "r", I);
    p.b = get_array(j, "b", I);
    p.alpha = j.at("alpha").get<double>();
    p.n = j.at("n").get<double>();
    p.epsilon = j.contains("epsilon") ? j.at("epsilon").get<double>() : 0.0;
    p.x0 = j.contains("x0") ? get_array(j, "x0", I) : std::vector<double>(I, 0.0);
    if (j.contains("sigmabar2")) p.sigmabar2 = j.at("sigmabar2").get<double>();
    if (j.contains("load_tolerance")) p.load_tolerance = j.at("load_tolerance").get<double>();
    if (j.contains("d")) p.deadlines = get_array(j, "d", I);
    p.ia_dist = get_dists(j, "ia_dist", I);
    p.st_dist = get_dists(j, "st_dist", I);
    return p;
}

ScenarioParams load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return scenario_from_json_text(ss.str());
}

std::string scenario_to_json_text(const ScenarioParams& p) {
    json j;
    j["schema"] = kScenarioSchema;
    j["I"] = p.num_classes;
    j["lambda"] = p.lambda;
    j["lambda_hat"] = p.lambda_hat;
    j["mu"] = p.mu;
    j["mu_hat"] = p.mu_hat;
    j["C2_IA"] = p.c2_ia;
    j["C2_ST"] = p.c2_st;
    j["h"] = p.h;
    j["r"] = p.r;
    j["b"] = p.b;
    j["alpha"] = p.alpha;
    j["n"] = p.n;
    j["epsilon"] = p.epsilon;
    j["x0"] = p.x0;
    if (p.sigmabar2) j["sigmabar2"] = *p.sigmabar2;
    j["load_tolerance"] = p.load_tolerance;
    if (p.deadlines) j["d"] = *p.deadlines;
    std::vector<std::string> ia, st;
    for (auto k : p.ia_dist) ia.push_back(to_string(k));
    for (auto k : p.st_dist) st.push_back(to_string(k));
    if (!ia.empty()) j["ia_dist"] = ia;
    if (!st.empty()) j["st_dist"] = st;
    return j.dump(2);
}

} // namespace htqc
