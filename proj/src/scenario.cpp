#include "wkam/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "wkam/parallel.hpp"

namespace wkam {

bool Report::all_pass() const {
    for (const auto& c : criteria)
        if (!c.pass) return false;
    return true;
}

CriterionResult& Report::add(const std::string& name, double measured, double threshold,
                             bool at_least, const std::string& grid) {
    CriterionResult c;
    c.name = name;
    c.measured = measured;
    c.threshold = threshold;
    c.at_least = at_least;
    c.grid = grid;
    c.pass = at_least ? (measured >= threshold) : (measured <= threshold);
    criteria.push_back(c);
    return criteria.back();
}

nlohmann::json Report::to_json() const {
    nlohmann::json j;
    j["verb"] = verb;
    j["version"] = kVersion;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    j["pass"] = all_pass();
    j["criteria"] = nlohmann::json::array();
    for (const auto& c : criteria) {
        j["criteria"].push_back({{"name", c.name},
                                 {"measured", c.measured},
                                 {"threshold", c.threshold},
                                 {"comparison", c.at_least ? ">=" : "<="},
                                 {"grid", c.grid},
                                 {"pass", c.pass}});
    }
    j["metrics"] = metrics;
    return j;
}

double Scenario::tolerance(const std::string& name, double fallback) const {
    if (tolerances.contains(name)) {
        double v = tolerances.at(name).get<double>();
        if (v <= 0.0) throw ConfigInvalid("tolerances." + name + " must be positive");
        return v;
    }
    return fallback;
}

namespace {

std::string fnv1a_hash(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ConvexProfile parse_profile(const nlohmann::json& j) {
    std::vector<ConvexProfile::Term> terms;
    if (!j.contains("terms")) throw ConfigInvalid("profile: missing 'terms'");
    for (const auto& t : j.at("terms")) {
        if (!t.is_array() || t.size() != 2)
            throw ConfigInvalid("profile term must be [power, coeff]");
        terms.push_back({t[0].get<int>(), t[1].get<double>()});
    }
    double pmax = j.value("p_max", 8.0);
    return ConvexProfile(terms, pmax);
}

TrigForm parse_form(const std::string& s) {
    if (s == "coscos") return TrigForm::CosCos;
    if (s == "cossin") return TrigForm::CosSin;
    if (s == "sincos") return TrigForm::SinCos;
    if (s == "sinsin") return TrigForm::SinSin;
    throw ConfigInvalid("fourier form '" + s + "' (want coscos|cossin|sincos|sinsin)");
}

FourierSeries2D parse_series2d(const nlohmann::json& arr) {
    FourierSeries2D s;
    for (const auto& t : arr) {
        FourierTerm2D term;
        term.kq = t.at("kq").get<int>();
        term.kt = t.at("kt").get<int>();
        term.form = parse_form(t.at("form").get<std::string>());
        term.amp = t.at("amp").get<double>();
        s.terms.push_back(term);
    }
    return s;
}

FourierSeries1D parse_series1d(const nlohmann::json& j) {
    FourierSeries1D s;
    s.constant = j.value("constant", 0.0);
    if (j.contains("terms"))
        for (const auto& t : j.at("terms")) {
            FourierTerm1D term;
            term.k = t.at("k").get<int>();
            std::string form = t.at("form").get<std::string>();
            if (form == "cos") term.is_sin = false;
            else if (form == "sin") term.is_sin = true;
            else throw ConfigInvalid("1d fourier form '" + form + "' (want cos|sin)");
            term.amp = t.at("amp").get<double>();
            s.terms.push_back(term);
        }
    return s;
}

GeneratingField parse_field(const nlohmann::json& j) {
    GeneratingField f;
    if (j.contains("S")) f.S = parse_series2d(j.at("S"));
    if (j.contains("g")) f.g = parse_series1d(j.at("g"));
    return f;
}

} // namespace

HamiltonianModel parse_model(const nlohmann::json& spec) {
    if (spec.contains("preset")) {
        std::string p = spec.at("preset").get<std::string>();
        if (p == "free") return HamiltonianModel::free_particle();
        if (p == "pendulum") return HamiltonianModel::pendulum(1.0);
        if (p == "pair_d1_h1") return pair_d1().h1;
        if (p == "pair_d1_h2") return pair_d1().h2;
        throw ConfigInvalid("unknown model preset '" + p + "'");
    }
    std::string family = spec.value("family", "");
    nlohmann::json params = spec.value("params", nlohmann::json::object());
    if (family == "free") return HamiltonianModel::free_particle();
    if (family == "pendulum") return HamiltonianModel::pendulum(params.value("amplitude", 1.0));
    if (family == "forced_pendulum")
        return HamiltonianModel::forced_pendulum(params.value("amplitude", 1.0),
                                                 params.value("epsilon", 0.5));
    if (family == "conjugated") {
        if (!spec.contains("profile")) throw ConfigInvalid("conjugated model: missing 'profile'");
        return HamiltonianModel::conjugated(parse_profile(spec.at("profile")),
                                            parse_field(spec.value("fourier", nlohmann::json::object())));
    }
    if (family == "custom") {
        if (!spec.contains("profile")) throw ConfigInvalid("custom model: missing 'profile'");
        FourierSeries2D v;
        if (spec.contains("fourier") && spec.at("fourier").contains("V"))
            v = parse_series2d(spec.at("fourier").at("V"));
        return HamiltonianModel::custom(parse_profile(spec.at("profile")), v);
    }
    throw ConfigInvalid("model: unknown family '" + family + "'");
}

std::pair<HamiltonianModel, HamiltonianModel> parse_pair(const nlohmann::json& spec) {
    if (spec.contains("preset")) {
        std::string p = spec.at("preset").get<std::string>();
        if (p == "pair_d1") {
            CommutingPair cp = pair_d1();
            return {cp.h1, cp.h2};
        }
        if (p == "control") return control_pair();
        if (p == "pendula_1_2")
            return {HamiltonianModel::pendulum(1.0), HamiltonianModel::pendulum(2.0)};
        throw ConfigInvalid("unknown pair preset '" + p + "'");
    }
    if (spec.contains("first") && spec.contains("second"))
        return {parse_model(spec.at("first")), parse_model(spec.at("second"))};
    if (spec.contains("h1") && spec.contains("h2")) {
        // Certified conjugated pair from shared field data.
        CommutingPair cp = make_conjugated_pair(parse_profile(spec.at("h1")),
                                                parse_profile(spec.at("h2")),
                                                parse_field(spec.value("fourier", nlohmann::json::object())));
        return {cp.h1, cp.h2};
    }
    throw ConfigInvalid("pair: want 'preset', 'first'/'second', or 'h1'/'h2' with 'fourier'");
}

Scenario parse_scenario(const nlohmann::json& config) {
    Scenario sc;
    sc.raw = config;
    if (!config.contains("verification") || !config.at("verification").contains("kind"))
        throw ConfigInvalid("missing 'verification.kind'");
    sc.kind = config.at("verification").at("kind").get<std::string>();

    if (!config.contains("grids")) throw ConfigInvalid("missing 'grids'");
    int prev = 0;
    for (const auto& g : config.at("grids")) {
        if (!g.is_array() || g.size() != 2) throw ConfigInvalid("grids: entries must be [N_q, N_t]");
        TorusGrid grid(g[0].get<int>(), g[1].get<int>());
        if (grid.n_q <= prev) throw ConfigInvalid("grids: must be strictly increasing in N_q");
        prev = grid.n_q;
        sc.grids.push_back(grid);
    }

    nlohmann::json op = config.value("operator", nlohmann::json::object());
    sc.op_cfg.v_max = op.value("v_max", 3.0);
    sc.op_cfg.n_v = op.value("n_v", 121);
    sc.op_cfg.snap_to_grid = op.value("snap_to_grid", true);
    std::string interp = op.value("interp", "linear");
    if (interp == "linear") sc.op_cfg.interp = InterpOrder::Linear;
    else if (interp == "cubic") sc.op_cfg.interp = InterpOrder::Cubic;
    else throw ConfigInvalid("operator.interp must be linear|cubic");

    nlohmann::json wk = config.value("weak_kam", nlohmann::json::object());
    sc.wk_opt.burn_in = wk.value("burn_in", 50);
    sc.wk_opt.window = wk.value("window", 10);
    sc.wk_opt.max_periods = wk.value("max_periods", 400);
    sc.wk_opt.tol = wk.value("tol", 1e-10);

    nlohmann::json bar = config.value("barrier", nlohmann::json::object());
    sc.barrier_opt.n_min = bar.value("n_min", 8);
    sc.barrier_opt.n_max = bar.value("n_max", 24);
    sc.barrier_opt.settle_tol = bar.value("settle_tol", 1e-6);
    sc.barrier_opt.strict_settle = bar.value("strict_settle", false);
    sc.barrier_opt.eps_factor = bar.value("eps_factor", 0.01);
    sc.barrier_opt.rep_cap = bar.value("rep_cap", 48);

    nlohmann::json flow = config.value("flow", nlohmann::json::object());
    sc.flow_cfg.step = flow.value("step", 1e-3);
    sc.flow_cfg.max_span = flow.value("max_span", 8.0);

    sc.tolerances = config.value("tolerances", nlohmann::json::object());
    for (auto it = sc.tolerances.begin(); it != sc.tolerances.end(); ++it)
        if (!it.value().is_number() || it.value().get<double>() <= 0.0)
            throw ConfigInvalid("tolerances." + it.key() + " must be a positive number");

    sc.seed = config.value("seed", 12345ull);
    if (config.contains("output")) sc.out_dir = config.at("output").value("dir", "out");

    if (!config.contains("models")) throw ConfigInvalid("missing 'models'");
    const auto& models = config.at("models");
    if (models.contains("pair")) {
        sc.has_pair = true;
        std::tie(sc.model1, sc.model2) = parse_pair(models.at("pair"));
    } else if (models.contains("single")) {
        sc.model1 = parse_model(models.at("single"));
    } else {
        throw ConfigInvalid("models: want 'pair' or 'single'");
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot open config '" + path + "'");
    nlohmann::json config;
    try {
        in >> config;
    } catch (const std::exception& e) {
        throw ConfigInvalid(std::string("config parse: ") + e.what());
    }
    return parse_scenario(config);
}

namespace {

struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform_pm1() { // in [-1, 1]
        return 2.0 * (static_cast<double>(next() >> 11) * 0x1.0p-53) - 1.0;
    }
};

} // namespace

GridFunction fourier_probe(const TorusGrid& grid, int slice, std::uint64_t seed) {
    SplitMix64 rng(seed);
    double a[4], b[4];
    for (int m = 0; m < 4; ++m) {
        a[m] = rng.uniform_pm1();
        b[m] = rng.uniform_pm1();
    }
    GridFunction u(grid, slice);
    for (int j = 0; j < grid.n_q; ++j) {
        double q = grid.node(j), s = 0.0;
        for (int m = 0; m < 4; ++m)
            s += a[m] * std::cos(kTwoPi * (m + 1) * q) + b[m] * std::sin(kTwoPi * (m + 1) * q);
        u[j] = s;
    }
    return u;
}

Report run_scenario(const Scenario& sc, bool write_artifacts) {
    Report rep;
    if (sc.kind == "pair-check") rep = verify_pair_check(sc);
    else if (sc.kind == "alpha") rep = verify_alpha(sc);
    else if (sc.kind == "weak-kam") rep = verify_weak_kam(sc);
    else if (sc.kind == "barrier") rep = verify_barrier(sc);
    else if (sc.kind == "aubry") rep = verify_aubry(sc);
    else if (sc.kind == "theorem1") rep = verify_theorem1(sc);
    else if (sc.kind == "theorem2") rep = verify_theorem2(sc);
    else if (sc.kind == "theorem3") rep = verify_theorem3(sc);
    else if (sc.kind == "theorem4") rep = verify_theorem4(sc);
    else if (sc.kind == "flow-check") rep = verify_flow_check(sc);
    else throw ConfigInvalid("verification.kind '" + sc.kind + "' is not a known verb");

    rep.verb = sc.kind;
    rep.seed = sc.seed;
    rep.config_hash = fnv1a_hash(sc.raw.dump());
    if (write_artifacts) {
        std::filesystem::create_directories(sc.out_dir);
        nlohmann::json j = rep.to_json();
        j["generated_at"] = static_cast<std::uint64_t>(std::time(nullptr));
        std::ofstream out(sc.out_dir + "/report.json");
        if (!out) throw SolverError("cannot write report.json under " + sc.out_dir);
        out << j.dump(2) << "\n";
    }
    return rep;
}

} // namespace wkam
