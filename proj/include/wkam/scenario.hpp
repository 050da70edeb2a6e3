#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wkam/barriers.hpp"
#include "wkam/critical_value.hpp"
#include "wkam/extended_flow.hpp"
#include "wkam/hamiltonian.hpp"
#include "wkam/lax_oleinik.hpp"
#include "wkam/weak_kam.hpp"

namespace wkam {

inline constexpr const char* kVersion = "0.1.0";

/// One pass/fail line of a report: the measured number, the threshold it
/// was held against, and the grid it came from.
struct CriterionResult {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    bool at_least = false; // pass means measured >= threshold (separations)
    std::string grid = "-";
    bool pass = false;
};

struct Report {
    std::string verb;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::vector<CriterionResult> criteria;
    nlohmann::json metrics = nlohmann::json::object();

    bool all_pass() const;
    CriterionResult& add(const std::string& name, double measured, double threshold,
                         bool at_least = false, const std::string& grid = "-");
    nlohmann::json to_json() const;
};

/// Parsed and validated scenario configuration.
struct Scenario {
    nlohmann::json raw;
    std::string kind;
    std::vector<TorusGrid> grids;
    OperatorConfig op_cfg;
    WeakKamOptions wk_opt;
    BarrierOptions barrier_opt;
    FlowConfig flow_cfg;
    std::uint64_t seed = 12345;
    std::string out_dir = "out";
    int threads = 0;

    // Models: either a pair (possibly a certified conjugated pair) or one.
    bool has_pair = false;
    HamiltonianModel model1 = HamiltonianModel::free_particle();
    HamiltonianModel model2 = HamiltonianModel::free_particle();

    // Named tolerances with defaults; see tolerance().
    nlohmann::json tolerances = nlohmann::json::object();
    double tolerance(const std::string& name, double fallback) const;
};

Scenario parse_scenario(const nlohmann::json& config);
Scenario load_scenario(const std::string& path);

/// Model block parser, exposed for tests: {"preset": ...} or
/// {"family": ..., "params": {...}, "fourier": {...}}.
HamiltonianModel parse_model(const nlohmann::json& spec);
std::pair<HamiltonianModel, HamiltonianModel> parse_pair(const nlohmann::json& spec);

/// Seeded smooth probe: 4-mode Fourier series with coefficients in [-1,1]
/// drawn from a SplitMix64 stream (platform-independent).
GridFunction fourier_probe(const TorusGrid& grid, int slice, std::uint64_t seed);

// Scenario drivers. Each one appends criteria and metrics to the report and
// writes CSV artifacts under `out_dir` when artifacts are requested.
Report verify_pair_check(const Scenario& sc);
Report verify_alpha(const Scenario& sc);
Report verify_weak_kam(const Scenario& sc);
Report verify_barrier(const Scenario& sc);
Report verify_aubry(const Scenario& sc);
Report verify_theorem1(const Scenario& sc);
Report verify_theorem2(const Scenario& sc);
Report verify_theorem3(const Scenario& sc);
Report verify_theorem4(const Scenario& sc);
Report verify_flow_check(const Scenario& sc);

/// Dispatch on the scenario kind, write report.json (and artifacts) under
/// sc.out_dir, and return the report.
Report run_scenario(const Scenario& sc, bool write_artifacts = true);

} // namespace wkam
