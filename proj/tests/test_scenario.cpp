#include <doctest.h>

#include <cmath>

#include "wkam/scenario.hpp"

using namespace wkam;
using nlohmann::json;

namespace {

json minimal_config(const std::string& kind) {
    json j;
    j["verification"] = {{"kind", kind}};
    j["grids"] = json::array({json::array({32, 8})});
    j["models"] = {{"pair", {{"preset", "pair_d1"}}}};
    return j;
}

} // namespace

TEST_CASE("model parsing: presets and explicit families") {
    CHECK(parse_model({{"preset", "free"}}).name() == "free");
    CHECK(parse_model({{"family", "pendulum"}, {"params", {{"amplitude", 2.0}}}}).value(0, 0, 0) ==
          doctest::Approx(2.0));
    json conj = {{"family", "conjugated"},
                 {"profile", {{"terms", json::array({json::array({2, 0.5})})}}},
                 {"fourier",
                  {{"S", json::array({{{"kq", 1}, {"kt", 1}, {"form", "sincos"}, {"amp", 0.05}}})},
                   {"g", {{"terms", json::array({{{"k", 1}, {"form", "cos"}, {"amp", 1.0}}})}}}}}};
    HamiltonianModel m = parse_model(conj);
    CHECK(m.value(0.25, 0.0, 0.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(parse_model({{"family", "nope"}}), ConfigInvalid);
    CHECK_THROWS_AS(parse_model({{"preset", "nope"}}), ConfigInvalid);
}

TEST_CASE("pair parsing: presets, explicit pair, certified conjugated data") {
    auto [a, b] = parse_pair({{"preset", "pair_d1"}});
    CHECK(bracket_defect(a, b) <= 1e-10);
    auto [c, d] = parse_pair({{"preset", "control"}});
    CHECK(bracket_defect(c, d) > 1.0);
    json explicit_pair = {{"first", {{"preset", "free"}}}, {"second", {{"preset", "pendulum"}}}};
    auto [e, f] = parse_pair(explicit_pair);
    CHECK(e.value(0, 1, 0) == doctest::Approx(0.5));
    CHECK(f.value(0, 0, 0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(parse_pair(json::object()), ConfigInvalid);
}

TEST_CASE("scenario validation catches malformed configs") {
    json ok = minimal_config("pair-check");
    CHECK_NOTHROW(parse_scenario(ok));

    json no_grids = ok;
    no_grids.erase("grids");
    CHECK_THROWS_WITH_AS(parse_scenario(no_grids), doctest::Contains("grids"), ConfigInvalid);

    json bad_order = ok;
    bad_order["grids"] = json::array({json::array({64, 8}), json::array({32, 8})});
    CHECK_THROWS_AS(parse_scenario(bad_order), ConfigInvalid);

    json bad_tol = ok;
    bad_tol["tolerances"] = {{"bracket", -1.0}};
    CHECK_THROWS_AS(parse_scenario(bad_tol), ConfigInvalid);

    json no_models = ok;
    no_models.erase("models");
    CHECK_THROWS_WITH_AS(parse_scenario(no_models), doctest::Contains("models"), ConfigInvalid);

    json bad_kind = ok;
    bad_kind["verification"]["kind"] = "theoremX";
    CHECK_THROWS_AS(run_scenario(parse_scenario(bad_kind), false), ConfigInvalid);
}

TEST_CASE("probes are deterministic in the seed") {
    TorusGrid g(32, 8);
    GridFunction a = fourier_probe(g, 0, 42);
    GridFunction b = fourier_probe(g, 0, 42);
    GridFunction c = fourier_probe(g, 0, 43);
    for (int j = 0; j < g.n_q; ++j) CHECK(a[j] == b[j]);
    CHECK(sup_distance(a, c) > 0.0);
}

TEST_CASE("pair-check scenario passes for pair_d1 and flags the control") {
    Scenario sc = parse_scenario(minimal_config("pair-check"));
    Report rep = run_scenario(sc, /*write_artifacts=*/false);
    CHECK(rep.all_pass());

    json control = minimal_config("pair-check");
    control["models"]["pair"] = {{"preset", "control"}};
    control["verification"]["expect_commuting"] = false;
    Report rep2 = run_scenario(parse_scenario(control), false);
    CHECK(rep2.all_pass()); // the control criterion is a separation
}

TEST_CASE("reports are deterministic given config and seed") {
    Scenario sc = parse_scenario(minimal_config("pair-check"));
    Report a = run_scenario(sc, false);
    Report b = run_scenario(sc, false);
    CHECK(a.to_json().dump() == b.to_json().dump());
}

TEST_CASE("alpha scenario on the pendulum reports the analytic value") {
    json cfg = minimal_config("alpha");
    cfg["models"] = {{"single", {{"preset", "pendulum"}}}};
    cfg["grids"] = json::array({json::array({64, 16})});
    cfg["verification"]["expected_alpha"] = 1.0;
    cfg["verification"]["base_slice_check"] = false;
    Report rep = run_scenario(parse_scenario(cfg), false);
    CHECK(rep.all_pass());
    double karp = rep.metrics["h1_64x16"]["karp"].get<double>();
    CHECK(karp == doctest::Approx(1.0).epsilon(5e-3));
}

TEST_CASE("criterion bookkeeping: measured, threshold, direction") {
    Report rep;
    rep.add("upper", 0.5, 1.0);
    rep.add("lower", 2.0, 1.5, true);
    rep.add("broken", 2.0, 1.0);
    CHECK(rep.criteria[0].pass);
    CHECK(rep.criteria[1].pass);
    CHECK_FALSE(rep.criteria[2].pass);
    CHECK_FALSE(rep.all_pass());
    json j = rep.to_json();
    CHECK(j["criteria"].size() == 3);
    CHECK(j["criteria"][1]["comparison"] == ">=");
    CHECK(j["pass"] == false);
}
