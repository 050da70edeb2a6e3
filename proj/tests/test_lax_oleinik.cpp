#include <doctest.h>

#include <cmath>
#include <fstream>

#include "test_util.hpp"
#include "wkam/lax_oleinik.hpp"

using namespace wkam;

namespace {

// Independent oracle: exhaustive minimization over every discrete velocity
// path. Edge costs recomputed here from the model alone (trapezoid of the
// Lagrangian along the straight segment, plus the alpha shift).
double oracle_edge(const HamiltonianModel& m, const TorusGrid& g, int slice, int dep, int cells,
                   double alpha) {
    double v = cells * g.dq() / g.dt();
    int arr = wrap_index(dep + cells, g.n_q);
    double l0 = m.lagrangian(g.node(dep), v, g.slice_time(slice));
    double l1 = m.lagrangian(g.node(arr), v, g.slice_time(slice + 1));
    return g.dt() * (0.5 * (l0 + l1) + alpha);
}

void oracle_paths(const HamiltonianModel& m, const TorusGrid& g, int reach, double alpha,
                  int slice, int node, double cost, int steps_left, std::vector<double>& best) {
    if (steps_left == 0) {
        auto& slot = best[static_cast<size_t>(node)];
        if (cost < slot) slot = cost;
        return;
    }
    for (int c = -reach; c <= reach; ++c)
        oracle_paths(m, g, reach, alpha, slice + 1, wrap_index(node + c, g.n_q),
                     cost + oracle_edge(m, g, slice, node, c, alpha), steps_left - 1, best);
}

OperatorConfig small_cfg() {
    OperatorConfig cfg;
    cfg.n_v = 5; // caps the snapped lattice at 2 cells per substep
    return cfg;
}

} // namespace

TEST_CASE("oracle equivalence: composed steps equal exhaustive path enumeration") {
    TorusGrid g(8, 4);
    OperatorConfig cfg = small_cfg();
    CommutingPair pair = pair_d1();
    const HamiltonianModel models[] = {HamiltonianModel::free_particle(),
                                       HamiltonianModel::pendulum(1.0), pair.h1, pair.h2};
    for (const auto& m : models) {
        LaxOleinik op(m, g, cfg);
        REQUIRE(op.lattice().reach == 2);
        for (int steps : {3, 4, 8}) {
            for (int start = 0; start < g.n_q; ++start) {
                std::vector<double> best(static_cast<size_t>(g.n_q), kBig);
                oracle_paths(m, g, 2, 0.0, 0, start, 0.0, steps, best);
                GridFunction u = GridFunction::big_column(g, 0, start);
                GridFunction got = op.backward(u, steps);
                for (int j = 0; j < g.n_q; ++j)
                    CHECK(got[j] == doctest::Approx(best[static_cast<size_t>(j)]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("backward_step: zero stays zero for the free particle") {
    TorusGrid g(16, 4);
    LaxOleinik op(HamiltonianModel::free_particle(), g, small_cfg());
    GridFunction u(g, 0, 0.0);
    GridFunction v = op.backward_step(u);
    CHECK(v.slice == 1);
    for (int j = 0; j < g.n_q; ++j) CHECK(v[j] == 0.0);
}

TEST_CASE("backward_step: stationary pendulum node pays -dt at the top") {
    TorusGrid g(80, 10); // dt = 0.1
    LaxOleinik op(HamiltonianModel::pendulum(1.0), g, {});
    GridFunction u(g, 0, 0.0);
    GridFunction v = op.backward_step(u);
    CHECK(v[0] == doctest::Approx(-0.1).epsilon(1e-15));
}

TEST_CASE("big column extraction equals kernel rows exactly") {
    TorusGrid g(16, 4);
    LaxOleinik op(HamiltonianModel::pendulum(1.0), g, small_cfg());
    ActionKernel K = op.action_kernel(1, 5);
    for (int i = 0; i < g.n_q; i += 3) {
        GridFunction u = GridFunction::big_column(g, 1, i);
        GridFunction row = op.backward(u, 5);
        for (int j = 0; j < g.n_q; ++j) CHECK(row[j] == K.at(i, j));
    }
}

TEST_CASE("constant equivariance: T(u + 5) = T(u) + 5") {
    TorusGrid g(32, 8);
    LaxOleinik op(HamiltonianModel::forced_pendulum(1.0, 0.5), g, {});
    TestRng rng(19);
    GridFunction u(g, 0);
    for (int j = 0; j < g.n_q; ++j) u[j] = rng.range(-2, 2);
    GridFunction u5 = u;
    for (int j = 0; j < g.n_q; ++j) u5[j] += 5.0;
    GridFunction a = op.backward(u, g.n_t), b = op.backward(u5, g.n_t);
    for (int j = 0; j < g.n_q; ++j) CHECK(b[j] == doctest::Approx(a[j] + 5.0).epsilon(1e-12));
}

TEST_CASE("Markov property: split composition equals direct, bitwise") {
    TorusGrid g(16, 4);
    LaxOleinik op(HamiltonianModel::forced_pendulum(1.0, 0.5), g, small_cfg());
    TestRng rng(29);
    GridFunction u(g, 0);
    for (int j = 0; j < g.n_q; ++j) u[j] = rng.range(-1, 1);
    GridFunction direct = op.backward(u, 2 * g.n_t);
    GridFunction split = op.backward(op.backward(u, g.n_t), g.n_t);
    for (int j = 0; j < g.n_q; ++j) CHECK(direct[j] == split[j]);
}

TEST_CASE("kernel/operator consistency: backward equals min-plus product") {
    TorusGrid g(16, 4);
    CommutingPair pair = pair_d1();
    LaxOleinik op(pair.h1, g, small_cfg());
    ActionKernel K = op.action_kernel(0, g.n_t);
    TestRng rng(31);
    GridFunction u(g, 0);
    for (int j = 0; j < g.n_q; ++j) u[j] = rng.range(-1, 1);
    GridFunction via_kernel = apply_kernel(K, u);
    GridFunction via_op = op.backward(u, g.n_t);
    for (int j = 0; j < g.n_q; ++j)
        CHECK(via_kernel[j] == doctest::Approx(via_op[j]).epsilon(1e-12));
}

TEST_CASE("free particle kernels: zero diagonal and quadratic cost") {
    TorusGrid g(128, 32);
    LaxOleinik op(HamiltonianModel::free_particle(), g, {});
    ActionKernel K = op.action_kernel(0, g.n_t);
    for (int i = 0; i < g.n_q; i += 7) CHECK(K.at(i, i) == 0.0);
    // One period from q=0 to q=1/2: straight line at v = 1/2.
    CHECK(K.at(0, 64) == doctest::Approx(0.125).epsilon(1e-13));
}

TEST_CASE("pendulum kernel: stationary action and alpha shift") {
    TorusGrid g(64, 16);
    LaxOleinik op0(HamiltonianModel::pendulum(1.0), g, {});
    CHECK(op0.action_kernel(0, g.n_t).at(0, 0) == doctest::Approx(-1.0).epsilon(1e-13));
    OperatorConfig cfg1;
    cfg1.alpha_shift = 1.0;
    LaxOleinik op1(HamiltonianModel::pendulum(1.0), g, cfg1);
    CHECK(op1.action_kernel(0, g.n_t).at(0, 0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
}

TEST_CASE("minplus_product: 2x2 example enumerated by hand") {
    std::vector<double> A{0, 5, 1, 3};
    std::vector<double> C = minplus_product(A, A, 2);
    CHECK(C[0] == 0);
    CHECK(C[1] == 5);
    CHECK(C[2] == 1);
    CHECK(C[3] == 6);
}

TEST_CASE("identity kernel is neutral for composition") {
    TorusGrid g(16, 4);
    LaxOleinik op(HamiltonianModel::pendulum(1.0), g, small_cfg());
    ActionKernel K = op.action_kernel(2, 3);
    ActionKernel I_left = ActionKernel::identity(g, 2);
    ActionKernel I_right = ActionKernel::identity(g, K.end_slice());
    ActionKernel L = minplus_compose(I_left, K);
    ActionKernel R = minplus_compose(K, I_right);
    for (int i = 0; i < g.n_q; ++i)
        for (int j = 0; j < g.n_q; ++j) {
            CHECK(L.at(i, j) == K.at(i, j));
            CHECK(R.at(i, j) == K.at(i, j));
        }
}

TEST_CASE("kernel composition: associativity and slice bookkeeping") {
    TorusGrid g(16, 4);
    LaxOleinik op(HamiltonianModel::forced_pendulum(1.0, 0.5), g, small_cfg());
    ActionKernel K1 = op.action_kernel(0, 2), K2 = op.action_kernel(2, 3),
                 K3 = op.action_kernel(1, 4);
    ActionKernel left = minplus_compose(minplus_compose(K1, K2), K3);
    ActionKernel right = minplus_compose(K1, minplus_compose(K2, K3));
    CHECK(left.steps == 9);
    CHECK(left.end_slice() == 1);
    for (int i = 0; i < g.n_q; ++i)
        for (int j = 0; j < g.n_q; ++j)
            CHECK(left.at(i, j) == doctest::Approx(right.at(i, j)).epsilon(1e-12));
    CHECK_THROWS_AS(minplus_compose(K1, K1), SliceMismatch);
}

TEST_CASE("contraction and order preservation of the backward operator") {
    TorusGrid g(32, 8);
    LaxOleinik op(HamiltonianModel::forced_pendulum(1.0, 0.5), g, {});
    TestRng rng(37);
    for (int trial = 0; trial < 5; ++trial) {
        GridFunction u1(g, 0), u2(g, 0);
        for (int j = 0; j < g.n_q; ++j) {
            u1[j] = rng.range(-2, 2);
            u2[j] = rng.range(-2, 2);
        }
        GridFunction t1 = op.backward(u1, g.n_t), t2 = op.backward(u2, g.n_t);
        CHECK(sup_distance(t1, t2) <= sup_distance(u1, u2) + 1e-13);

        GridFunction lo = u1, hi = u1;
        for (int j = 0; j < g.n_q; ++j) hi[j] += rng.unit();
        GridFunction tlo = op.backward(lo, 3), thi = op.backward(hi, 3);
        for (int j = 0; j < g.n_q; ++j) CHECK(tlo[j] <= thi[j]); // monotone rounding: exact
    }
}

TEST_CASE("forward operator: zero data, monotonicity") {
    TorusGrid g(32, 8);
    LaxOleinik op(HamiltonianModel::free_particle(), g, {});
    GridFunction u(g, 0, 0.0);
    GridFunction v = op.forward(u, g.n_t);
    for (int j = 0; j < g.n_q; ++j) CHECK(v[j] == 0.0); // stay-put curve is optimal

    TestRng rng(41);
    LaxOleinik opp(HamiltonianModel::pendulum(1.0), g, {});
    GridFunction a(g, 0), b(g, 0);
    for (int j = 0; j < g.n_q; ++j) {
        a[j] = rng.range(-1, 1);
        b[j] = a[j] + rng.unit();
    }
    GridFunction fa = opp.forward(a, 5), fb = opp.forward(b, 5);
    for (int j = 0; j < g.n_q; ++j) CHECK(fa[j] <= fb[j]);
}

TEST_CASE("duality: forward equals mirrored negated backward of the mirror model") {
    TorusGrid g(32, 8);
    CommutingPair pair = pair_d1();
    for (const HamiltonianModel* m : {&pair.h1, &pair.h2}) {
        OperatorConfig cfg;
        cfg.alpha_shift = 0.25; // duality must hold with normalization too
        LaxOleinik op(*m, g, cfg);
        LaxOleinik op_mirror(m->mirrored(), g, cfg);
        TestRng rng(43);
        for (int k2 : {0, 3}) {
            GridFunction u(g, k2);
            for (int j = 0; j < g.n_q; ++j) u[j] = rng.range(-1, 1);
            const int n = 5;
            GridFunction fwd = op.forward(u, n);
            GridFunction w(g, wrap_index(g.n_t - k2, g.n_t));
            for (int j = 0; j < g.n_q; ++j) w[j] = -u[j];
            GridFunction bwd = op_mirror.backward(w, n);
            for (int j = 0; j < g.n_q; ++j)
                CHECK(fwd[j] == doctest::Approx(-bwd[j]).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("boundary argmin raises the flag") {
    TorusGrid g(32, 8);
    OperatorConfig cfg;
    cfg.n_v = 5; // reach 2, max speed 0.5
    cfg.v_max = 0.6;
    LaxOleinik op(HamiltonianModel::free_particle(), g, cfg);
    // Steep ramp: the best source is as far left as the lattice allows.
    GridFunction u(g, 0);
    for (int j = 0; j < g.n_q; ++j) u[j] = 10.0 * g.node(j);
    StepResult res = op.backward_step_traced(u);
    CHECK(res.boundary_hit);
    GridFunction flat(g, 0, 0.0);
    CHECK_FALSE(op.backward_step_traced(flat).boundary_hit);
}

TEST_CASE("non-snapped lattice keeps contraction and monotonicity") {
    TorusGrid g(32, 8);
    OperatorConfig cfg;
    cfg.snap_to_grid = false;
    cfg.n_v = 41;
    LaxOleinik op(HamiltonianModel::pendulum(1.0), g, cfg);
    TestRng rng(47);
    GridFunction u1(g, 0), u2(g, 0);
    for (int j = 0; j < g.n_q; ++j) {
        u1[j] = rng.range(-1, 1);
        u2[j] = u1[j] + rng.unit();
    }
    GridFunction t1 = op.backward(u1, 4), t2 = op.backward(u2, 4);
    CHECK(sup_distance(t1, t2) <= sup_distance(u1, u2) + 1e-13);
    for (int j = 0; j < g.n_q; ++j) CHECK(t1[j] <= t2[j] + 1e-15);
    CHECK_THROWS_AS(op.action_kernel(0, 4), ConfigInvalid);
}

TEST_CASE("kernel csv emit carries the discretization sidecar") {
    TorusGrid g(16, 4);
    LaxOleinik op(HamiltonianModel::pendulum(1.0), g, small_cfg());
    ActionKernel K = op.action_kernel(1, 4);
    std::string csv = "/tmp/wkam_test_kernel.csv", side = "/tmp/wkam_test_kernel.json";
    write_kernel_csv(K, csv, side);
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "i,j,value");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == g.n_q * g.n_q);
    std::ifstream sin(side);
    std::string sidecar((std::istreambuf_iterator<char>(sin)), std::istreambuf_iterator<char>());
    CHECK(sidecar.find("\"N_q\": 16") != std::string::npos);
    CHECK(sidecar.find("\"k1\": 1") != std::string::npos);
    CHECK(sidecar.find("\"m\": 4") != std::string::npos);
}

TEST_CASE("lattice construction rules") {
    TorusGrid g(128, 32);
    OperatorConfig cfg;
    VelocityLattice lat = make_velocity_lattice(cfg, g);
    CHECK(lat.reach == 12); // floor(3 * 128 / 32)
    CHECK(lat.size() == 25);
    CHECK(lat.velocities[static_cast<size_t>(lat.center())] == 0.0);
    CHECK(lat.max_speed() == doctest::Approx(3.0));
    cfg.n_v = 4;
    CHECK_THROWS_AS(make_velocity_lattice(cfg, g), ConfigInvalid);
}
