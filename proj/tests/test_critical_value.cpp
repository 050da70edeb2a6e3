#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "wkam/critical_value.hpp"

using namespace wkam;

TEST_CASE("min_mean_cycle: 2x2 example, all cycles enumerated by hand") {
    // cycles: self loops 2 and 3, two-cycle (5+1)/2 = 3 -> minimum 2
    std::vector<double> w{2, 5, 1, 3};
    CHECK(min_mean_cycle(w, 2) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("alpha_karp: free particle is exactly zero") {
    TorusGrid g(64, 16);
    AlphaEstimate a = alpha_karp_for(HamiltonianModel::free_particle(), g, {});
    CHECK(std::fabs(a.value) <= 1e-6);
    CHECK(a.method == "karp");
}

TEST_CASE("alpha_karp: pendulum critical value is max of the potential") {
    TorusGrid g(128, 32);
    AlphaEstimate a = alpha_karp_for(HamiltonianModel::pendulum(1.0), g, {});
    CHECK(a.value == doctest::Approx(1.0).epsilon(5e-3));
}

TEST_CASE("alpha_karp: conjugated pair members sit at h_i(0) + mean g") {
    TorusGrid g(128, 32);
    CommutingPair pair = pair_d1();
    CHECK(std::fabs(alpha_karp_for(pair.h1, g, {}).value) <= 5e-3);
    CHECK(std::fabs(alpha_karp_for(pair.h2, g, {}).value) <= 5e-3);
}

TEST_CASE("entrywise shift of the kernel shifts alpha exactly") {
    TorusGrid g(32, 8);
    LaxOleinik op(HamiltonianModel::pendulum(1.0), g, {});
    ActionKernel K = op.action_kernel(0, g.n_t);
    AlphaEstimate base = alpha_karp(K);
    ActionKernel shifted = K;
    for (auto& x : shifted.a) x += 0.37;
    AlphaEstimate moved = alpha_karp(shifted);
    CHECK(moved.value == doctest::Approx(base.value - 0.37).epsilon(1e-12));
}

TEST_CASE("shift covariance: H + c raises alpha by c") {
    TorusGrid g(64, 16);
    AlphaEstimate base = alpha_karp_for(HamiltonianModel::pendulum(1.0), g, {});
    AlphaEstimate moved = alpha_karp_for(HamiltonianModel::pendulum(1.0).shifted(0.4), g, {});
    CHECK(moved.value == doctest::Approx(base.value + 0.4).epsilon(1e-12));
}

TEST_CASE("base slice invariance of the karp estimate") {
    TorusGrid g(32, 8);
    CommutingPair pair = pair_d1();
    LaxOleinik op(pair.h1, g, {});
    double ref = alpha_karp(op.action_kernel(0, g.n_t)).value;
    for (int k = 1; k < g.n_t; ++k)
        CHECK(alpha_karp(op.action_kernel(k, g.n_t)).value ==
              doctest::Approx(ref).epsilon(1e-12).scale(1.0));
}

TEST_CASE("growth estimator agrees with karp on built-in models") {
    TorusGrid g(64, 16);
    CommutingPair pair = pair_d1();
    const HamiltonianModel models[] = {HamiltonianModel::free_particle(),
                                       HamiltonianModel::pendulum(1.0), pair.h1};
    for (const auto& m : models) {
        LaxOleinik op(m, g, {});
        AlphaEstimate karp = alpha_karp(op.action_kernel(0, g.n_t));
        AlphaEstimate growth = alpha_growth(op);
        CHECK(std::fabs(karp.value - growth.value) <= 1e-3);
        CHECK(growth.method == "growth");
    }
}

TEST_CASE("alpha_karp input validation") {
    TorusGrid g(32, 8);
    LaxOleinik op(HamiltonianModel::pendulum(1.0), g, {});
    CHECK_THROWS_AS(alpha_karp(op.action_kernel(0, g.n_t - 1)), ConfigInvalid);

    OperatorConfig shifted;
    shifted.alpha_shift = 1.0;
    LaxOleinik opn(HamiltonianModel::pendulum(1.0), g, shifted);
    CHECK_THROWS_AS(alpha_karp(opn.action_kernel(0, g.n_t)), ConfigInvalid);

    // Reach too small to wrap within one period: unreachable entries.
    TorusGrid wide(64, 4);
    OperatorConfig tiny;
    tiny.n_v = 5;
    LaxOleinik opt(HamiltonianModel::free_particle(), wide, tiny);
    CHECK_THROWS_AS(alpha_karp(opt.action_kernel(0, wide.n_t)), NonFiniteKernel);
}

TEST_CASE("growth estimator option validation") {
    TorusGrid g(32, 8);
    LaxOleinik op(HamiltonianModel::free_particle(), g, {});
    GrowthOptions bad;
    bad.n_periods = 12;
    bad.burn_in = 10;
    CHECK_THROWS_AS(alpha_growth(op, bad), ConfigInvalid);
}
