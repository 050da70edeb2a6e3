#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "wkam/scenario.hpp"

namespace wkam {

namespace {

std::string grid_label(const TorusGrid& g) {
    return std::to_string(g.n_q) + "x" + std::to_string(g.n_t);
}

bool expect_commuting(const Scenario& sc) {
    return sc.raw.at("verification").value("expect_commuting", true);
}

LaxOleinik make_op(const Scenario& sc, const HamiltonianModel& m, const TorusGrid& g,
                   double alpha) {
    return LaxOleinik(m, g, sc.op_cfg.with_alpha(alpha));
}

// Ratio of successive defects; exact zeros pass any ratio gate.
double safe_ratio(double coarse, double fine) {
    if (fine < 1e-14) return 1e9;
    return coarse / fine;
}

void write_artifact(const Scenario& sc, const SpaceTimeFunction& f, const std::string& name) {
    std::filesystem::create_directories(sc.out_dir);
    write_csv_file(f, sc.out_dir + "/" + name);
}

} // namespace

Report verify_pair_check(const Scenario& sc) {
    Report rep;
    if (!sc.has_pair) throw ConfigInvalid("pair-check needs models.pair");
    double defect = bracket_defect(sc.model1, sc.model2);
    double witness = std::fabs(bracket_value(sc.model1, sc.model2, 0.25, 1.0, 0.0));
    rep.metrics["bracket_defect"] = defect;
    rep.metrics["bracket_at_witness"] = witness;
    if (expect_commuting(sc)) {
        rep.add("bracket_defect", defect, sc.tolerance("bracket", 1e-10));
    } else {
        rep.add("bracket_defect_control", std::max(defect, witness), 1.0, /*at_least=*/true);
    }

    // Tonelli sanity on both members: fiberwise convexity, superlinearity,
    // periodicity in q and t, all on samples.
    for (int which = 1; which <= 2; ++which) {
        const HamiltonianModel& m = (which == 1) ? sc.model1 : sc.model2;
        double min_convex = kBig, per_defect = 0.0, superlin = kBig;
        for (int i = 0; i < 12; ++i)
            for (int jp = 0; jp <= 8; ++jp)
                for (int k = 0; k < 6; ++k) {
                    double q = i / 12.0, p = -2.0 + 0.5 * jp, t = k / 6.0;
                    double d2 = (m.eval(q, p + 1e-5, t).dp - m.eval(q, p - 1e-5, t).dp) / 2e-5;
                    min_convex = std::min(min_convex, d2);
                    per_defect = std::max(per_defect,
                                          std::fabs(m.value(q + 1.0, p, t) - m.value(q, p, t)));
                    per_defect = std::max(per_defect,
                                          std::fabs(m.value(q, p, t + 1.0) - m.value(q, p, t)));
                    superlin = std::min(superlin, std::min(m.value(q, 8.0, t) / 8.0,
                                                           m.value(q, -8.0, t) / 8.0));
                }
        std::string tag = "h" + std::to_string(which);
        rep.add(tag + "_fiberwise_convexity", min_convex, 0.0, true);
        rep.add(tag + "_periodicity", per_defect, 1e-12);
        rep.add(tag + "_superlinearity_probe", superlin, 2.0, true);
    }
    return rep;
}

Report verify_alpha(const Scenario& sc) {
    Report rep;
    std::vector<HamiltonianModel> models{sc.model1};
    if (sc.has_pair) models.push_back(sc.model2);
    const nlohmann::json& v = sc.raw.at("verification");
    for (const auto& grid : sc.grids) {
        for (size_t mi = 0; mi < models.size(); ++mi) {
            std::string tag = "h" + std::to_string(mi + 1) + "_" + grid_label(grid);
            LaxOleinik op = make_op(sc, models[mi], grid, 0.0);
            AlphaEstimate karp = alpha_karp(op.action_kernel(0, grid.n_t));
            AlphaEstimate growth = alpha_growth(op);
            rep.metrics[tag] = {{"karp", karp.value},
                                {"growth", growth.value},
                                {"growth_residual", growth.residual}};
            rep.add(tag + "_methods_agree", std::fabs(karp.value - growth.value),
                    sc.tolerance("alpha_agree", 1e-3), false, grid_label(grid));
            if (v.contains("expected_alpha"))
                rep.add(tag + "_analytic", std::fabs(karp.value - v.at("expected_alpha").get<double>()),
                        sc.tolerance("alpha_value", 5e-3), false, grid_label(grid));
            if (v.value("base_slice_check", true)) {
                double spread = 0.0;
                for (int k = 1; k < grid.n_t; ++k) {
                    AlphaEstimate other = alpha_karp(op.action_kernel(k, grid.n_t));
                    spread = std::max(spread, std::fabs(other.value - karp.value));
                }
                rep.add(tag + "_base_slice_invariance", spread, 1e-12, false, grid_label(grid));
            }
        }
    }
    return rep;
}

Report verify_weak_kam(const Scenario& sc) {
    Report rep;
    const TorusGrid grid = sc.grids.back();
    AlphaEstimate alpha = alpha_karp_for(sc.model1, grid, sc.op_cfg);
    LaxOleinik op = make_op(sc, sc.model1, grid, alpha.value);
    WeakKamSolution sol =
        backward_fixed_point(op, alpha.value, GridFunction(grid, 0, 0.0), sc.wk_opt);
    rep.add("fixed_point_residual", sol.residual, 10.0 * sc.wk_opt.tol, false, grid_label(grid));
    rep.add("boundary_argmin", sol.boundary_hit ? 1.0 : 0.0, 0.0);
    rep.metrics["alpha"] = alpha.value;
    rep.metrics["iterations"] = sol.iterations;
    rep.metrics["anchor"] = sol.anchor_node;
    rep.metrics["residual"] = sol.residual;
    write_artifact(sc, sol.phi, "weak_kam_backward.csv");

    if (sc.has_pair) {
        AlphaEstimate alpha2 = alpha_karp_for(sc.model2, grid, sc.op_cfg);
        LaxOleinik op2 = make_op(sc, sc.model2, grid, alpha2.value);
        double cross = sup_distance(op2.period_backward(sol.slice0()), sol.slice0());
        rep.metrics["cross_residual_h2"] = cross;
    }
    return rep;
}

Report verify_barrier(const Scenario& sc) {
    Report rep;
    const TorusGrid grid = sc.grids.back();
    AlphaEstimate alpha = alpha_karp_for(sc.model1, grid, sc.op_cfg);
    LaxOleinik op = make_op(sc, sc.model1, grid, alpha.value);
    BarrierFamily fam = peierls_barrier(op, alpha.value, sc.barrier_opt);
    AubryMask mask = aubry_mask(fam);
    compute_mask_kernels(fam, op, mask);
    SpaceTimeFunction b = second_barrier(fam);

    double minB = *std::min_element(fam.B.values.begin(), fam.B.values.end());
    double minb = *std::min_element(b.values.begin(), b.values.end());
    double worst_on_mask = 0.0;
    for (int k = 0; k < grid.n_t; ++k)
        for (int j = 0; j < grid.n_q; ++j)
            if (mask.at(k, j)) worst_on_mask = std::max(worst_on_mask, b.at(k, j));
    rep.add("B_nonnegative", -minB, sc.tolerance("barrier_floor", 1e-9), false, grid_label(grid));
    rep.add("b_nonnegative", -minb, sc.tolerance("b_floor", 1e-6), false, grid_label(grid));
    rep.add("b_vanishes_on_mask", worst_on_mask, mask.eps, false, grid_label(grid));
    rep.add("window_drift", fam.drift, sc.barrier_opt.settle_tol, false, grid_label(grid));
    rep.metrics["settled"] = fam.settled;
    rep.metrics["mane_still_decreasing"] = fam.mane_still_decreasing;
    rep.metrics["mask_count"] = mask.count();
    write_artifact(sc, fam.B, "barrier_B.csv");
    write_artifact(sc, b, "barrier_b.csv");
    return rep;
}

Report verify_aubry(const Scenario& sc) {
    Report rep;
    const TorusGrid grid = sc.grids.back();
    AlphaEstimate alpha = alpha_karp_for(sc.model1, grid, sc.op_cfg);
    LaxOleinik op = make_op(sc, sc.model1, grid, alpha.value);
    BarrierFamily fam = peierls_barrier(op, alpha.value, sc.barrier_opt);
    AubryMask mask = aubry_mask(fam);
    compute_mask_kernels(fam, op, mask);
    QuotientMetric qm = quotient_aubry(fam, mask);
    WeakKamSolution sol =
        backward_fixed_point(op, alpha.value, GridFunction(grid, 0, 0.0), sc.wk_opt);
    ExtendedLift lift = extended_lift(mask, sc.model1, alpha.value, op, sol);

    rep.add("mask_nonempty", mask.count(), 1.0, true, grid_label(grid));
    rep.add("lift_energy_identity", lift_hamiltonian_defect(lift, sc.model1, alpha.value), 1e-12,
            false, grid_label(grid));
    rep.add("intra_class_rho", qm.max_intra_rho, 2.0 * mask.eps, false, grid_label(grid));
    rep.metrics["classes"] = qm.class_count();
    rep.metrics["mask_count"] = mask.count();
    rep.metrics["eps"] = mask.eps;
    nlohmann::json diam = nlohmann::json::array();
    for (int c = 0; c < qm.class_count(); ++c) diam.push_back(qm.rho_at(c, c));
    rep.metrics["diameters"] = diam;
    rep.metrics["settled"] = fam.settled;

    std::filesystem::create_directories(sc.out_dir);
    std::ofstream mf(sc.out_dir + "/aubry_mask.csv");
    mf << "k,j,flag\n";
    for (int k = 0; k < grid.n_t; ++k)
        for (int j = 0; j < grid.n_q; ++j) mf << k << ',' << j << ',' << (mask.at(k, j) ? 1 : 0) << '\n';
    std::ofstream lf(sc.out_dir + "/aubry_lifts.csv");
    lf << "q,p,t,kappa\n";
    lf.precision(17);
    for (const auto& pt : lift.points)
        lf << pt.q << ',' << pt.p << ',' << pt.t << ',' << pt.kappa << '\n';
    return rep;
}

Report verify_theorem1(const Scenario& sc) {
    Report rep;
    if (!sc.has_pair) throw ConfigInvalid("theorem1 needs models.pair");
    const int probes = sc.raw.at("verification").value("probes", 5);
    std::vector<double> defects;
    for (const auto& grid : sc.grids) {
        LaxOleinik op1 = make_op(sc, sc.model1, grid, 0.0);
        LaxOleinik op2 = make_op(sc, sc.model2, grid, 0.0);
        const int P = grid.n_t;
        double worst = 0.0;
        for (int pr = 0; pr <= probes; ++pr) {
            GridFunction u = (pr == 0) ? GridFunction(grid, 0, 0.0)
                                       : fourier_probe(grid, 0, sc.seed * 1000003ull + pr);
            // Backward, one period each: H2 on [0,P] then H1 on [P,2P].
            double d1 = sup_distance(op1.backward(op2.backward(u, P), P),
                                     op2.backward(op1.backward(u, P), P));
            // Backward, unequal spans: H2 one period, H1 two.
            double d2 = sup_distance(op1.backward(op2.backward(u, P), 2 * P),
                                     op2.backward(op1.backward(u, 2 * P), P));
            // Forward twin.
            double d3 = sup_distance(op2.forward(op1.forward(u, P), P),
                                     op1.forward(op2.forward(u, P), P));
            // Sub-period spans on the slice lattice: H2 over half a period,
            // H1 over one; the later H2 window starts at the same slice by
            // periodicity.
            double d4 = sup_distance(op1.backward(op2.backward(u, P / 2), P),
                                     op2.backward(op1.backward(u, P), P / 2));
            worst = std::max({worst, d1, d2, d3, d4});
        }
        defects.push_back(worst);
        rep.metrics["defect_" + grid_label(grid)] = worst;
    }
    if (expect_commuting(sc)) {
        for (size_t i = 0; i + 1 < defects.size(); ++i) {
            double r = safe_ratio(defects[i], defects[i + 1]);
            rep.add("ratio_" + grid_label(sc.grids[i]) + "_to_" + grid_label(sc.grids[i + 1]), r,
                    sc.tolerance("ratio_min", 1.5), true, grid_label(sc.grids[i + 1]));
        }
        rep.add("finest_defect", defects.back(), sc.tolerance("theorem1_defect",
                4.0 * sc.grids.back().mesh()), false, grid_label(sc.grids.back()));
    } else {
        rep.add("control_finest_defect", defects.back(),
                sc.tolerance("control_floor", 1e-3), true, grid_label(sc.grids.back()));
    }

    // Identical pair, built as two separate operator instances: the two
    // composition orders collapse to the same substep sequence, so the
    // defect must vanish outright.
    const TorusGrid g0 = sc.grids.front();
    LaxOleinik op_a = make_op(sc, sc.model1, g0, 0.0);
    LaxOleinik op_b = make_op(sc, sc.model1, g0, 0.0);
    GridFunction u0 = fourier_probe(g0, 0, sc.seed);
    double same = sup_distance(op_a.backward(op_b.backward(u0, g0.n_t), g0.n_t),
                               op_b.backward(op_a.backward(u0, g0.n_t), g0.n_t));
    rep.add("identical_pair_defect", same, 0.0, false, grid_label(g0));
    return rep;
}

Report verify_theorem2(const Scenario& sc) {
    Report rep;
    if (!sc.has_pair) throw ConfigInvalid("theorem2 needs models.pair");
    const double C = sc.tolerance("theorem2_C", 2.0);
    std::vector<double> cross_b, cross_f;
    for (const auto& grid : sc.grids) {
        AlphaEstimate a1 = alpha_karp_for(sc.model1, grid, sc.op_cfg);
        AlphaEstimate a2 = alpha_karp_for(sc.model2, grid, sc.op_cfg);
        LaxOleinik op1 = make_op(sc, sc.model1, grid, a1.value);
        LaxOleinik op2 = make_op(sc, sc.model2, grid, a2.value);
        GridFunction zero(grid, 0, 0.0);

        WeakKamSolution u1 = backward_fixed_point(op1, a1.value, zero, sc.wk_opt);
        double rb = sup_distance(op2.period_backward(u1.slice0()), u1.slice0());
        WeakKamSolution f1 = forward_fixed_point(op1, a1.value, zero, sc.wk_opt);
        double rf = sup_distance(op2.period_forward(f1.slice0()), f1.slice0());
        cross_b.push_back(rb);
        cross_f.push_back(rf);
        rep.metrics["cross_backward_" + grid_label(grid)] = rb;
        rep.metrics["cross_forward_" + grid_label(grid)] = rf;

        CommonFixedPoint common = common_fixed_point(op1, op2, sc.wk_opt);
        rep.metrics["common_res_h1_" + grid_label(grid)] = common.residual_h1;
        rep.metrics["common_res_h2_" + grid_label(grid)] = common.residual_h2;
        if (expect_commuting(sc)) {
            rep.add("cross_residual_backward", rb, C * grid.mesh(), false, grid_label(grid));
            rep.add("cross_residual_forward", rf, C * grid.mesh(), false, grid_label(grid));
            rep.add("common_fixed_point_h2", common.residual_h2, 100.0 * sc.wk_opt.tol, false,
                    grid_label(grid));
            rep.add("common_fixed_point_h1", common.residual_h1, C * grid.mesh(), false,
                    grid_label(grid));
        }
    }
    for (size_t i = 0; i + 1 < cross_b.size(); ++i) {
        double r = safe_ratio(cross_b[i], cross_b[i + 1]);
        std::string name = "ratio_" + grid_label(sc.grids[i]) + "_to_" + grid_label(sc.grids[i + 1]);
        if (expect_commuting(sc))
            rep.add(name, r, sc.tolerance("ratio_min", 1.5), true, grid_label(sc.grids[i + 1]));
        else
            rep.add("control_" + name, r, sc.tolerance("control_ratio_max", 1.2), false,
                    grid_label(sc.grids[i + 1]));
    }
    if (!expect_commuting(sc))
        rep.add("control_cross_residual_nonvanishing", cross_b.back(),
                sc.tolerance("control_floor", 1e-2), true, grid_label(sc.grids.back()));
    return rep;
}

Report verify_theorem3(const Scenario& sc) {
    Report rep;
    if (!sc.has_pair) throw ConfigInvalid("theorem3 needs models.pair");
    const double CB = sc.tolerance("theorem3_CB", 1.5);
    const double Cb = sc.tolerance("theorem3_Cb", 3.0);
    std::vector<double> b_diffs, bb_diffs;
    for (const auto& grid : sc.grids) {
        AlphaEstimate a1 = alpha_karp_for(sc.model1, grid, sc.op_cfg);
        AlphaEstimate a2 = alpha_karp_for(sc.model2, grid, sc.op_cfg);
        LaxOleinik op1 = make_op(sc, sc.model1, grid, a1.value);
        LaxOleinik op2 = make_op(sc, sc.model2, grid, a2.value);
        BarrierFamily fam1 = peierls_barrier(op1, a1.value, sc.barrier_opt);
        BarrierFamily fam2 = peierls_barrier(op2, a2.value, sc.barrier_opt);
        double Bdiff = sup_distance(fam1.B, fam2.B);

        AubryMask m1 = aubry_mask(fam1);
        AubryMask m2 = aubry_mask(fam2);
        compute_mask_kernels(fam1, op1, m1);
        compute_mask_kernels(fam2, op2, m2);
        SpaceTimeFunction b1 = second_barrier(fam1);
        SpaceTimeFunction b2 = second_barrier(fam2);
        double bdiff = sup_distance(b1, b2);
        QuotientMetric q1 = quotient_aubry(fam1, m1);
        QuotientMetric q2 = quotient_aubry(fam2, m2);

        b_diffs.push_back(Bdiff);
        bb_diffs.push_back(bdiff);
        rep.metrics["B_diff_" + grid_label(grid)] = Bdiff;
        rep.metrics["b_diff_" + grid_label(grid)] = bdiff;
        rep.metrics["classes_h1_" + grid_label(grid)] = q1.class_count();
        rep.metrics["classes_h2_" + grid_label(grid)] = q2.class_count();

        if (expect_commuting(sc)) {
            rep.add("B_diff", Bdiff, CB * grid.mesh(), false, grid_label(grid));
            rep.add("b_diff", bdiff, Cb * grid.mesh(), false, grid_label(grid));
            rep.add("class_count_equal", std::fabs(q1.class_count() - q2.class_count()), 0.0,
                    false, grid_label(grid));
            if (q1.class_count() == q2.class_count() && q1.class_count() == 1) {
                double eps = std::max(m1.eps, m2.eps);
                rep.add("class_rho_match", std::fabs(q1.rho_at(0, 0) - q2.rho_at(0, 0)), eps,
                        false, grid_label(grid));
            }
        } else {
            rep.add("control_B_gap", Bdiff, sc.tolerance("control_gap", 0.15), true,
                    grid_label(grid));
        }
    }
    if (expect_commuting(sc))
        for (size_t i = 0; i + 1 < b_diffs.size(); ++i) {
            double r = safe_ratio(b_diffs[i], b_diffs[i + 1]);
            rep.add("B_ratio_" + grid_label(sc.grids[i]) + "_to_" + grid_label(sc.grids[i + 1]), r,
                    sc.tolerance("ratio_min", 1.5), true, grid_label(sc.grids[i + 1]));
        }
    return rep;
}

Report verify_theorem4(const Scenario& sc) {
    Report rep;
    if (!sc.has_pair) throw ConfigInvalid("theorem4 needs models.pair");
    const double C = sc.tolerance("theorem4_C", 2.0);
    for (const auto& grid : sc.grids) {
        AlphaEstimate a1 = alpha_karp_for(sc.model1, grid, sc.op_cfg);
        AlphaEstimate a2 = alpha_karp_for(sc.model2, grid, sc.op_cfg);
        LaxOleinik op1 = make_op(sc, sc.model1, grid, a1.value);
        LaxOleinik op2 = make_op(sc, sc.model2, grid, a2.value);
        BarrierFamily fam1 = peierls_barrier(op1, a1.value, sc.barrier_opt);
        BarrierFamily fam2 = peierls_barrier(op2, a2.value, sc.barrier_opt);
        AubryMask m1 = aubry_mask(fam1);
        AubryMask m2 = aubry_mask(fam2);
        MaskDifference md = compare_masks(m1, m2);

        GridFunction zero(grid, 0, 0.0);
        WeakKamSolution s1 = backward_fixed_point(op1, a1.value, zero, sc.wk_opt);
        WeakKamSolution s2 = backward_fixed_point(op2, a2.value, zero, sc.wk_opt);
        ExtendedLift l1 = extended_lift(m1, sc.model1, a1.value, op1, s1);
        ExtendedLift l2 = extended_lift(m2, sc.model2, a2.value, op2, s2);

        rep.add("mask_diff_boundary_only", md.boundary_only ? 0.0 : 1.0, 0.0, false,
                grid_label(grid));
        rep.add("lift_hausdorff", lift_hausdorff(l1, l2), 2.0 * grid.mesh(), false,
                grid_label(grid));
        rep.add("partner_level_h2_on_lift1", lift_hamiltonian_defect(l1, sc.model2, a2.value),
                C * grid.mesh(), false, grid_label(grid));
        rep.add("partner_level_h1_on_lift2", lift_hamiltonian_defect(l2, sc.model1, a1.value),
                C * grid.mesh(), false, grid_label(grid));
        rep.add("lift1_energy_identity", lift_hamiltonian_defect(l1, sc.model1, a1.value), 1e-12,
                false, grid_label(grid));
        rep.metrics["mask_symmetric_difference_" + grid_label(grid)] = md.symmetric_difference;
        rep.metrics["mask_count_h1_" + grid_label(grid)] = m1.count();
        rep.metrics["mask_count_h2_" + grid_label(grid)] = m2.count();
    }
    if (!expect_commuting(sc)) rep.metrics["non_separating_control"] = true;
    return rep;
}

Report verify_flow_check(const Scenario& sc) {
    Report rep;
    if (!sc.has_pair) throw ConfigInvalid("flow-check needs models.pair");
    const bool commuting = expect_commuting(sc);
    FlowConfig fc = sc.flow_cfg;
    ExtendedState x0{0.2, 0.3, 0.0, 0.0};

    double bdef = bracket_defect(sc.model1, sc.model2);
    double witness = std::fabs(bracket_value(sc.model1, sc.model2, 0.25, 1.0, 0.0));
    if (commuting) rep.add("bracket_defect", bdef, sc.tolerance("bracket", 1e-10));
    else rep.add("bracket_witness", witness, 1.0, true);

    double comm = commutation_defect(sc.model1, sc.model2, x0, 0.5, 0.5, fc);
    FlowConfig fc_half = fc;
    fc_half.step = fc.step / 2.0;
    double comm_half = commutation_defect(sc.model1, sc.model2, x0, 0.5, 0.5, fc_half);
    double cons = conservation_defect(sc.model1, sc.model2, x0, 2.0, fc);
    double self = conservation_defect(sc.model1, sc.model1, x0, 2.0, fc);
    rep.metrics["commutation_defect"] = comm;
    rep.metrics["conservation_defect"] = cons;
    rep.add("self_conservation_exact", self, 1e-12);
    if (commuting) {
        rep.add("flow_commutation", comm, sc.tolerance("flow_commutation", 1e-8));
        rep.add("flow_conservation", cons, sc.tolerance("flow_conservation", 1e-8));
        // Richardson ratios are read at coarser steps, where the truncation
        // error still dominates the roundoff floor of these tiny defects.
        FlowConfig fa = fc, fb = fc;
        fa.step = 0.02;
        fb.step = 0.01;
        double ratio_comm = safe_ratio(commutation_defect(sc.model1, sc.model2, x0, 0.5, 0.5, fa),
                                       commutation_defect(sc.model1, sc.model2, x0, 0.5, 0.5, fb));
        double ratio_cons = safe_ratio(conservation_defect(sc.model1, sc.model2, x0, 2.0, fa),
                                       conservation_defect(sc.model1, sc.model2, x0, 2.0, fb));
        rep.metrics["commutation_step_ratio"] = ratio_comm;
        rep.metrics["conservation_step_ratio"] = ratio_cons;
        rep.add("order4_commutation_low", ratio_comm, 12.0, true);
        rep.add("order4_commutation_high", ratio_comm, 20.0, false);
        rep.add("order4_conservation_low", ratio_cons, 12.0, true);
        rep.add("order4_conservation_high", ratio_cons, 20.0, false);
    } else {
        rep.add("control_commutation", comm, sc.tolerance("control_floor", 1e-2), true);
        rep.add("control_conservation", cons, sc.tolerance("control_floor", 1e-2), true);
        double stability = std::fabs(comm - comm_half) / std::max(comm, 1e-30);
        rep.add("control_defect_stable_under_halving", stability, 0.05);
    }

    // Reversibility of the integrator.
    ExtendedState back = flow_endpoint(sc.model1, flow_endpoint(sc.model1, x0, 1.5, fc), -1.5, fc);
    rep.add("flow_reversibility", extended_distance(back, x0), 1e-9);

    std::filesystem::create_directories(sc.out_dir);
    write_trajectory_csv(flow_extended(sc.model1, x0, 2.0, fc), fc.step,
                         sc.out_dir + "/trajectory.csv");

    if (commuting && !sc.grids.empty()) {
        const TorusGrid grid = sc.grids.front();
        AlphaEstimate a1 = alpha_karp_for(sc.model1, grid, sc.op_cfg);
        LaxOleinik op1 = make_op(sc, sc.model1, grid, a1.value);
        BarrierFamily fam = peierls_barrier(op1, a1.value, sc.barrier_opt);
        AubryMask mask = aubry_mask(fam);
        WeakKamSolution sol =
            backward_fixed_point(op1, a1.value, GridFunction(grid, 0, 0.0), sc.wk_opt);
        ExtendedLift lift = extended_lift(mask, sc.model1, a1.value, op1, sol);
        double disp = aubry_invariance_check(sc.model2, lift, 2.0, fc);
        rep.add("aubry_invariance_displacement", disp, 2.0 * grid.mesh(), false,
                grid_label(grid));
    }
    return rep;
}

} // namespace wkam
