#include "wkam/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "wkam/parallel.hpp"

namespace wkam {

int AubryMask::count() const {
    int c = 0;
    for (auto m : mask) c += (m != 0);
    return c;
}

std::vector<int> AubryMask::flat_nodes() const {
    std::vector<int> out;
    for (size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) out.push_back(static_cast<int>(i));
    return out;
}

namespace {

// Diagonal window-min pass for one start slice: evolves the full kernel
// matrix from slice k1 and folds the n-period diagonals into B.
void barrier_pass_slice(const LaxOleinik& op, int k1, const BarrierOptions& opt,
                        std::vector<double>& B_out, double& drift_out, bool parallel_rows) {
    const TorusGrid& g = op.grid();
    const int nq = g.n_q;
    std::vector<std::vector<double>> rows(static_cast<size_t>(nq));
    for (int i = 0; i < nq; ++i) {
        rows[static_cast<size_t>(i)].assign(static_cast<size_t>(nq), kBig);
        rows[static_cast<size_t>(i)][static_cast<size_t>(i)] = 0.0;
    }
    std::vector<double> best(static_cast<size_t>(nq), kBig);
    std::vector<double> prev_best;
    auto evolve_one_period = [&](int n_done) {
        auto work = [&](int i) {
            auto& r = rows[static_cast<size_t>(i)];
            for (int s = 0; s < g.n_t; ++s) op.evolve_row(r, k1 + n_done * g.n_t + s);
        };
        if (parallel_rows) parallel_for(nq, work);
        else for (int i = 0; i < nq; ++i) work(i);
    };
    for (int n = 1; n <= opt.n_max; ++n) {
        evolve_one_period(n - 1);
        if (n < opt.n_min) continue;
        if (n == opt.n_max) prev_best = best;
        for (int i = 0; i < nq; ++i)
            best[static_cast<size_t>(i)] =
                std::min(best[static_cast<size_t>(i)], rows[static_cast<size_t>(i)][static_cast<size_t>(i)]);
    }
    double drift = 0.0;
    if (opt.n_max > opt.n_min)
        for (int i = 0; i < nq; ++i)
            drift = std::max(drift, prev_best[static_cast<size_t>(i)] - best[static_cast<size_t>(i)]);
    B_out = best;
    drift_out = drift;
}

} // namespace

BarrierFamily peierls_barrier(const LaxOleinik& op, double alpha, const BarrierOptions& opt) {
    if (op.config().alpha_shift != alpha)
        throw ConfigInvalid("peierls_barrier: operator alpha_shift != alpha");
    if (opt.n_min < 1 || opt.n_max < opt.n_min)
        throw ConfigInvalid("peierls_barrier: need n_max >= n_min >= 1");
    const TorusGrid& g = op.grid();
    BarrierFamily fam;
    fam.grid = g;
    fam.alpha = alpha;
    fam.opt = opt;
    fam.B = SpaceTimeFunction(g);

    if (!op.model().time_dependent()) {
        // Autonomous: every start slice sees the same kernel; compute one
        // slice with row parallelism and broadcast.
        std::vector<double> B0;
        double drift = 0.0;
        barrier_pass_slice(op, 0, opt, B0, drift, /*parallel_rows=*/true);
        for (int k = 0; k < g.n_t; ++k)
            for (int j = 0; j < g.n_q; ++j) fam.B.at(k, j) = B0[static_cast<size_t>(j)];
        fam.drift = drift;
    } else {
        std::vector<std::vector<double>> B_slices(static_cast<size_t>(g.n_t));
        std::vector<double> drifts(static_cast<size_t>(g.n_t), 0.0);
        parallel_for(g.n_t, [&](int k1) {
            barrier_pass_slice(op, k1, opt, B_slices[static_cast<size_t>(k1)],
                               drifts[static_cast<size_t>(k1)], false);
        });
        for (int k = 0; k < g.n_t; ++k)
            for (int j = 0; j < g.n_q; ++j) fam.B.at(k, j) = B_slices[static_cast<size_t>(k)][static_cast<size_t>(j)];
        fam.drift = *std::max_element(drifts.begin(), drifts.end());
    }
    fam.settled = fam.drift <= opt.settle_tol;
    if (!fam.settled && opt.strict_settle)
        throw WindowNotSettled("peierls_barrier: window drift " + std::to_string(fam.drift));
    return fam;
}

AubryMask aubry_mask(const SpaceTimeFunction& B, double eps) {
    AubryMask m;
    m.grid = B.grid;
    m.eps = eps;
    m.mask.assign(B.values.size(), 0);
    int count = 0;
    for (size_t i = 0; i < B.values.size(); ++i)
        if (B.values[i] <= eps) {
            m.mask[i] = 1;
            ++count;
        }
    if (count == 0)
        throw EmptyMask("aubry_mask: no node with barrier <= " + std::to_string(eps));
    return m;
}

AubryMask aubry_mask(const BarrierFamily& family) {
    return aubry_mask(family.B, family.opt.eps_factor * family.grid.mesh());
}

namespace {

std::vector<int> pick_representatives(const AubryMask& mask, int cap) {
    std::vector<int> nodes = mask.flat_nodes();
    if (static_cast<int>(nodes.size()) <= cap) return nodes;
    std::vector<int> reps;
    double stride = static_cast<double>(nodes.size()) / cap;
    for (int r = 0; r < cap; ++r)
        reps.push_back(nodes[static_cast<size_t>(r * stride)]);
    return reps;
}

} // namespace

void compute_mask_kernels(BarrierFamily& fam, const LaxOleinik& op, const AubryMask& mask) {
    const TorusGrid& g = op.grid();
    const int nq = g.n_q, nt = g.n_t;
    const int total = nq * nt;
    fam.reps = pick_representatives(mask, fam.opt.rep_cap);
    const int R = static_cast<int>(fam.reps.size());
    fam.h_from_rep.assign(static_cast<size_t>(R), {});
    fam.h_to_rep.assign(static_cast<size_t>(R), {});
    fam.mane_from_rep.assign(static_cast<size_t>(R), {});
    const int n_min = fam.opt.n_min, n_max = fam.opt.n_max;
    const int total_steps = n_max * nt + (nt - 1);
    std::vector<std::uint8_t> decreasing(static_cast<size_t>(R), 0);

    parallel_for(R, [&](int r) {
        const int flat = fam.reps[static_cast<size_t>(r)];
        const int k0 = flat / nq, j0 = flat % nq;

        // Forward rows: running window minima over horizons r + n*nt.
        std::vector<double> row(static_cast<size_t>(nq), kBig);
        row[static_cast<size_t>(j0)] = 0.0;
        std::vector<double> h(static_cast<size_t>(total), kBig);
        std::vector<double> mane(static_cast<size_t>(total), kBig);
        std::vector<double> mane_prev;
        for (int s = 1; s <= total_steps; ++s) {
            op.evolve_row(row, k0 + s - 1);
            int end_slice = wrap_index(k0 + s, nt);
            int periods = s / nt;
            if (s == total_steps - nt + 1) mane_prev = mane; // one period before the end
            for (int j = 0; j < nq; ++j) {
                double v = row[static_cast<size_t>(j)];
                size_t idx = static_cast<size_t>(end_slice) * nq + static_cast<size_t>(j);
                if (v < mane[idx]) mane[idx] = v;
                if (periods >= n_min && v < h[idx]) h[idx] = v;
            }
        }
        double dec = 0.0;
        for (size_t i = 0; i < mane.size(); ++i)
            if (!is_unreachable(mane_prev[i]))
                dec = std::max(dec, mane_prev[i] - mane[i]);
        decreasing[static_cast<size_t>(r)] = dec > fam.opt.settle_tol;

        // Adjoint columns: cost from x into the representative.
        std::vector<double> col(static_cast<size_t>(nq), kBig);
        col[static_cast<size_t>(j0)] = 0.0;
        std::vector<double> hc(static_cast<size_t>(total), kBig);
        for (int s = 1; s <= total_steps; ++s) {
            op.evolve_row_adjoint(col, k0 - s);
            int start_slice = wrap_index(k0 - s, nt);
            int periods = s / nt;
            if (periods < n_min) continue;
            for (int j = 0; j < nq; ++j) {
                double v = col[static_cast<size_t>(j)];
                size_t idx = static_cast<size_t>(start_slice) * nq + static_cast<size_t>(j);
                if (v < hc[idx]) hc[idx] = v;
            }
        }
        fam.h_from_rep[static_cast<size_t>(r)] = std::move(h);
        fam.h_to_rep[static_cast<size_t>(r)] = std::move(hc);
        fam.mane_from_rep[static_cast<size_t>(r)] = std::move(mane);
    });
    fam.mane_still_decreasing =
        std::any_of(decreasing.begin(), decreasing.end(), [](std::uint8_t d) { return d != 0; });
}

SpaceTimeFunction second_barrier(const BarrierFamily& fam) {
    if (fam.reps.empty()) throw EmptyMask("second_barrier: mask kernels not computed");
    const TorusGrid& g = fam.grid;
    const int total = g.n_q * g.n_t;
    const int R = static_cast<int>(fam.reps.size());
    SpaceTimeFunction b(g, kBig);
    parallel_for(total, [&](int x) {
        double best = kBig;
        for (int r = 0; r < R; ++r) {
            double in = fam.h_from_rep[static_cast<size_t>(r)][static_cast<size_t>(x)];
            if (is_unreachable(in)) continue;
            for (int s = 0; s < R; ++s) {
                double out = fam.h_to_rep[static_cast<size_t>(s)][static_cast<size_t>(x)];
                if (is_unreachable(out)) continue;
                double cand = in + out - fam.h_rep_rep(r, s);
                if (cand < best) best = cand;
            }
        }
        b.values[static_cast<size_t>(x)] = best;
    });
    return b;
}

QuotientMetric quotient_aubry(const BarrierFamily& fam, const AubryMask& mask) {
    if (fam.reps.empty()) throw EmptyMask("quotient_aubry: mask kernels not computed");
    const int R = static_cast<int>(fam.reps.size());
    const double link = 2.0 * mask.eps;

    // Union-find over representatives.
    std::vector<int> parent(static_cast<size_t>(R));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    };
    for (int r = 0; r < R; ++r)
        for (int s = r + 1; s < R; ++s)
            if (fam.rho(r, s) <= link) {
                int a = find(r), b = find(s);
                if (a != b) parent[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
            }

    QuotientMetric qm;
    std::vector<int> root_to_class(static_cast<size_t>(R), -1);
    qm.rep_class.assign(static_cast<size_t>(R), -1);
    std::vector<int> class_rep_index;
    for (int r = 0; r < R; ++r) {
        int root = find(r);
        if (root_to_class[static_cast<size_t>(root)] < 0) {
            root_to_class[static_cast<size_t>(root)] = static_cast<int>(qm.class_reps.size());
            qm.class_reps.push_back(fam.reps[static_cast<size_t>(root)]);
            class_rep_index.push_back(root);
        }
        qm.rep_class[static_cast<size_t>(r)] = root_to_class[static_cast<size_t>(root)];
    }
    const int C = qm.class_count();
    qm.rho.assign(static_cast<size_t>(C) * C, 0.0);
    for (int a = 0; a < C; ++a)
        for (int b = 0; b < C; ++b)
            qm.rho[static_cast<size_t>(a) * C + b] =
                fam.rho(class_rep_index[static_cast<size_t>(a)], class_rep_index[static_cast<size_t>(b)]);
    for (int r = 0; r < R; ++r)
        for (int s = 0; s < R; ++s)
            if (qm.rep_class[static_cast<size_t>(r)] == qm.rep_class[static_cast<size_t>(s)])
                qm.max_intra_rho = std::max(qm.max_intra_rho, fam.rho(r, s));
    return qm;
}

FullKernelFamily full_kernel_family(const LaxOleinik& op, int n_lo, int n_hi,
                                    bool from_zero_horizon, double settle_tol) {
    const TorusGrid& g = op.grid();
    const int nq = g.n_q, nt = g.n_t;
    const int total = nq * nt;
    if (total > 4096)
        throw ConfigInvalid("full_kernel_family: grid too large for full pairwise storage");
    if (n_hi < 1 || (!from_zero_horizon && n_lo < 1))
        throw ConfigInvalid("full_kernel_family: need n_hi >= n_lo >= 1");
    FullKernelFamily fam;
    fam.grid = g;
    fam.h.assign(static_cast<size_t>(total) * total, kBig);
    const int total_steps = n_hi * nt + (nt - 1);
    std::vector<std::uint8_t> dec(static_cast<size_t>(total), 0);
    std::vector<double> drifts(static_cast<size_t>(total), 0.0);

    parallel_for(total, [&](int from) {
        const int k0 = from / nq, j0 = from % nq;
        std::vector<double> row(static_cast<size_t>(nq), kBig);
        row[static_cast<size_t>(j0)] = 0.0;
        double* h = &fam.h[static_cast<size_t>(from) * total];
        std::vector<double> snapshot;
        for (int s = 1; s <= total_steps; ++s) {
            op.evolve_row(row, k0 + s - 1);
            int end_slice = wrap_index(k0 + s, nt);
            int periods = s / nt;
            if (s == total_steps - nt + 1)
                snapshot.assign(h, h + total);
            bool record = from_zero_horizon ? true : (periods >= n_lo);
            if (!record) continue;
            for (int j = 0; j < nq; ++j) {
                double v = row[static_cast<size_t>(j)];
                size_t idx = static_cast<size_t>(end_slice) * nq + static_cast<size_t>(j);
                if (v < h[idx]) h[idx] = v;
            }
        }
        double d = 0.0;
        for (int i = 0; i < total; ++i)
            if (!is_unreachable(snapshot[static_cast<size_t>(i)]))
                d = std::max(d, snapshot[static_cast<size_t>(i)] - h[i]);
        drifts[static_cast<size_t>(from)] = d;
        dec[static_cast<size_t>(from)] = d > settle_tol;
    });
    fam.drift = *std::max_element(drifts.begin(), drifts.end());
    fam.still_decreasing = std::any_of(dec.begin(), dec.end(), [](std::uint8_t x) { return x != 0; });
    return fam;
}

ManeRow mane_potential_row(const LaxOleinik& op, int start_k, int start_j, int n_max,
                           double settle_tol) {
    const TorusGrid& g = op.grid();
    const int nq = g.n_q, nt = g.n_t;
    ManeRow out;
    out.values.assign(static_cast<size_t>(nq) * nt, kBig);
    std::vector<double> row(static_cast<size_t>(nq), kBig);
    row[static_cast<size_t>(wrap_index(start_j, nq))] = 0.0;
    const int total_steps = n_max * nt + (nt - 1);
    std::vector<double> prev;
    for (int s = 1; s <= total_steps; ++s) {
        op.evolve_row(row, start_k + s - 1);
        int end_slice = wrap_index(start_k + s, nt);
        if (s == total_steps - nt + 1) prev = out.values;
        for (int j = 0; j < nq; ++j) {
            double v = row[static_cast<size_t>(j)];
            size_t idx = static_cast<size_t>(end_slice) * nq + static_cast<size_t>(j);
            if (v < out.values[idx]) out.values[idx] = v;
        }
    }
    double dec = 0.0;
    for (size_t i = 0; i < out.values.size(); ++i)
        if (!is_unreachable(prev[i])) dec = std::max(dec, prev[i] - out.values[i]);
    out.still_decreasing = dec > settle_tol;
    return out;
}

ExtendedLift extended_lift(const AubryMask& mask, const HamiltonianModel& model, double alpha,
                           const LaxOleinik& op, const WeakKamSolution& calibrated) {
    const TorusGrid& g = mask.grid;
    ExtendedLift lift;
    lift.alpha = alpha;
    // Incoming calibrated velocity at slice k comes from the traced substep
    // landing there from slice k-1.
    std::vector<std::vector<int>> argmins(static_cast<size_t>(g.n_t));
    for (int k = 0; k < g.n_t; ++k) {
        StepResult step = op.backward_step_traced(calibrated.phi.slice(wrap_index(k - 1, g.n_t)));
        argmins[static_cast<size_t>(k)] = step.argmin_v;
    }
    const auto& lat = op.lattice();
    for (int k = 0; k < g.n_t; ++k)
        for (int j = 0; j < g.n_q; ++j) {
            if (!mask.at(k, j)) continue;
            double q = g.node(j), t = g.slice_time(k);
            double v = lat.velocities[static_cast<size_t>(argmins[static_cast<size_t>(k)][static_cast<size_t>(j)])];
            double p = model.legendre(q, v, t).p_star;
            double kappa = alpha - model.value(q, p, t);
            lift.points.push_back({q, p, t, kappa, k, j});
        }
    return lift;
}

double lift_hamiltonian_defect(const ExtendedLift& lift, const HamiltonianModel& h2,
                               double alpha2) {
    double worst = 0.0;
    for (const auto& pt : lift.points)
        worst = std::max(worst, std::fabs(pt.kappa + h2.value(pt.q, pt.p, pt.t) - alpha2));
    return worst;
}

namespace {

double product_metric(const LiftPoint& a, const LiftPoint& b) {
    return circle_dist(a.q, b.q) + std::fabs(a.p - b.p) + circle_dist(a.t, b.t) +
           std::fabs(a.kappa - b.kappa);
}

double one_sided_hausdorff(const ExtendedLift& a, const ExtendedLift& b) {
    double worst = 0.0;
    for (const auto& pa : a.points) {
        double best = kBig;
        for (const auto& pb : b.points) best = std::min(best, product_metric(pa, pb));
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace

double lift_hausdorff(const ExtendedLift& a, const ExtendedLift& b) {
    return std::max(one_sided_hausdorff(a, b), one_sided_hausdorff(b, a));
}

MaskDifference compare_masks(const AubryMask& a, const AubryMask& b) {
    if (a.grid != b.grid) throw ShapeMismatch("compare_masks: grids differ");
    const TorusGrid& g = a.grid;
    MaskDifference diff;
    auto touches = [&](const AubryMask& m, int k, int j) {
        for (int dk = -1; dk <= 1; ++dk)
            for (int dj = -1; dj <= 1; ++dj)
                if (m.at(k + dk, j + dj)) return true;
        return false;
    };
    for (int k = 0; k < g.n_t; ++k)
        for (int j = 0; j < g.n_q; ++j) {
            if (a.at(k, j) == b.at(k, j)) continue;
            ++diff.symmetric_difference;
            if (!(touches(a, k, j) && touches(b, k, j))) diff.boundary_only = false;
        }
    return diff;
}

} // namespace wkam
