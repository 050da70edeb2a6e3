#include "wkam/lax_oleinik.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "wkam/parallel.hpp"

namespace wkam {

VelocityLattice make_velocity_lattice(const OperatorConfig& cfg, const TorusGrid& grid) {
    if (cfg.n_v < 5 || cfg.n_v % 2 == 0)
        throw ConfigInvalid("OperatorConfig: n_v must be odd and >= 5");
    if (cfg.v_max <= 0.0) throw ConfigInvalid("OperatorConfig: v_max must be positive");
    VelocityLattice lat;
    lat.snapped = cfg.snap_to_grid;
    if (cfg.snap_to_grid) {
        double cell_speed = grid.dq() / grid.dt(); // speed that moves one cell per substep
        int reach_v = static_cast<int>(std::floor(cfg.v_max / cell_speed + 1e-12));
        int reach_cap = (cfg.n_v - 1) / 2;
        lat.reach = std::max(2, std::min(reach_v, reach_cap));
        for (int m = -lat.reach; m <= lat.reach; ++m)
            lat.velocities.push_back(m * cell_speed);
    } else {
        lat.reach = 0;
        for (int i = 0; i < cfg.n_v; ++i)
            lat.velocities.push_back(-cfg.v_max + 2.0 * cfg.v_max * i / (cfg.n_v - 1));
    }
    return lat;
}

ActionKernel ActionKernel::identity(const TorusGrid& g, int slice, double alpha) {
    ActionKernel k(g, slice, 0, alpha);
    k.steps = 0;
    for (int i = 0; i < g.n_q; ++i) k.at(i, i) = 0.0;
    return k;
}

std::vector<double> minplus_product(const std::vector<double>& A, const std::vector<double>& B,
                                    int n) {
    std::vector<double> C(static_cast<size_t>(n) * n, kBig);
    for (int i = 0; i < n; ++i) {
        const double* arow = &A[static_cast<size_t>(i) * n];
        double* crow = &C[static_cast<size_t>(i) * n];
        for (int m = 0; m < n; ++m) {
            double am = arow[m];
            if (is_unreachable(am)) continue;
            const double* brow = &B[static_cast<size_t>(m) * n];
            for (int j = 0; j < n; ++j) {
                double cand = am + brow[j];
                if (cand < crow[j]) crow[j] = cand;
            }
        }
    }
    for (auto& c : C) c = snap_big(c);
    return C;
}

ActionKernel minplus_compose(const ActionKernel& A, const ActionKernel& B) {
    if (A.grid != B.grid) throw SliceMismatch("minplus_compose: grids differ");
    if (A.end_slice() != B.k1)
        throw SliceMismatch("minplus_compose: end slice " + std::to_string(A.end_slice()) +
                            " != start slice " + std::to_string(B.k1));
    if (A.alpha_shift != B.alpha_shift)
        throw SliceMismatch("minplus_compose: alpha_shift mismatch");
    ActionKernel C(A.grid, A.k1, A.steps + B.steps, A.alpha_shift);
    C.v_max = A.v_max;
    C.n_v = A.n_v;
    C.a = minplus_product(A.a, B.a, A.grid.n_q);
    return C;
}

GridFunction apply_kernel(const ActionKernel& K, const GridFunction& u) {
    if (u.grid != K.grid) throw ShapeMismatch("apply_kernel: grids differ");
    if (u.slice != K.k1) throw SliceMismatch("apply_kernel: u is not on the kernel start slice");
    GridFunction out(K.grid, K.end_slice(), kBig);
    const int n = K.grid.n_q;
    for (int i = 0; i < n; ++i) {
        double ui = u[i];
        if (is_unreachable(ui)) continue;
        const double* krow = &K.a[static_cast<size_t>(i) * n];
        for (int j = 0; j < n; ++j) {
            double cand = ui + krow[j];
            if (cand < out.values[static_cast<size_t>(j)]) out.values[static_cast<size_t>(j)] = cand;
        }
    }
    for (auto& x : out.values) x = snap_big(x);
    return out;
}

LaxOleinik::LaxOleinik(HamiltonianModel model, TorusGrid grid, OperatorConfig cfg)
    : model_(std::move(model)), grid_(grid), cfg_(cfg), lat_(make_velocity_lattice(cfg, grid)) {
    if (cfg_.snap_to_grid) build_tables();
}

double LaxOleinik::edge_cost(int slice, int dep, int mi) const {
    // Trapezoid in time along the straight segment: the Lagrangian is read
    // at both endpoints, each at its own node and slice time.
    double dt = grid_.dt();
    double v = lat_.velocities[static_cast<size_t>(mi)];
    int m = mi - lat_.center();
    int arr = wrap_index(dep + m, grid_.n_q);
    double l0 = model_.lagrangian(grid_.node(dep), v, grid_.slice_time(slice));
    double l1 = model_.lagrangian(grid_.node(arr), v, grid_.slice_time(slice + 1));
    return dt * (0.5 * (l0 + l1) + cfg_.alpha_shift);
}

void LaxOleinik::build_tables() {
    const int nq = grid_.n_q, nv = lat_.size(), r = lat_.reach;
    stride_ = nq + 2 * r;
    edge_.assign(static_cast<size_t>(grid_.n_t), {});
    for (int k = 0; k < grid_.n_t; ++k) {
        auto& tab = edge_[static_cast<size_t>(k)];
        tab.assign(static_cast<size_t>(nv) * stride_, 0.0);
        for (int mi = 0; mi < nv; ++mi)
            for (int x = 0; x < stride_; ++x)
                tab[static_cast<size_t>(mi) * stride_ + x] =
                    edge_cost(k, wrap_index(x - r, nq), mi);
    }
}

void LaxOleinik::evolve_row(std::vector<double>& row, int slice) const {
    const int nq = grid_.n_q, nv = lat_.size(), r = lat_.reach;
    const auto& tab = edge_[static_cast<size_t>(wrap_index(slice, grid_.n_t))];
    // row_ext[x] is row at node (x - r mod nq); arrival j reads departure j - m.
    static thread_local std::vector<double> ext, out;
    ext.resize(static_cast<size_t>(stride_));
    out.assign(static_cast<size_t>(nq), kBig);
    for (int x = 0; x < stride_; ++x)
        ext[static_cast<size_t>(x)] = row[static_cast<size_t>(wrap_index(x - r, nq))];
    for (int mi = 0; mi < nv; ++mi) {
        int m = mi - lat_.center();
        const double* cost = &tab[static_cast<size_t>(mi) * stride_];
        // departure index in ext coordinates: (j - m) + r
        const double* src = &ext[static_cast<size_t>(r - m)];
        const double* c = cost + (r - m);
        for (int j = 0; j < nq; ++j) {
            double cand = src[j] + c[j];
            if (cand < out[static_cast<size_t>(j)]) out[static_cast<size_t>(j)] = cand;
        }
    }
    for (int j = 0; j < nq; ++j) row[static_cast<size_t>(j)] = snap_big(out[static_cast<size_t>(j)]);
}

void LaxOleinik::evolve_row_adjoint(std::vector<double>& row, int slice) const {
    const int nq = grid_.n_q, nv = lat_.size(), r = lat_.reach;
    const auto& tab = edge_[static_cast<size_t>(wrap_index(slice, grid_.n_t))];
    static thread_local std::vector<double> ext, out;
    ext.resize(static_cast<size_t>(stride_));
    out.assign(static_cast<size_t>(nq), kBig);
    for (int x = 0; x < stride_; ++x)
        ext[static_cast<size_t>(x)] = row[static_cast<size_t>(wrap_index(x - r, nq))];
    for (int mi = 0; mi < nv; ++mi) {
        int m = mi - lat_.center();
        const double* cost = &tab[static_cast<size_t>(mi) * stride_ + r];
        const double* dst = &ext[static_cast<size_t>(r + m)];
        for (int a = 0; a < nq; ++a) {
            double cand = cost[a] + dst[a];
            if (cand < out[static_cast<size_t>(a)]) out[static_cast<size_t>(a)] = cand;
        }
    }
    for (int a = 0; a < nq; ++a) row[static_cast<size_t>(a)] = snap_big(out[static_cast<size_t>(a)]);
}

GridFunction LaxOleinik::step_generic(const GridFunction& u, bool backward_dir,
                                      std::vector<int>* argmin, bool* boundary) const {
    if (u.grid != grid_) throw ShapeMismatch("step: grid mismatch");
    const int nq = grid_.n_q, nv = lat_.size();
    const int k = u.slice;
    const int out_slice = wrap_index(backward_dir ? k + 1 : k - 1, grid_.n_t);
    // For a backward substep the Lagrangian slice is k (data slice); for a
    // forward substep the step spans [k-1, k], so costs are read at k-1.
    const int cost_slice = backward_dir ? k : wrap_index(k - 1, grid_.n_t);
    GridFunction out(grid_, out_slice, backward_dir ? kBig : -kBig);
    if (argmin) argmin->assign(static_cast<size_t>(nq), lat_.center());
    bool hit = false;
    const double dt = grid_.dt();

    if (cfg_.snap_to_grid) {
        const int r = lat_.reach;
        const auto& tab = edge_[static_cast<size_t>(cost_slice)];
        for (int j = 0; j < nq; ++j) {
            double best = backward_dir ? kBig : -kBig;
            int best_mi = lat_.center();
            for (int mi = 0; mi < nv; ++mi) {
                int m = mi - lat_.center();
                // Backward: arrive at j from j-m. Forward: depart j toward j+m.
                int dep = backward_dir ? wrap_index(j - m, nq) : j;
                int other = backward_dir ? dep : wrap_index(j + m, nq);
                double val = backward_dir ? u[dep] : u[other];
                double cost = tab[static_cast<size_t>(mi) * stride_ + (dep + r)];
                double cand = backward_dir ? val + cost : val - cost;
                if (backward_dir ? cand < best : cand > best) {
                    best = cand;
                    best_mi = mi;
                }
            }
            out[j] = snap_big(best);
            if (argmin) (*argmin)[static_cast<size_t>(j)] = best_mi;
            if (std::abs(best_mi - lat_.center()) == r) hit = true;
        }
    } else {
        for (int j = 0; j < nq; ++j) {
            double qj = grid_.node(j);
            double best = backward_dir ? kBig : -kBig;
            int best_mi = lat_.center();
            for (int mi = 0; mi < nv; ++mi) {
                double v = lat_.velocities[static_cast<size_t>(mi)];
                double foot = backward_dir ? qj - v * dt : qj + v * dt;
                double uval = interpolate(u, foot, cfg_.interp);
                double dep_q = backward_dir ? foot : qj;
                double arr_q = backward_dir ? qj : foot;
                double l0 = model_.lagrangian(dep_q, v, grid_.slice_time(cost_slice));
                double l1 = model_.lagrangian(arr_q, v, grid_.slice_time(cost_slice + 1));
                double cost = dt * (0.5 * (l0 + l1) + cfg_.alpha_shift);
                double cand = backward_dir ? uval + cost : uval - cost;
                if (backward_dir ? cand < best : cand > best) {
                    best = cand;
                    best_mi = mi;
                }
            }
            out[j] = snap_big(best);
            if (argmin) (*argmin)[static_cast<size_t>(j)] = best_mi;
            if (best_mi == 0 || best_mi == nv - 1) hit = true;
        }
    }
    if (boundary) *boundary = hit;
    return out;
}

GridFunction LaxOleinik::backward_step(const GridFunction& u) const {
    if (cfg_.snap_to_grid) {
        // Fast path shares the row-evolution kernel.
        GridFunction out(grid_, u.slice + 1);
        std::vector<double> row = u.values;
        evolve_row(row, u.slice);
        out.values = std::move(row);
        return out;
    }
    return step_generic(u, true, nullptr, nullptr);
}

StepResult LaxOleinik::backward_step_traced(const GridFunction& u) const {
    StepResult res;
    res.u = step_generic(u, true, &res.argmin_v, &res.boundary_hit);
    return res;
}

GridFunction LaxOleinik::backward(const GridFunction& u, int n_steps) const {
    GridFunction cur = u;
    for (int s = 0; s < n_steps; ++s) cur = backward_step(cur);
    return cur;
}

GridFunction LaxOleinik::forward_step(const GridFunction& u) const {
    return step_generic(u, false, nullptr, nullptr);
}

StepResult LaxOleinik::forward_step_traced(const GridFunction& u) const {
    StepResult res;
    res.u = step_generic(u, false, &res.argmin_v, &res.boundary_hit);
    return res;
}

GridFunction LaxOleinik::forward(const GridFunction& u, int n_steps) const {
    GridFunction cur = u;
    for (int s = 0; s < n_steps; ++s) cur = forward_step(cur);
    return cur;
}

ActionKernel LaxOleinik::action_kernel(int k1, int n_steps) const {
    if (n_steps < 1) throw ConfigInvalid("action_kernel: need n_steps >= 1");
    if (!cfg_.snap_to_grid)
        throw ConfigInvalid("action_kernel: kernels require the snapped lattice");
    ActionKernel K(grid_, k1, n_steps, cfg_.alpha_shift);
    K.v_max = cfg_.v_max;
    K.n_v = lat_.size();
    const int nq = grid_.n_q;
    parallel_for(nq, [&](int i) {
        std::vector<double> row(static_cast<size_t>(nq), kBig);
        row[static_cast<size_t>(i)] = 0.0;
        for (int s = 0; s < n_steps; ++s) evolve_row(row, K.k1 + s);
        for (int j = 0; j < nq; ++j) K.at(i, j) = row[static_cast<size_t>(j)];
    });
    return K;
}

void write_kernel_csv(const ActionKernel& K, const std::string& path_csv,
                      const std::string& path_sidecar) {
    std::ofstream out(path_csv);
    if (!out) throw SolverError("cannot open " + path_csv);
    out << "i,j,value\n";
    out.precision(17);
    for (int i = 0; i < K.grid.n_q; ++i)
        for (int j = 0; j < K.grid.n_q; ++j)
            out << i << ',' << j << ',' << K.at(i, j) << '\n';
    std::ofstream side(path_sidecar);
    if (!side) throw SolverError("cannot open " + path_sidecar);
    side.precision(17);
    side << "{\"N_q\": " << K.grid.n_q << ", \"N_t\": " << K.grid.n_t << ", \"k1\": " << K.k1
         << ", \"k2\": " << K.end_slice() << ", \"m\": " << K.steps
         << ", \"alpha_shift\": " << K.alpha_shift << ", \"Vmax\": " << K.v_max
         << ", \"N_v\": " << K.n_v << "}\n";
}

} // namespace wkam
