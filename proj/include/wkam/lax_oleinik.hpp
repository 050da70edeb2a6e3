#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wkam/grid.hpp"
#include "wkam/hamiltonian.hpp"

namespace wkam {

/// Discretization of the curve space behind the Lax-Oleinik infimum.
///
/// With `snap_to_grid` (the default) the velocity lattice consists of the
/// displacements v = m * dq/dt that move an integer number of cells per
/// substep, capped by both v_max and n_v. Feet land on nodes, every substep
/// is a min-plus matrix, and the operator/kernel identities hold exactly.
/// With snapping off, a uniform n_v-point lattice on [-v_max, v_max] is
/// used together with genuine interpolation; useful for accuracy studies,
/// excluded from the exact-identity tests.
struct OperatorConfig {
    double v_max = 3.0;
    int n_v = 121; // odd, >= 5; acts as a cap on the snapped lattice
    double alpha_shift = 0.0;
    InterpOrder interp = InterpOrder::Linear;
    bool snap_to_grid = true;

    OperatorConfig with_alpha(double a) const {
        OperatorConfig c = *this;
        c.alpha_shift = a;
        return c;
    }
};

struct VelocityLattice {
    std::vector<double> velocities; // ascending, symmetric, contains 0
    int reach = 0;                  // snapped: cells per substep at the ends
    bool snapped = true;

    int size() const { return static_cast<int>(velocities.size()); }
    int center() const { return size() / 2; }
    double max_speed() const { return velocities.back(); }
};

VelocityLattice make_velocity_lattice(const OperatorConfig& cfg, const TorusGrid& grid);

/// Matrix of minimal discrete actions between grid nodes:
/// at(i, j) ~ action from (q_i, [t_{k1}]) to (q_j, [t_{k1} + steps*dt]),
/// with alpha_shift * steps * dt already folded in.
struct ActionKernel {
    TorusGrid grid;
    int k1 = 0;    // start slice
    int steps = 1; // elapsed substeps, >= 1; end slice is (k1+steps) mod n_t
    double alpha_shift = 0.0;
    double v_max = 0.0;
    int n_v = 0;
    std::vector<double> a; // n_q * n_q, row-major

    ActionKernel() = default;
    ActionKernel(const TorusGrid& g, int start, int m, double alpha)
        : grid(g), k1(wrap_index(start, g.n_t)), steps(m), alpha_shift(alpha),
          a(static_cast<size_t>(g.n_q) * g.n_q, kBig) {}

    double& at(int i, int j) { return a[static_cast<size_t>(i) * grid.n_q + j]; }
    double at(int i, int j) const { return a[static_cast<size_t>(i) * grid.n_q + j]; }
    int end_slice() const { return wrap_index(k1 + steps, grid.n_t); }

    static ActionKernel identity(const TorusGrid& g, int slice, double alpha = 0.0);
};

/// Min-plus product on raw square matrices: C[i][j] = min_m A[i][m] + B[m][j].
std::vector<double> minplus_product(const std::vector<double>& A, const std::vector<double>& B,
                                    int n);

/// Kernel composition; end slice of A must equal start slice of B (mod n_t).
ActionKernel minplus_compose(const ActionKernel& A, const ActionKernel& B);

/// (K (x) u)(j) = min_i [ u(i) + K(i, j) ]; u must live on K's start slice.
GridFunction apply_kernel(const ActionKernel& K, const GridFunction& u);

struct StepResult {
    GridFunction u;
    std::vector<int> argmin_v; // lattice index per target node
    bool boundary_hit = false; // some argmin attained |v| = max lattice speed
};

/// Backward and forward Lax-Oleinik substeps over one grid, with per-slice
/// cost tables cached at construction. Immutable and safe to share.
class LaxOleinik {
public:
    LaxOleinik(HamiltonianModel model, TorusGrid grid, OperatorConfig cfg);

    /// One backward substep: data on slice k of u, result on slice k+1.
    /// u'(q_j) = min_v [ u(q_j - v dt) + action of the step ].
    GridFunction backward_step(const GridFunction& u) const;
    StepResult backward_step_traced(const GridFunction& u) const;

    /// Composition of n backward substeps (n >= 0, counted without wrap).
    GridFunction backward(const GridFunction& u, int n_steps) const;

    /// One forward substep: data on slice k, result on slice k-1.
    /// u'(q_j) = max_v [ u(q_j + v dt) - action of the step ].
    GridFunction forward_step(const GridFunction& u) const;
    StepResult forward_step_traced(const GridFunction& u) const;
    GridFunction forward(const GridFunction& u, int n_steps) const;

    /// Kernel spanning n_steps substeps from slice k1.
    ActionKernel action_kernel(int k1, int n_steps) const;

    /// One full period of backward (resp. forward) evolution.
    GridFunction period_backward(const GridFunction& u) const { return backward(u, grid_.n_t); }
    GridFunction period_forward(const GridFunction& u) const { return forward(u, grid_.n_t); }

    // Row evolution primitives for the kernel-family builders. `row` holds a
    // value function indexed by node; slice is the departure slice of the
    // substep. Forward-in-time: row'[j] = min_m row[j-m] + edge(slice, j-m, m).
    // Adjoint (cost-to-target): row'[a] = min_m edge(slice, a, m) + row[a+m].
    void evolve_row(std::vector<double>& row, int slice) const;
    void evolve_row_adjoint(std::vector<double>& row, int slice) const;

    const TorusGrid& grid() const { return grid_; }
    const OperatorConfig& config() const { return cfg_; }
    const VelocityLattice& lattice() const { return lat_; }
    const HamiltonianModel& model() const { return model_; }

private:
    HamiltonianModel model_;
    TorusGrid grid_;
    OperatorConfig cfg_;
    VelocityLattice lat_;

    // Snapped cost tables: edge_[k][mi * stride + x] for x in [0, n_q + 2R),
    // giving the cost of departing node (x - R mod n_q) with velocity index
    // mi at slice k. The padding removes wraparound from inner loops.
    int stride_ = 0;
    std::vector<std::vector<double>> edge_;

    double edge_cost(int slice, int dep_node, int vel_index) const;
    void build_tables();

    GridFunction step_generic(const GridFunction& u, bool backward_dir,
                              std::vector<int>* argmin, bool* boundary) const;
};

// Kernel CSV (i, j, value) plus a JSON sidecar with the discretization data.
void write_kernel_csv(const ActionKernel& K, const std::string& path_csv,
                      const std::string& path_sidecar);

} // namespace wkam
