#pragma once

#include <cstdint>
#include <vector>

#include "wkam/lax_oleinik.hpp"
#include "wkam/weak_kam.hpp"

namespace wkam {

struct BarrierOptions {
    int n_min = 8;            // first whole period entering the window
    int n_max = 24;           // last one
    double settle_tol = 1e-6; // window drift considered settled
    bool strict_settle = false;
    // Aubry threshold = eps_factor * (dq + dt). The critical loops of the
    // built-in families are cost-exact on the discrete lattice, so the
    // barrier vanishes to roundoff on true Aubry nodes; a sub-mesh factor
    // keeps the mask from smearing over the barrier's quadratic well.
    double eps_factor = 0.01;
    int rep_cap = 48;         // representatives used for b / rho on large masks
};

/// Space-time nodes where the first barrier (nearly) vanishes.
struct AubryMask {
    TorusGrid grid;
    double eps = 0.0;
    std::vector<std::uint8_t> mask; // n_t * n_q, slice-major

    bool at(int k, int j) const {
        return mask[static_cast<size_t>(wrap_index(k, grid.n_t)) * grid.n_q +
                    wrap_index(j, grid.n_q)] != 0;
    }
    int count() const;
    std::vector<int> flat_nodes() const; // ascending k * n_q + j
};

/// First barrier plus the mask-restricted kernel slices needed downstream.
/// h rows/columns are stored against a deterministic subset of mask nodes
/// (all of them when the mask is small).
struct BarrierFamily {
    TorusGrid grid;
    double alpha = 0.0;
    BarrierOptions opt;
    SpaceTimeFunction B; // h(x, x)
    bool settled = true;
    double drift = 0.0;

    std::vector<int> reps; // flat node ids
    std::vector<std::vector<double>> h_from_rep;   // [r][flat] h(rep_r -> x)
    std::vector<std::vector<double>> h_to_rep;     // [r][flat] h(x -> rep_r)
    std::vector<std::vector<double>> mane_from_rep; // all-horizon infimum rows
    bool mane_still_decreasing = false;

    double h_rep_rep(int r, int s) const {
        return h_from_rep[static_cast<size_t>(r)][static_cast<size_t>(reps[static_cast<size_t>(s)])];
    }
    double rho(int r, int s) const { return h_rep_rep(r, s) + h_rep_rep(s, r); }
};

/// Pass 1: first barrier B(x) = liminf-window of the n-period return costs.
/// The operator must be normalized (alpha folded into its edge costs).
BarrierFamily peierls_barrier(const LaxOleinik& op, double alpha, const BarrierOptions& opt = {});

/// Threshold the first barrier; throws EmptyMask when nothing qualifies.
AubryMask aubry_mask(const BarrierFamily& family);
AubryMask aubry_mask(const SpaceTimeFunction& B, double eps);

/// Pass 2: fill the mask-restricted h and Mane rows of the family.
void compute_mask_kernels(BarrierFamily& family, const LaxOleinik& op, const AubryMask& mask);

/// b(x) = min over mask points xi, zeta of h(xi,x) + h(x,zeta) - h(xi,zeta).
SpaceTimeFunction second_barrier(const BarrierFamily& family);

struct QuotientMetric {
    std::vector<int> class_reps; // flat node id of each class representative
    std::vector<int> rep_class;  // class index of every stored rep
    std::vector<double> rho;     // class_count^2, between class representatives
    double max_intra_rho = 0.0;

    int class_count() const { return static_cast<int>(class_reps.size()); }
    double rho_at(int a, int b) const {
        return rho[static_cast<size_t>(a) * class_reps.size() + static_cast<size_t>(b)];
    }
};

/// Components of the rep graph with edges rho <= 2 eps, plus the
/// class-to-class pseudometric via lowest-node representatives.
QuotientMetric quotient_aubry(const BarrierFamily& family, const AubryMask& mask);

/// Full pairwise kernel family for desk-size grids (used by the oracle
/// tests and the Mane potential checks). from_zero_horizon switches between
/// the barrier window [n_lo, n_hi] and the all-horizon infimum.
struct FullKernelFamily {
    TorusGrid grid;
    std::vector<double> h; // (n_t*n_q)^2, [from_flat][to_flat]
    bool still_decreasing = false;
    double drift = 0.0;

    double at(int from, int to) const {
        return h[static_cast<size_t>(from) * (grid.n_t * grid.n_q) + static_cast<size_t>(to)];
    }
};
FullKernelFamily full_kernel_family(const LaxOleinik& op, int n_lo, int n_hi,
                                    bool from_zero_horizon, double settle_tol = 1e-6);

/// Mane potential from one start node to everywhere (all admissible
/// horizons up to n_max periods), with the monotonicity flag.
struct ManeRow {
    std::vector<double> values; // flat over space-time nodes
    bool still_decreasing = false;
};
ManeRow mane_potential_row(const LaxOleinik& op, int start_k, int start_j, int n_max,
                           double settle_tol = 1e-6);

/// Extended lift of the Aubry mask: momenta from the calibrated argmin
/// velocities via the Legendre map, kappa = alpha - H(q, p, [t]) exactly.
struct LiftPoint {
    double q = 0.0, p = 0.0, t = 0.0, kappa = 0.0;
    int k = 0, j = 0;
};
struct ExtendedLift {
    double alpha = 0.0;
    std::vector<LiftPoint> points;
};
ExtendedLift extended_lift(const AubryMask& mask, const HamiltonianModel& model, double alpha,
                           const LaxOleinik& op, const WeakKamSolution& calibrated);

/// max over lift points of |kappa + H2(q,p,t) - alpha2|.
double lift_hamiltonian_defect(const ExtendedLift& lift, const HamiltonianModel& h2,
                               double alpha2);

/// Hausdorff distance between lifts in the product metric
/// (circle distances for q and t, absolute for p and kappa).
double lift_hausdorff(const ExtendedLift& a, const ExtendedLift& b);

/// Symmetric-difference report for two masks: total cells and whether every
/// differing cell touches both masks within one cell (boundary-only).
struct MaskDifference {
    int symmetric_difference = 0;
    bool boundary_only = true;
};
MaskDifference compare_masks(const AubryMask& a, const AubryMask& b);

} // namespace wkam
