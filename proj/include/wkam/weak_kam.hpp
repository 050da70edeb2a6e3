#pragma once

#include <cstdint>
#include <vector>

#include "wkam/lax_oleinik.hpp"

namespace wkam {

struct WeakKamOptions {
    int burn_in = 50;   // periods iterated before the first window
    int window = 10;    // iterates entering the pointwise extremum
    int max_periods = 400;
    double tol = 1e-10; // fixed-point residual gate
    int anchor_node = 0;
};

/// Time-periodic solution of the normalized evolution: a fixed point of the
/// period map extended to all slices, with the residual it was accepted at.
struct WeakKamSolution {
    SpaceTimeFunction phi;
    double alpha = 0.0;
    bool backward = true;
    double residual = 0.0; // sup |P phi(.,0) - phi(.,0)|
    int anchor_node = 0;   // phi(anchor, slice 0) = 0 (backward solutions)
    int iterations = 0;    // periods consumed
    bool boundary_hit = false;

    GridFunction slice0() const { return phi.slice(0); }
};

/// Fixed point of the period map at slice 0, raw (no anchoring). The
/// iteration need not converge for time-periodic systems, so the limit is
/// taken as a pointwise window extremum (min for backward, max for forward)
/// over trailing iterates, then confirmed by one more application.
GridFunction fixed_point_slice(const LaxOleinik& op, const GridFunction& u0, bool backward,
                               const WeakKamOptions& opt, int* iterations = nullptr,
                               double* residual = nullptr);

/// Extend a period-map fixed point to every slice by stepping from slice 0.
/// The one-step identity holds by construction; the wrap back to slice 0 is
/// checked against `tol` (WrapMismatch beyond it).
WeakKamSolution extend_in_time(const LaxOleinik& op, const GridFunction& u_star, bool backward,
                               double wrap_tol, bool anchor = true, int anchor_node = 0);

/// Backward weak KAM solution: liminf-style fixed point of the normalized
/// backward period map, extended in time and anchored.
WeakKamSolution backward_fixed_point(const LaxOleinik& op, double alpha,
                                     const GridFunction& u0, const WeakKamOptions& opt = {});

/// Forward counterpart (window max); not anchored when started from a
/// backward solution, so equality sets against it stay meaningful.
WeakKamSolution forward_fixed_point(const LaxOleinik& op, double alpha, const GridFunction& u0,
                                    const WeakKamOptions& opt = {}, bool anchor = false);

struct CommonFixedPoint {
    GridFunction u;        // H2-liminf of an H1 fixed point
    double residual_h1 = 0.0;
    double residual_h2 = 0.0;
    int iterations = 0;
};

/// Fixed point of op1's period map pushed through op2's liminf iteration;
/// residuals under both period maps are reported (commutation is not
/// assumed -- the residuals tell the story).
CommonFixedPoint common_fixed_point(const LaxOleinik& op1, const LaxOleinik& op2,
                                    const WeakKamOptions& opt = {});

/// Backward/forward pair with its equality set.
struct ConjugatePair {
    WeakKamSolution phi_minus;
    WeakKamSolution phi_plus;
    std::vector<std::uint8_t> equality; // n_t * n_q, slice-major
    double eps = 0.0;

    bool equal_at(int k, int j, const TorusGrid& g) const {
        return equality[static_cast<size_t>(wrap_index(k, g.n_t)) * g.n_q +
                        wrap_index(j, g.n_q)] != 0;
    }
};

/// phi+ as the forward liminf started from phi-; the equality set collects
/// nodes where the two agree within eps.
ConjugatePair conjugate_pair(const LaxOleinik& forward_op, const WeakKamSolution& phi_minus,
                             double eps, const WeakKamOptions& opt = {});

/// max over slice pairs within one period and over node pairs of
/// phi(end) - phi(start) - K(start, end) for the normalized kernels.
/// Nonpositive (up to roundoff) exactly when phi is dominated.
double domination_residual(const SpaceTimeFunction& phi, const LaxOleinik& op);

} // namespace wkam
