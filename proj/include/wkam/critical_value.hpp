#pragma once

#include <string>
#include <vector>

#include "wkam/lax_oleinik.hpp"

namespace wkam {

/// Estimate of the critical value with provenance and diagnostics.
struct AlphaEstimate {
    double value = 0.0;
    std::string method;    // "karp" | "growth"
    int iterations = 0;    // DP depth (karp) or periods iterated (growth)
    double residual = 0.0; // slope drift (growth); 0 for karp
    // growth only: the estimate read off min_q instead of mean_q (rougher
    // convergence, kept as a diagnostic).
    double value_min_route = 0.0;
};

/// Karp's minimum mean cycle on a complete digraph given as a dense n x n
/// weight matrix (row-major, weights[i*n+j] = cost of edge i -> j).
double min_mean_cycle(const std::vector<double>& weights, int n);

/// Minimum mean cycle of the one-period kernel graph (Karp). Exact for the
/// discrete problem; the critical value is minus the cycle mean.
/// Requires an unnormalized kernel spanning exactly one period.
AlphaEstimate alpha_karp(const ActionKernel& period_kernel);

struct GrowthOptions {
    int n_periods = 40;
    int burn_in = 10;
    double tolerance = 1e-3;
};

/// Long-run growth rate of unnormalized backward iterates: the mean of
/// T^k u drifts by -alpha per period. Independent cross-check of Karp.
AlphaEstimate alpha_growth(const LaxOleinik& op, const GrowthOptions& opt = {});

/// Convenience: unnormalized one-period kernel from slice k1, then Karp.
AlphaEstimate alpha_karp_for(const HamiltonianModel& model, const TorusGrid& grid,
                             const OperatorConfig& cfg, int k1 = 0);

} // namespace wkam
