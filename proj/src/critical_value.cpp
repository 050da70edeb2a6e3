#include "wkam/critical_value.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wkam {

double min_mean_cycle(const std::vector<double>& weights, int n) {
    // Karp's table: d[k][v] = min weight of a k-edge walk from the source.
    // The graph is complete with finite weights, hence strongly connected,
    // so a single source sees every cycle.
    const int src = 0;
    std::vector<std::vector<double>> d(static_cast<size_t>(n) + 1,
                                       std::vector<double>(static_cast<size_t>(n), kBig));
    d[0][src] = 0.0;
    for (int k = 1; k <= n; ++k) {
        for (int u = 0; u < n; ++u) {
            double du = d[static_cast<size_t>(k - 1)][static_cast<size_t>(u)];
            if (is_unreachable(du)) continue;
            const double* row = &weights[static_cast<size_t>(u) * n];
            auto& dk = d[static_cast<size_t>(k)];
            for (int v = 0; v < n; ++v)
                dk[static_cast<size_t>(v)] = std::min(dk[static_cast<size_t>(v)], du + row[v]);
        }
    }
    double lambda = kBig;
    for (int v = 0; v < n; ++v) {
        double dn = d[static_cast<size_t>(n)][static_cast<size_t>(v)];
        if (is_unreachable(dn)) continue;
        double worst = -kBig;
        for (int k = 0; k < n; ++k) {
            double dk = d[static_cast<size_t>(k)][static_cast<size_t>(v)];
            if (is_unreachable(dk)) continue;
            worst = std::max(worst, (dn - dk) / (n - k));
        }
        lambda = std::min(lambda, worst);
    }
    return lambda;
}

AlphaEstimate alpha_karp(const ActionKernel& K) {
    const int n = K.grid.n_q;
    if (K.steps != K.grid.n_t)
        throw ConfigInvalid("alpha_karp: kernel must span exactly one period");
    if (K.alpha_shift != 0.0)
        throw ConfigInvalid("alpha_karp: kernel must be unnormalized (alpha_shift = 0)");
    for (double x : K.a)
        if (is_unreachable(x) || !std::isfinite(x))
            throw NonFiniteKernel("alpha_karp: kernel has unreachable entries");
    return {-min_mean_cycle(K.a, n), "karp", n, 0.0};
}

AlphaEstimate alpha_karp_for(const HamiltonianModel& model, const TorusGrid& grid,
                             const OperatorConfig& cfg, int k1) {
    LaxOleinik op(model, grid, cfg.with_alpha(0.0));
    return alpha_karp(op.action_kernel(k1, grid.n_t));
}

namespace {

double mean(const GridFunction& u) {
    return std::accumulate(u.values.begin(), u.values.end(), 0.0) / u.values.size();
}

double minimum(const GridFunction& u) {
    return *std::min_element(u.values.begin(), u.values.end());
}

// Least-squares slope of y against 0..m-1.
double slope(const std::vector<double>& y) {
    const int m = static_cast<int>(y.size());
    double xb = (m - 1) / 2.0;
    double yb = std::accumulate(y.begin(), y.end(), 0.0) / m;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < m; ++i) {
        num += (i - xb) * (y[static_cast<size_t>(i)] - yb);
        den += (i - xb) * (i - xb);
    }
    return num / den;
}

} // namespace

AlphaEstimate alpha_growth(const LaxOleinik& op, const GrowthOptions& opt) {
    if (op.config().alpha_shift != 0.0)
        throw ConfigInvalid("alpha_growth: operator must be unnormalized");
    if (opt.n_periods <= opt.burn_in + 4)
        throw ConfigInvalid("alpha_growth: need n_periods > burn_in + 4");
    GridFunction u(op.grid(), 0, 0.0);
    std::vector<double> means, mins;
    for (int k = 0; k < opt.n_periods; ++k) {
        u = op.period_backward(u);
        if (k >= opt.burn_in) {
            means.push_back(mean(u));
            mins.push_back(minimum(u));
        }
    }
    // Full-window slope against the slope with the last two periods dropped:
    // large drift means the linear regime has not set in.
    double s_full = slope(means);
    std::vector<double> trimmed(means.begin(), means.end() - 2);
    double s_trim = slope(trimmed);
    double drift = std::fabs(s_full - s_trim);
    if (drift > 10.0 * opt.tolerance)
        throw NonConvergence("alpha_growth: slope drift " + std::to_string(drift));
    return {-s_full, "growth", opt.n_periods, drift, -slope(mins)};
}

} // namespace wkam
