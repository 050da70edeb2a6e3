#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "wkam/common.hpp"

namespace wkam {

/// Periodic discretization of the position circle and the time circle.
/// Positions q_j = j / n_q, time slices t_k = k / n_t, step dt = 1 / n_t.
/// Carries a dimension field for future extension; everything here is d=1.
struct TorusGrid {
    int n_q = 8;
    int n_t = 4;
    int dim = 1;

    TorusGrid() = default;
    TorusGrid(int nq, int nt) : n_q(nq), n_t(nt) {
        if (n_q < 8) throw ConfigInvalid("TorusGrid: n_q must be >= 8");
        if (n_t < 4) throw ConfigInvalid("TorusGrid: n_t must be >= 4");
    }

    double dq() const { return 1.0 / n_q; }
    double dt() const { return 1.0 / n_t; }
    double node(int j) const { return static_cast<double>(wrap_index(j, n_q)) / n_q; }
    double slice_time(int k) const { return static_cast<double>(wrap_index(k, n_t)) / n_t; }
    double mesh() const { return dq() + dt(); }

    bool operator==(const TorusGrid& o) const { return n_q == o.n_q && n_t == o.n_t; }
    bool operator!=(const TorusGrid& o) const { return !(*this == o); }
};

enum class InterpOrder { Linear, Cubic };

/// Real values on the position nodes of one time slice.
struct GridFunction {
    TorusGrid grid;
    int slice = 0;
    std::vector<double> values;

    GridFunction() = default;
    GridFunction(const TorusGrid& g, int k, double fill = 0.0)
        : grid(g), slice(wrap_index(k, g.n_t)), values(static_cast<size_t>(g.n_q), fill) {}

    double& operator[](int j) { return values[static_cast<size_t>(wrap_index(j, grid.n_q))]; }
    double operator[](int j) const { return values[static_cast<size_t>(wrap_index(j, grid.n_q))]; }
    int size() const { return grid.n_q; }

    /// Column that is kBig everywhere except zero at node j; used to read
    /// kernel rows out of the operators.
    static GridFunction big_column(const TorusGrid& g, int k, int j) {
        GridFunction f(g, k, kBig);
        f[j] = 0.0;
        return f;
    }
};

/// Values over all space-time nodes; value(k, j) ~ phi(q_j, [t_k]).
struct SpaceTimeFunction {
    TorusGrid grid;
    std::vector<double> values; // n_t * n_q, slice-major

    SpaceTimeFunction() = default;
    explicit SpaceTimeFunction(const TorusGrid& g, double fill = 0.0)
        : grid(g), values(static_cast<size_t>(g.n_t) * g.n_q, fill) {}

    double& at(int k, int j) {
        return values[static_cast<size_t>(wrap_index(k, grid.n_t)) * grid.n_q +
                      wrap_index(j, grid.n_q)];
    }
    double at(int k, int j) const {
        return values[static_cast<size_t>(wrap_index(k, grid.n_t)) * grid.n_q +
                      wrap_index(j, grid.n_q)];
    }

    GridFunction slice(int k) const {
        GridFunction f(grid, k);
        for (int j = 0; j < grid.n_q; ++j) f[j] = at(k, j);
        return f;
    }

    void set_slice(int k, const GridFunction& f) {
        for (int j = 0; j < grid.n_q; ++j) at(k, j) = f[j];
    }
};

/// Periodic interpolation at an arbitrary circle position; exact at nodes.
/// Linear is the default (monotone and non-expansive); cubic (Catmull-Rom)
/// is for accuracy studies only.
double interpolate(const GridFunction& f, double q, InterpOrder order = InterpOrder::Linear);
double interpolate(const std::vector<double>& values, double q,
                   InterpOrder order = InterpOrder::Linear);

/// Sup norm of f - g over nodes. Shapes must match.
double sup_distance(const GridFunction& f, const GridFunction& g);
double sup_distance(const SpaceTimeFunction& f, const SpaceTimeFunction& g);

/// Pointwise sample of a closed-form field at the nodes of slice k.
GridFunction sample(const std::function<double(double, double)>& field, const TorusGrid& grid,
                    int k);
SpaceTimeFunction sample_space_time(const std::function<double(double, double)>& field,
                                    const TorusGrid& grid);

// CSV round trip. Headers are mandatory; values carry 17 significant digits.
void write_csv(const GridFunction& f, std::ostream& out);
void write_csv(const SpaceTimeFunction& f, std::ostream& out);
GridFunction read_grid_function_csv(std::istream& in, const TorusGrid& grid, int slice);
SpaceTimeFunction read_space_time_csv(std::istream& in, const TorusGrid& grid);

void write_csv_file(const GridFunction& f, const std::string& path);
void write_csv_file(const SpaceTimeFunction& f, const std::string& path);

} // namespace wkam
