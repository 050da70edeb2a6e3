#include "wkam/grid.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace wkam {

double interpolate(const std::vector<double>& v, double q, InterpOrder order) {
    const int n = static_cast<int>(v.size());
    double s = wrap_unit(q) * n;
    int a = static_cast<int>(std::floor(s));
    if (a >= n) a -= n;
    double theta = s - a;
    if (theta == 0.0) return v[static_cast<size_t>(a)];
    int b = (a + 1 == n) ? 0 : a + 1;
    // a + theta (b - a) form: exact at nodes and commutes with constants.
    if (order == InterpOrder::Linear)
        return v[static_cast<size_t>(a)] +
               theta * (v[static_cast<size_t>(b)] - v[static_cast<size_t>(a)]);
    // Periodic Catmull-Rom.
    int am = (a == 0) ? n - 1 : a - 1;
    int bp = (b + 1 == n) ? 0 : b + 1;
    double p0 = v[static_cast<size_t>(am)], p1 = v[static_cast<size_t>(a)];
    double p2 = v[static_cast<size_t>(b)], p3 = v[static_cast<size_t>(bp)];
    double t2 = theta * theta, t3 = t2 * theta;
    return 0.5 * ((2.0 * p1) + (-p0 + p2) * theta + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2 +
                  (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t3);
}

double interpolate(const GridFunction& f, double q, InterpOrder order) {
    return interpolate(f.values, q, order);
}

double sup_distance(const GridFunction& f, const GridFunction& g) {
    if (f.grid != g.grid) throw ShapeMismatch("sup_distance: grids differ");
    double worst = 0.0;
    for (int j = 0; j < f.grid.n_q; ++j) worst = std::max(worst, std::fabs(f[j] - g[j]));
    return worst;
}

double sup_distance(const SpaceTimeFunction& f, const SpaceTimeFunction& g) {
    if (f.grid != g.grid) throw ShapeMismatch("sup_distance: grids differ");
    double worst = 0.0;
    for (size_t i = 0; i < f.values.size(); ++i)
        worst = std::max(worst, std::fabs(f.values[i] - g.values[i]));
    return worst;
}

GridFunction sample(const std::function<double(double, double)>& field, const TorusGrid& grid,
                    int k) {
    GridFunction f(grid, k);
    double t = grid.slice_time(k);
    for (int j = 0; j < grid.n_q; ++j) f[j] = field(grid.node(j), t);
    return f;
}

SpaceTimeFunction sample_space_time(const std::function<double(double, double)>& field,
                                    const TorusGrid& grid) {
    SpaceTimeFunction f(grid);
    for (int k = 0; k < grid.n_t; ++k)
        for (int j = 0; j < grid.n_q; ++j) f.at(k, j) = field(grid.node(j), grid.slice_time(k));
    return f;
}

namespace {

void put(std::ostream& out, double x) {
    out << std::setprecision(17) << x;
}

} // namespace

void write_csv(const GridFunction& f, std::ostream& out) {
    out << "j,q,value\n";
    for (int j = 0; j < f.grid.n_q; ++j) {
        out << j << ',';
        put(out, f.grid.node(j));
        out << ',';
        put(out, f[j]);
        out << '\n';
    }
}

void write_csv(const SpaceTimeFunction& f, std::ostream& out) {
    out << "k,t,j,q,value\n";
    for (int k = 0; k < f.grid.n_t; ++k)
        for (int j = 0; j < f.grid.n_q; ++j) {
            out << k << ',';
            put(out, f.grid.slice_time(k));
            out << ',' << j << ',';
            put(out, f.grid.node(j));
            out << ',';
            put(out, f.at(k, j));
            out << '\n';
        }
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

} // namespace

GridFunction read_grid_function_csv(std::istream& in, const TorusGrid& grid, int slice) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("j,q,value", 0) != 0)
        throw ConfigInvalid("grid function CSV: missing 'j,q,value' header");
    GridFunction f(grid, slice);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != 3) throw ConfigInvalid("grid function CSV: bad row '" + line + "'");
        f[std::stoi(cells[0])] = std::stod(cells[2]);
    }
    return f;
}

SpaceTimeFunction read_space_time_csv(std::istream& in, const TorusGrid& grid) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("k,t,j,q,value", 0) != 0)
        throw ConfigInvalid("space-time CSV: missing 'k,t,j,q,value' header");
    SpaceTimeFunction f(grid);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != 5) throw ConfigInvalid("space-time CSV: bad row '" + line + "'");
        f.at(std::stoi(cells[0]), std::stoi(cells[2])) = std::stod(cells[4]);
    }
    return f;
}

void write_csv_file(const GridFunction& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SolverError("cannot open " + path);
    write_csv(f, out);
}

void write_csv_file(const SpaceTimeFunction& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SolverError("cannot open " + path);
    write_csv(f, out);
}

} // namespace wkam
