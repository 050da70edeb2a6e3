#include "wkam/extended_flow.hpp"

#include <cmath>
#include <fstream>

namespace wkam {

double extended_distance(const ExtendedState& a, const ExtendedState& b) {
    return circle_dist(a.q, b.q) + std::fabs(a.p - b.p) + circle_dist(a.t, b.t) +
           std::fabs(a.kappa - b.kappa);
}

namespace {

struct Phase {
    double q, p, t;
};

Phase rhs(const HamiltonianModel& m, const Phase& x, double dir) {
    HamiltonianEval e = m.eval(x.q, x.p, x.t);
    return {dir * e.dp, dir * -e.dq, dir};
}

Phase rk4_step(const HamiltonianModel& m, const Phase& x, double h, double dir) {
    Phase k1 = rhs(m, x, dir);
    Phase x2{x.q + 0.5 * h * k1.q, x.p + 0.5 * h * k1.p, x.t + 0.5 * h * k1.t};
    Phase k2 = rhs(m, x2, dir);
    Phase x3{x.q + 0.5 * h * k2.q, x.p + 0.5 * h * k2.p, x.t + 0.5 * h * k2.t};
    Phase k3 = rhs(m, x3, dir);
    Phase x4{x.q + h * k3.q, x.p + h * k3.p, x.t + h * k3.t};
    Phase k4 = rhs(m, x4, dir);
    return {x.q + h / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q),
            x.p + h / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p),
            x.t + h / 6.0 * (k1.t + 2.0 * k2.t + 2.0 * k3.t + k4.t)};
}

} // namespace

std::vector<ExtendedState> flow_extended(const HamiltonianModel& model, const ExtendedState& x0,
                                         double span, const FlowConfig& cfg) {
    cfg.validate();
    if (std::fabs(span) > cfg.max_span)
        throw ConfigInvalid("flow_extended: span exceeds max_span");
    const double dir = span >= 0.0 ? 1.0 : -1.0;
    const double total = std::fabs(span);
    const double h0 = model.value(x0.q, x0.p, x0.t);

    std::vector<ExtendedState> traj;
    traj.push_back({wrap_unit(x0.q), x0.p, wrap_unit(x0.t), x0.kappa});
    Phase x{x0.q, x0.p, x0.t};
    double done = 0.0;
    while (done < total - 1e-15) {
        double h = std::min(cfg.step, total - done);
        Phase nxt = rk4_step(model, x, h, dir);
        if (std::fabs(nxt.p - x.p) > 1.0)
            throw StepRejected("flow_extended: |dp| > 1 in one step; reduce step size");
        x = nxt;
        done += h;
        double hcur = model.value(x.q, x.p, x.t);
        traj.push_back({wrap_unit(x.q), x.p, wrap_unit(x.t), x0.kappa + h0 - hcur});
    }
    return traj;
}

ExtendedState flow_endpoint(const HamiltonianModel& model, const ExtendedState& x0, double span,
                            const FlowConfig& cfg) {
    return flow_extended(model, x0, span, cfg).back();
}

double commutation_defect(const HamiltonianModel& h1, const HamiltonianModel& h2,
                          const ExtendedState& x0, double s, double r, const FlowConfig& cfg) {
    ExtendedState a = flow_endpoint(h1, flow_endpoint(h2, x0, r, cfg), s, cfg);
    ExtendedState b = flow_endpoint(h2, flow_endpoint(h1, x0, s, cfg), r, cfg);
    return extended_distance(a, b);
}

double conservation_defect(const HamiltonianModel& h1, const HamiltonianModel& h2,
                           const ExtendedState& x0, double span, const FlowConfig& cfg) {
    auto traj = flow_extended(h1, x0, span, cfg);
    double ref = x0.kappa + h2.value(x0.q, x0.p, x0.t);
    double worst = 0.0;
    for (const auto& x : traj)
        worst = std::max(worst, std::fabs(x.kappa + h2.value(x.q, x.p, x.t) - ref));
    return worst;
}

double aubry_invariance_check(const HamiltonianModel& h2, const ExtendedLift& lift, double s,
                              const FlowConfig& cfg) {
    double worst = 0.0;
    for (const auto& pt : lift.points) {
        ExtendedState x0{pt.q, pt.p, pt.t, pt.kappa};
        ExtendedState pushed = flow_endpoint(h2, x0, s, cfg);
        double best = kBig;
        for (const auto& other : lift.points) {
            ExtendedState y{other.q, other.p, other.t, other.kappa};
            best = std::min(best, extended_distance(pushed, y));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

void write_trajectory_csv(const std::vector<ExtendedState>& traj, double step,
                          const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SolverError("cannot open " + path);
    out << "tau,q,p,t,kappa\n";
    out.precision(17);
    for (size_t i = 0; i < traj.size(); ++i)
        out << i * step << ',' << traj[i].q << ',' << traj[i].p << ',' << traj[i].t << ','
            << traj[i].kappa << '\n';
    return;
}

} // namespace wkam
