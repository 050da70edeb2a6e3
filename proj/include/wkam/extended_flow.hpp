#pragma once

#include <vector>

#include "wkam/barriers.hpp"
#include "wkam/hamiltonian.hpp"

namespace wkam {

/// Point of T*(M x T): position, momentum, circle time, energy conjugate
/// to time. q and t are stored wrapped to [0,1).
struct ExtendedState {
    double q = 0.0;
    double p = 0.0;
    double t = 0.0;
    double kappa = 0.0;
};

struct FlowConfig {
    double step = 1e-3;
    double max_span = 8.0;

    void validate() const {
        if (!(step > 0.0 && step <= 0.1)) throw ConfigInvalid("FlowConfig: step must be in (0, 0.1]");
        if (max_span <= 0.0) throw ConfigInvalid("FlowConfig: max_span must be positive");
    }
};

/// Product metric on the extended space: circle distances for q and t,
/// absolute differences for p and kappa.
double extended_distance(const ExtendedState& a, const ExtendedState& b);

/// Integrates (q, p) along Hamilton's equations with t' = 1 (RK4) and sets
/// kappa algebraically as kappa0 + H(x0) - H(x(s)), which conserves
/// kappa + H exactly along the trajectory. Returns the sampled trajectory
/// including both endpoints; negative spans integrate backwards.
std::vector<ExtendedState> flow_extended(const HamiltonianModel& model, const ExtendedState& x0,
                                         double span, const FlowConfig& cfg);

/// Endpoint only.
ExtendedState flow_endpoint(const HamiltonianModel& model, const ExtendedState& x0, double span,
                            const FlowConfig& cfg);

/// Distance between the two orders of flowing x0 by s along H1 and r along
/// H2 (extended flows).
double commutation_defect(const HamiltonianModel& h1, const HamiltonianModel& h2,
                          const ExtendedState& x0, double s, double r, const FlowConfig& cfg);

/// max over the H1-trajectory of |(kappa + H2)(x(tau)) - (kappa + H2)(x0)|.
double conservation_defect(const HamiltonianModel& h1, const HamiltonianModel& h2,
                           const ExtendedState& x0, double span, const FlowConfig& cfg);

/// Push every lifted point by the H2 extended flow for time s and report
/// the largest distance to the nearest original lift point.
double aubry_invariance_check(const HamiltonianModel& h2, const ExtendedLift& lift, double s,
                              const FlowConfig& cfg);

void write_trajectory_csv(const std::vector<ExtendedState>& traj, double step,
                          const std::string& path);

} // namespace wkam
