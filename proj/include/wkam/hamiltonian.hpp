#pragma once

#include <string>
#include <vector>

#include "wkam/common.hpp"
#include "wkam/convex_profile.hpp"
#include "wkam/fourier.hpp"

namespace wkam {

/// Values and exact partial derivatives of H at one point (q, p, [t]).
struct HamiltonianEval {
    double h = 0.0;
    double dp = 0.0;
    double dq = 0.0;
    double dt = 0.0;
};

/// Result of the fiberwise Legendre transform at (q, v, [t]).
struct LegendreResult {
    double lagrangian = 0.0;
    double p_star = 0.0;
};

/// S(q, [t]) and forcing g([t]) used to conjugate p-only profiles into
/// genuinely (q, t)-dependent Hamiltonians.
struct GeneratingField {
    FourierSeries2D S;
    FourierSeries1D g;

    double mean_forcing() const { return g.mean(); }
    bool depends_on_t() const;
};

/// Evaluable time 1-periodic Tonelli Hamiltonian on the unit circle.
///
/// Families:
///   free                 H = p^2/2
///   pendulum(A)          H = p^2/2 + A cos(2 pi q)
///   forced_pendulum(A,e) H = p^2/2 + A cos(2 pi q) (1 + e cos(2 pi t))
///   conjugated(h, S, g)  H = h(p + S_q(q,t)) + S_t(q,t) + g(t)
///   custom(h, V)         H = h(p) + V(q, [t])
///
/// Models are immutable values, cheap to copy, and safe to share across
/// threads. `mirrored` applies (q,p,t) -> (q,-p,-t), i.e. the symmetric
/// Hamiltonian used for forward/backward duality; `offset` adds a constant.
class HamiltonianModel {
public:
    enum class Family { Free, Pendulum, ForcedPendulum, Conjugated, Custom };

    static HamiltonianModel free_particle();
    static HamiltonianModel pendulum(double amplitude);
    static HamiltonianModel forced_pendulum(double amplitude, double epsilon);
    static HamiltonianModel conjugated(ConvexProfile profile, GeneratingField field);
    static HamiltonianModel custom(ConvexProfile profile, FourierSeries2D potential);

    HamiltonianEval eval(double q, double p, double t) const;
    double value(double q, double p, double t) const { return eval(q, p, t).h; }

    /// L(q, v, [t]) by the family's closed form (Legendre duality).
    double lagrangian(double q, double v, double t) const;

    /// Generic Legendre transform: solves dH/dp = v by bracketed Newton.
    LegendreResult legendre(double q, double v, double t) const;

    /// The symmetric model q,p,t -> q,-p,-t (an involution).
    HamiltonianModel mirrored() const;

    /// H + c (the Lagrangian shifts by -c).
    HamiltonianModel shifted(double c) const;

    bool time_dependent() const;
    Family family() const { return family_; }
    const std::string& name() const { return name_; }
    double velocity_bound_hint() const;

    const ConvexProfile& profile() const { return profile_; }
    const GeneratingField& field() const { return field_; }

private:
    HamiltonianModel() = default;

    Family family_ = Family::Free;
    double amplitude_ = 0.0;
    double epsilon_ = 0.0;
    ConvexProfile profile_ = ConvexProfile::quadratic();
    GeneratingField field_;
    FourierSeries2D potential_;
    bool mirror_ = false;
    double offset_ = 0.0;
    std::string name_ = "free";

    HamiltonianEval eval_raw(double q, double p, double t) const;
    double lagrangian_raw(double q, double v, double t) const;
};

/// Two Hamiltonians built from a shared generating field so that their
/// extended lifts Poisson-commute, plus the data they were built from.
struct CommutingPair {
    HamiltonianModel h1;
    HamiltonianModel h2;
    ConvexProfile profile1;
    ConvexProfile profile2;
    GeneratingField field;

    /// Analytic critical value of member i: h_i(0) + mean(g).
    double analytic_alpha(int member) const;
};

/// Rectangular sample lattice in (q, p, t) for bracket certification.
struct SampleLattice {
    int n_q = 10;
    int n_p = 10;
    int n_t = 10;
    double p_min = -2.0;
    double p_max = 2.0;
};

/// Builds the conjugated pair H_i = h_i(p + S_q) + S_t + g and certifies
/// commutation on the standard lattice.
CommutingPair make_conjugated_pair(const ConvexProfile& h1, const ConvexProfile& h2,
                                   const GeneratingField& field);

/// max over the lattice of |[H1, H2]| where
/// [H1,H2] = dH1/dq dH2/dp - dH1/dp dH2/dq + dH1/dt - dH2/dt.
double bracket_defect(const HamiltonianModel& h1, const HamiltonianModel& h2,
                      const SampleLattice& lattice = {});

/// Pointwise bracket at one phase-space point.
double bracket_value(const HamiltonianModel& h1, const HamiltonianModel& h2,
                     double q, double p, double t);

/// The standard commuting test pair: h1 = p^2/2, h2 = p^2/2 + p^4/4,
/// S = 0.05 sin(2 pi q) cos(2 pi t), g = cos(2 pi t).
CommutingPair pair_d1();

/// Non-commuting control: (pendulum(1), forced_pendulum(1, 0.5)).
std::pair<HamiltonianModel, HamiltonianModel> control_pair();

} // namespace wkam
