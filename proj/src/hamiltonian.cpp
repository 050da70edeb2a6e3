#include "wkam/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

namespace wkam {

bool GeneratingField::depends_on_t() const {
    return S.depends_on_t() || !g.terms.empty();
}

HamiltonianModel HamiltonianModel::free_particle() {
    HamiltonianModel m;
    m.family_ = Family::Free;
    m.name_ = "free";
    return m;
}

HamiltonianModel HamiltonianModel::pendulum(double amplitude) {
    HamiltonianModel m;
    m.family_ = Family::Pendulum;
    m.amplitude_ = amplitude;
    m.name_ = "pendulum(" + std::to_string(amplitude) + ")";
    return m;
}

HamiltonianModel HamiltonianModel::forced_pendulum(double amplitude, double epsilon) {
    HamiltonianModel m;
    m.family_ = Family::ForcedPendulum;
    m.amplitude_ = amplitude;
    m.epsilon_ = epsilon;
    m.name_ = "forced_pendulum(" + std::to_string(amplitude) + "," + std::to_string(epsilon) + ")";
    return m;
}

HamiltonianModel HamiltonianModel::conjugated(ConvexProfile profile, GeneratingField field) {
    HamiltonianModel m;
    m.family_ = Family::Conjugated;
    m.profile_ = std::move(profile);
    m.field_ = std::move(field);
    m.name_ = "conjugated";
    return m;
}

HamiltonianModel HamiltonianModel::custom(ConvexProfile profile, FourierSeries2D potential) {
    HamiltonianModel m;
    m.family_ = Family::Custom;
    m.profile_ = std::move(profile);
    m.potential_ = std::move(potential);
    m.name_ = "custom";
    return m;
}

HamiltonianModel HamiltonianModel::mirrored() const {
    HamiltonianModel m = *this;
    m.mirror_ = !m.mirror_;
    m.name_ = m.mirror_ ? "mirrored(" + name_ + ")" : name_;
    return m;
}

HamiltonianModel HamiltonianModel::shifted(double c) const {
    HamiltonianModel m = *this;
    m.offset_ += c;
    return m;
}

HamiltonianEval HamiltonianModel::eval(double q, double p, double t) const {
    if (!mirror_) {
        HamiltonianEval e = eval_raw(q, p, t);
        e.h += offset_;
        return e;
    }
    // Mirror: H~(q,p,[t]) = H(q,-p,[-t]). Chain rule flips dp and dt.
    HamiltonianEval e = eval_raw(q, -p, wrap_unit(-t));
    return {e.h + offset_, -e.dp, e.dq, -e.dt};
}

HamiltonianEval HamiltonianModel::eval_raw(double q, double p, double t) const {
    switch (family_) {
        case Family::Free:
            return {0.5 * p * p, p, 0.0, 0.0};
        case Family::Pendulum: {
            double a = kTwoPi * q;
            return {0.5 * p * p + amplitude_ * std::cos(a),
                    p,
                    -amplitude_ * kTwoPi * std::sin(a),
                    0.0};
        }
        case Family::ForcedPendulum: {
            double a = kTwoPi * q;
            double b = kTwoPi * t;
            double mod = 1.0 + epsilon_ * std::cos(b);
            return {0.5 * p * p + amplitude_ * std::cos(a) * mod,
                    p,
                    -amplitude_ * kTwoPi * std::sin(a) * mod,
                    -amplitude_ * std::cos(a) * epsilon_ * kTwoPi * std::sin(b)};
        }
        case Family::Conjugated: {
            const auto& S = field_.S;
            double sq = S.dq(q, t), st = S.dt(q, t);
            double sqq = S.dqq(q, t), sqt = S.dqt(q, t), stt = S.dtt(q, t);
            double shifted_p = p + sq;
            double hv = profile_.value(shifted_p);
            double hd = profile_.derivative(shifted_p);
            return {hv + st + field_.g.value(t),
                    hd,
                    hd * sqq + sqt,
                    hd * sqt + stt + field_.g.derivative(t)};
        }
        case Family::Custom:
            return {profile_.value(p) + potential_.value(q, t),
                    profile_.derivative(p),
                    potential_.dq(q, t),
                    potential_.dt(q, t)};
    }
    return {};
}

double HamiltonianModel::lagrangian(double q, double v, double t) const {
    if (!mirror_) return lagrangian_raw(q, v, t) - offset_;
    // L_{H~}(q, v, [t]) = L_H(q, -v, [-t]).
    return lagrangian_raw(q, -v, wrap_unit(-t)) - offset_;
}

double HamiltonianModel::lagrangian_raw(double q, double v, double t) const {
    switch (family_) {
        case Family::Free:
            return 0.5 * v * v;
        case Family::Pendulum:
            return 0.5 * v * v - amplitude_ * std::cos(kTwoPi * q);
        case Family::ForcedPendulum:
            return 0.5 * v * v -
                   amplitude_ * std::cos(kTwoPi * q) * (1.0 + epsilon_ * std::cos(kTwoPi * t));
        case Family::Conjugated: {
            const auto& S = field_.S;
            return profile_.conjugate(v) - v * S.dq(q, t) - S.dt(q, t) - field_.g.value(t);
        }
        case Family::Custom:
            return profile_.conjugate(v) - potential_.value(q, t);
    }
    return 0.0;
}

LegendreResult HamiltonianModel::legendre(double q, double v, double t) const {
    // dH/dp is strictly increasing in p; bracket on [-P, P] and polish.
    double pmax = profile_.p_max();
    double lo = -pmax, hi = pmax;
    auto slope = [&](double p) { return eval(q, p, t).dp; };
    if (slope(lo) > v || slope(hi) < v)
        throw NewtonDivergence("legendre: v=" + std::to_string(v) + " outside dH/dp range");
    double p = 0.5 * (lo + hi);
    for (int it = 0; it < 60; ++it) {
        double f = slope(p) - v;
        if (f > 0.0) hi = p; else lo = p;
        double h2 = (slope(p + 1e-6) - slope(p - 1e-6)) / 2e-6;
        double cand = (h2 > 0.0) ? p - f / h2 : 0.5 * (lo + hi);
        if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
        if (std::fabs(cand - p) <= 1e-15 * (1.0 + std::fabs(p)) && std::fabs(f) <= 1e-13) {
            p = cand;
            break;
        }
        p = cand;
    }
    if (std::fabs(slope(p) - v) > 1e-9)
        throw NewtonDivergence("legendre solve stalled at q=" + std::to_string(q));
    return {p * v - value(q, p, t), p};
}

bool HamiltonianModel::time_dependent() const {
    switch (family_) {
        case Family::Free:
        case Family::Pendulum:
            return false;
        case Family::ForcedPendulum:
            return epsilon_ != 0.0;
        case Family::Conjugated:
            return field_.depends_on_t();
        case Family::Custom:
            return potential_.depends_on_t();
    }
    return true;
}

double HamiltonianModel::velocity_bound_hint() const {
    switch (family_) {
        case Family::Free:
            return 1.0;
        case Family::Pendulum:
        case Family::ForcedPendulum:
            return 2.0 * std::sqrt(std::fabs(amplitude_) * (1.0 + std::fabs(epsilon_))) + 0.5;
        default:
            return 2.5;
    }
}

double bracket_value(const HamiltonianModel& h1, const HamiltonianModel& h2,
                     double q, double p, double t) {
    HamiltonianEval a = h1.eval(q, p, t);
    HamiltonianEval b = h2.eval(q, p, t);
    return a.dq * b.dp - a.dp * b.dq + a.dt - b.dt;
}

double bracket_defect(const HamiltonianModel& h1, const HamiltonianModel& h2,
                      const SampleLattice& lat) {
    double worst = 0.0;
    for (int i = 0; i < lat.n_q; ++i) {
        double q = static_cast<double>(i) / lat.n_q;
        for (int j = 0; j < lat.n_p; ++j) {
            double p = lat.p_min + (lat.p_max - lat.p_min) * j / std::max(1, lat.n_p - 1);
            for (int k = 0; k < lat.n_t; ++k) {
                double t = static_cast<double>(k) / lat.n_t;
                worst = std::max(worst, std::fabs(bracket_value(h1, h2, q, p, t)));
            }
        }
    }
    return worst;
}

double CommutingPair::analytic_alpha(int member) const {
    const ConvexProfile& prof = (member == 1) ? profile1 : profile2;
    return prof.value(0.0) + field.mean_forcing();
}

CommutingPair make_conjugated_pair(const ConvexProfile& h1, const ConvexProfile& h2,
                                   const GeneratingField& field) {
    CommutingPair pair{HamiltonianModel::conjugated(h1, field),
                       HamiltonianModel::conjugated(h2, field),
                       h1, h2, field};
    double defect = bracket_defect(pair.h1, pair.h2);
    if (defect > 1e-10)
        throw SolverError("make_conjugated_pair: bracket defect " + std::to_string(defect));
    return pair;
}

CommutingPair pair_d1() {
    GeneratingField field;
    field.S.terms.push_back({1, 1, TrigForm::SinCos, 0.05});
    field.g.terms.push_back({1, false, 1.0});
    ConvexProfile p1({{2, 0.5}});
    ConvexProfile p2({{2, 0.5}, {4, 0.25}});
    return make_conjugated_pair(p1, p2, field);
}

std::pair<HamiltonianModel, HamiltonianModel> control_pair() {
    return {HamiltonianModel::pendulum(1.0), HamiltonianModel::forced_pendulum(1.0, 0.5)};
}

} // namespace wkam
