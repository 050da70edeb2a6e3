#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "wkam/common.hpp"

namespace wkam {

/// Strictly convex, superlinear one-variable profile h(p), given as a
/// polynomial sum c * p^k. The inverse of h' is solved by bracketed Newton;
/// the convex conjugate h*(v) = sup_p (p v - h(p)) follows from it.
class ConvexProfile {
public:
    struct Term {
        int power = 2;
        double coeff = 0.0;
    };

    ConvexProfile() : ConvexProfile({{2, 0.5}}) {}

    explicit ConvexProfile(std::vector<Term> terms, double p_max = 8.0)
        : terms_(std::move(terms)), p_max_(p_max) {
        validate();
    }

    static ConvexProfile quadratic(double half_mass = 0.5) {
        return ConvexProfile({{2, half_mass}});
    }

    double value(double p) const {
        double s = 0.0;
        for (const auto& t : terms_) s += t.coeff * ipow(p, t.power);
        return s;
    }

    double derivative(double p) const {
        double s = 0.0;
        for (const auto& t : terms_)
            if (t.power >= 1) s += t.coeff * t.power * ipow(p, t.power - 1);
        return s;
    }

    double second_derivative(double p) const {
        double s = 0.0;
        for (const auto& t : terms_)
            if (t.power >= 2) s += t.coeff * t.power * (t.power - 1) * ipow(p, t.power - 2);
        return s;
    }

    /// Solve h'(p) = v on [-p_max, p_max]. Bisection bracket with Newton
    /// polish; h' is strictly increasing so the root is unique.
    double invert_derivative(double v) const {
        double lo = -p_max_, hi = p_max_;
        double flo = derivative(lo) - v, fhi = derivative(hi) - v;
        if (flo > 0.0 || fhi < 0.0)
            throw NewtonDivergence("h' does not bracket v=" + std::to_string(v) +
                                   " on [-" + std::to_string(p_max_) + ", " + std::to_string(p_max_) + "]");
        double p = 0.5 * (lo + hi);
        for (int it = 0; it < 60; ++it) {
            double f = derivative(p) - v;
            if (f > 0.0) hi = p; else lo = p;
            double df = second_derivative(p);
            double step = (df > 0.0) ? f / df : 0.0;
            double cand = p - step;
            if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
            if (std::fabs(cand - p) <= 1e-15 * (1.0 + std::fabs(p)) && std::fabs(f) <= 1e-12) return cand;
            p = cand;
        }
        if (std::fabs(derivative(p) - v) > 1e-9)
            throw NewtonDivergence("inverting h' at v=" + std::to_string(v));
        return p;
    }

    /// Convex conjugate h*(v).
    double conjugate(double v) const {
        double p = invert_derivative(v);
        return p * v - value(p);
    }

    double p_max() const { return p_max_; }
    const std::vector<Term>& terms() const { return terms_; }

private:
    std::vector<Term> terms_;
    double p_max_;

    void validate() const {
        const int samples = 257;
        for (int i = 0; i < samples; ++i) {
            double p = -p_max_ + 2.0 * p_max_ * i / (samples - 1);
            if (second_derivative(p) <= 0.0)
                throw ProfileNotConvex("h'' <= 0 at p=" + std::to_string(p));
        }
        // Superlinearity probe at the bracket ends.
        if (value(p_max_) / p_max_ < 2.0 || value(-p_max_) / p_max_ < 2.0)
            throw ProfileNotConvex("h(p)/|p| < 2 at |p|=" + std::to_string(p_max_));
    }

    static double ipow(double x, int n) {
        double r = 1.0;
        for (int i = 0; i < n; ++i) r *= x;
        return r;
    }
};

} // namespace wkam
