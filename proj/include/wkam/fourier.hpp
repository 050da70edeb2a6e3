#pragma once

#include <cmath>
#include <vector>

#include "wkam/common.hpp"

namespace wkam {

/// One term of a real Fourier series on the unit circle:
/// amp * cos(2 pi k x) or amp * sin(2 pi k x).
struct FourierTerm1D {
    int k = 0;
    bool is_sin = false;
    double amp = 0.0;
};

/// Finite Fourier series g(x) on the circle, with exact derivatives.
/// The constant coefficient is carried separately; mean(g) equals it.
struct FourierSeries1D {
    double constant = 0.0;
    std::vector<FourierTerm1D> terms;

    double value(double x) const {
        double s = constant;
        for (const auto& t : terms) {
            double a = kTwoPi * t.k * x;
            s += t.amp * (t.is_sin ? std::sin(a) : std::cos(a));
        }
        return s;
    }

    double derivative(double x) const {
        double s = 0.0;
        for (const auto& t : terms) {
            double w = kTwoPi * t.k;
            double a = w * x;
            s += t.amp * w * (t.is_sin ? std::cos(a) : -std::sin(a));
        }
        return s;
    }

    double mean() const { return constant; }

    int max_mode() const {
        int m = 0;
        for (const auto& t : terms) m = std::max(m, std::abs(t.k));
        return m;
    }

    static FourierSeries1D zero() { return {}; }
};

enum class TrigForm { CosCos, CosSin, SinCos, SinSin };

/// One term amp * f(2 pi kq q) * g(2 pi kt t) of a double Fourier series,
/// where f,g are cos/sin according to `form`.
struct FourierTerm2D {
    int kq = 0;
    int kt = 0;
    TrigForm form = TrigForm::CosCos;
    double amp = 0.0;
};

/// Finite double Fourier series S(q, t), 1-periodic in each argument by
/// construction, with exact partial derivatives through second order.
struct FourierSeries2D {
    std::vector<FourierTerm2D> terms;

    // dq/dt = number of q- and t-derivatives to apply (0..2 each).
    double partial(double q, double t, int dq, int dt) const {
        double s = 0.0;
        for (const auto& term : terms) {
            double wq = kTwoPi * term.kq;
            double wt = kTwoPi * term.kt;
            bool q_sin = (term.form == TrigForm::SinCos || term.form == TrigForm::SinSin);
            bool t_sin = (term.form == TrigForm::CosSin || term.form == TrigForm::SinSin);
            double fq = trig_deriv(q_sin, wq, q, dq);
            double ft = trig_deriv(t_sin, wt, t, dt);
            s += term.amp * fq * ft;
        }
        return s;
    }

    double value(double q, double t) const { return partial(q, t, 0, 0); }
    double dq(double q, double t) const { return partial(q, t, 1, 0); }
    double dt(double q, double t) const { return partial(q, t, 0, 1); }
    double dqq(double q, double t) const { return partial(q, t, 2, 0); }
    double dqt(double q, double t) const { return partial(q, t, 1, 1); }
    double dtt(double q, double t) const { return partial(q, t, 0, 2); }

    bool empty() const { return terms.empty(); }

    bool depends_on_t() const {
        for (const auto& term : terms) {
            if (term.kt != 0) return true;
            if (term.form == TrigForm::CosSin || term.form == TrigForm::SinSin) return true;
        }
        return false;
    }

    int max_mode() const {
        int m = 0;
        for (const auto& t : terms) m = std::max({m, std::abs(t.kq), std::abs(t.kt)});
        return m;
    }

private:
    // n-th derivative of cos/sin(w x), n <= 2.
    static double trig_deriv(bool is_sin, double w, double x, int n) {
        double a = w * x;
        double base = is_sin ? std::sin(a) : std::cos(a);
        if (n == 0) return base;
        double first = is_sin ? w * std::cos(a) : -w * std::sin(a);
        if (n == 1) return first;
        return -w * w * base;
    }
};

} // namespace wkam
