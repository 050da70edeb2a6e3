#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace wkam {

// Sentinel for "unreachable" in min-plus arithmetic. Kept finite so sums
// stay total; anything above kBig/2 is reported as unreachable.
inline constexpr double kBig = 1e12;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

inline bool is_unreachable(double x) { return x >= kBig / 2; }

/// Snap near-sentinel values back onto the sentinel so that arithmetic with
/// finite summands cannot leak below it.
inline double snap_big(double x) {
    if (x >= kBig / 2) return kBig;
    if (x <= -kBig / 2) return -kBig;
    return x;
}

/// Wrap a real number into [0,1).
inline double wrap_unit(double x) {
    double y = x - std::floor(x);
    return (y >= 1.0) ? y - 1.0 : y;
}

/// Distance between two points of the unit circle.
inline double circle_dist(double a, double b) {
    double d = std::fabs(wrap_unit(a) - wrap_unit(b));
    return d <= 0.5 ? d : 1.0 - d;
}

/// Positive modulo for indices.
inline int wrap_index(int i, int n) {
    int r = i % n;
    return r < 0 ? r + n : r;
}

// Error taxonomy. Every failure mode carries a distinct type so callers can
// react precisely; the message repeats the name for CLI surfacing.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ProfileNotConvex : SolverError {
    explicit ProfileNotConvex(const std::string& m) : SolverError("ProfileNotConvex: " + m) {}
};
struct NewtonDivergence : SolverError {
    explicit NewtonDivergence(const std::string& m) : SolverError("NewtonDivergence: " + m) {}
};
struct ShapeMismatch : SolverError {
    explicit ShapeMismatch(const std::string& m) : SolverError("ShapeMismatch: " + m) {}
};
struct SliceMismatch : SolverError {
    explicit SliceMismatch(const std::string& m) : SolverError("SliceMismatch: " + m) {}
};
struct NonFiniteKernel : SolverError {
    explicit NonFiniteKernel(const std::string& m) : SolverError("NonFiniteKernel: " + m) {}
};
struct NoConvergence : SolverError {
    explicit NoConvergence(const std::string& m) : SolverError("NoConvergence: " + m) {}
};
struct NonConvergence : SolverError {
    explicit NonConvergence(const std::string& m) : SolverError("NonConvergence: " + m) {}
};
struct WrapMismatch : SolverError {
    explicit WrapMismatch(const std::string& m) : SolverError("WrapMismatch: " + m) {}
};
struct EmptyMask : SolverError {
    explicit EmptyMask(const std::string& m) : SolverError("EmptyMask: " + m) {}
};
struct WindowNotSettled : SolverError {
    explicit WindowNotSettled(const std::string& m) : SolverError("WindowNotSettled: " + m) {}
};
struct StepRejected : SolverError {
    explicit StepRejected(const std::string& m) : SolverError("StepRejected: " + m) {}
};
struct ConfigInvalid : SolverError {
    explicit ConfigInvalid(const std::string& m) : SolverError("ConfigInvalid: " + m) {}
};

} // namespace wkam
