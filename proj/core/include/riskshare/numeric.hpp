#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace riskshare::numeric {

using Fn = std::function<double(double)>;

struct RootOptions {
    double f_tol = 1e-12;      // stop once |f(mid)| falls below this
    double x_tol = 1e-15;      // or once the bracket shrinks below this
    int max_iter = 260;
};

// Bisection on a sign-changing bracket [lo, hi].  f(lo) and f(hi) must have
// opposite signs (zero counts as either).  Throws NumericError otherwise.
double bisect(const Fn& f, double lo, double hi, const RootOptions& opt = {});

// Expands [lo, hi] geometrically around the seed until f changes sign.
// Returns the bracket; throws NumericError if none is found.
std::pair<double, double> grow_bracket(const Fn& f, double seed, double step,
                                       int max_grow = 200);

struct MaxResult {
    double x = 0.0;
    double value = 0.0;
};

// Golden-section maximization on [lo, hi] to the given x tolerance.
MaxResult golden_max(const Fn& f, double lo, double hi, double x_tol = 1e-6);

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
};

// Adaptive Simpson on a closed interval (integrand must be finite on [a,b]).
QuadResult integrate(const Fn& f, double a, double b, double abs_tol = 1e-10,
                     int max_depth = 52);

// Composite scheme for integrands that are finite on the open interval but
// may blow up (integrably) at either endpoint: adaptive Simpson on the bulk
// plus geometrically shrinking end segments, stopping once a segment
// contributes less than tail_tol.
QuadResult integrate_open(const Fn& f, double a, double b,
                          double abs_tol = 1e-10, double tail_tol = 1e-10);

// Lower convex hull (monotone chain) of points sorted by x.
// Returns the subset of input points forming the hull, left to right.
std::vector<std::pair<double, double>> lower_convex_hull(
    const std::vector<std::pair<double, double>>& pts);

// Midpoint grid t_k = (k - 1/2) / m, k = 1..m.
std::vector<double> midpoint_grid(int m);

// Central finite differences, for test oracles.
inline double central_diff(const Fn& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}
inline double central_diff2(const Fn& f, double x, double h) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

}  // namespace riskshare::numeric
