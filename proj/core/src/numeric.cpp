#include "riskshare/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "riskshare/errors.hpp"

namespace riskshare::numeric {

double bisect(const Fn& f, double lo, double hi, const RootOptions& opt) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (std::signbit(flo) == std::signbit(fhi)) {
        throw NumericError("bisect: no sign change on [" + std::to_string(lo) +
                           ", " + std::to_string(hi) + "]");
    }
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < opt.max_iter; ++it) {
        mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::abs(fm) < opt.f_tol || (hi - lo) < opt.x_tol) return mid;
        if (std::signbit(fm) == std::signbit(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return mid;
}

std::pair<double, double> grow_bracket(const Fn& f, double seed, double step,
                                       int max_grow) {
    double lo = seed - step;
    double hi = seed + step;
    double flo = f(lo);
    double fhi = f(hi);
    for (int it = 0; it < max_grow; ++it) {
        if (std::signbit(flo) != std::signbit(fhi) || flo == 0.0 || fhi == 0.0)
            return {lo, hi};
        step *= 2.0;
        if (flo < 0.0 && fhi < 0.0) {
            // monotone-increasing use case: extend toward larger f
            hi += step;
            fhi = f(hi);
        } else if (flo > 0.0 && fhi > 0.0) {
            lo -= step;
            flo = f(lo);
        }
    }
    throw NumericError("grow_bracket: no sign change found");
}

MaxResult golden_max(const Fn& f, double lo, double hi, double x_tol) {
    static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > x_tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

namespace {

struct SimpsonState {
    const Fn* f;
    long evals = 0;
    double eval(double x) {
        ++evals;
        return (*f)(x);
    }
};

double simpson_rec(SimpsonState& st, double a, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth,
                   double* err_acc) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = st.eval(lm);
    const double frm = st.eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        *err_acc += std::abs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    return simpson_rec(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, err_acc) +
           simpson_rec(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, err_acc);
}

}  // namespace

QuadResult integrate(const Fn& f, double a, double b, double abs_tol,
                     int max_depth) {
    if (a == b) return {0.0, 0.0, 0};
    SimpsonState st{&f};
    const double fa = st.eval(a);
    const double m = 0.5 * (a + b);
    const double fm = st.eval(m);
    const double fb = st.eval(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double err = 0.0;
    const double v = simpson_rec(st, a, b, fa, fm, fb, whole, abs_tol, max_depth, &err);
    return {v, err, st.evals};
}

QuadResult integrate_open(const Fn& f, double a, double b, double abs_tol,
                          double tail_tol) {
    QuadResult total;
    const double width = b - a;
    if (width <= 0.0) return total;
    // bulk: keep a safety margin from both endpoints
    double ea = width / 64.0;
    double eb = width / 64.0;
    QuadResult bulk = integrate(f, a + ea, b - eb, abs_tol);
    total.value += bulk.value;
    total.error_estimate += bulk.error_estimate;
    total.evaluations += bulk.evaluations;
    // geometric refinement toward each endpoint; the floor keeps 1 - eps
    // representable away from the endpoint itself
    const double eps_floor =
        std::max(1e-13 * width, 8.0 * std::numeric_limits<double>::epsilon() *
                                    std::max(std::abs(a), std::abs(b)));
    for (int side = 0; side < 2; ++side) {
        double eps = width / 64.0;
        while (eps > eps_floor) {
            const double eps_next = std::max(eps * 0.25, eps_floor);
            double lo, hi;
            if (side == 0) {
                lo = a + eps_next;
                hi = a + eps;
            } else {
                lo = b - eps;
                hi = b - eps_next;
            }
            if (!(lo < hi)) break;
            QuadResult seg = integrate(f, lo, hi, abs_tol * 0.1);
            total.value += seg.value;
            total.error_estimate += seg.error_estimate;
            total.evaluations += seg.evaluations;
            if (std::abs(seg.value) < tail_tol) break;
            eps = eps_next;
        }
    }
    return total;
}

std::vector<std::pair<double, double>> lower_convex_hull(
    const std::vector<std::pair<double, double>>& pts) {
    std::vector<std::pair<double, double>> hull;
    hull.reserve(pts.size());
    for (const auto& p : pts) {
        while (hull.size() >= 2) {
            const auto& q = hull[hull.size() - 2];
            const auto& r = hull[hull.size() - 1];
            // pop r if it lies on or above the segment q-p
            const double cross = (r.first - q.first) * (p.second - q.second) -
                                 (r.second - q.second) * (p.first - q.first);
            if (cross <= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }
    return hull;
}

std::vector<double> midpoint_grid(int m) {
    std::vector<double> t(static_cast<size_t>(m));
    for (int kk = 0; kk < m; ++kk) t[static_cast<size_t>(kk)] = (kk + 0.5) / m;
    return t;
}

}  // namespace riskshare::numeric
