#include "riskshare/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "riskshare/errors.hpp"
#include "riskshare/numeric.hpp"

namespace riskshare {

namespace {

constexpr double kBracketGuard = 1e-9;

std::string interval_str(double a, double b) {
    std::ostringstream os;
    os.precision(6);
    os << "[" << a << ", " << b << "]";
    return os.str();
}

}  // namespace

std::string envelope_kind_name(Envelope::Kind k) {
    switch (k) {
        case Envelope::Kind::Identity: return "Identity";
        case Envelope::Kind::CoincidesWithConjugate: return "CoincidesWithTtilde";
        case Envelope::Kind::AnalyticInverseS: return "AnalyticInverseS";
        case Envelope::Kind::AnalyticS: return "AnalyticS";
        case Envelope::Kind::PiecewiseLinearHull: return "PiecewiseLinearHull";
    }
    return "?";
}

double tangent_point_inverse_s(const Weighting& conj, double pbar) {
    const auto g = [&conj](double p) { return conj.deriv(p) * p - conj(p); };
    // g <= 0 at the inflection (concave part), g > 0 once the convex tail
    // outruns the chord from the origin.  Ttilde' may blow up at 1, so the
    // right edge starts at 1 - guard and shrinks geometrically.
    double lo = pbar;
    double glo = g(lo);
    if (glo > 0.0) {
        // unexpected: crossing happens before the inflection; scan left
        double scan = pbar;
        bool found = false;
        for (int i = 0; i < 60 && scan > 1e-9; ++i) {
            const double next = scan * 0.5;
            if (g(next) <= 0.0) {
                lo = next;
                glo = g(lo);
                found = true;
                break;
            }
            scan = next;
        }
        if (!found)
            throw EnvelopeError(
                "inverse-S tangent: no sign change below the inflection pbar=" +
                std::to_string(pbar) + "; g(pbar)=" + std::to_string(glo));
    }
    double eps = 1e-3;
    double hi = 1.0 - eps;
    while (hi <= lo) {
        eps *= 0.5;
        hi = 1.0 - eps;
    }
    double ghi = g(hi);
    while (ghi <= 0.0 && eps > kBracketGuard * 1e-4) {
        eps *= 0.1;
        hi = 1.0 - eps;
        ghi = g(hi);
    }
    if (ghi <= 0.0) {
        // Ttilde stays above its origin chord all the way to 1: the convex
        // tail never detaches and the envelope is the identity line.
        return 1.0;
    }
    return numeric::bisect(g, lo, hi, {1e-12, 1e-16, 300});
}

double tangent_point_s(const Weighting& conj, double pbar) {
    const auto h = [&conj](double p) {
        return conj.deriv(p) * (1.0 - p) - (1.0 - conj(p));
    };
    double hi = pbar;
    double hhi = h(hi);
    if (hhi < 0.0) {
        double scan = pbar;
        bool found = false;
        for (int i = 0; i < 60 && scan < 1.0 - 1e-9; ++i) {
            const double next = 0.5 * (scan + 1.0);
            if (h(next) >= 0.0) {
                hi = next;
                hhi = h(hi);
                found = true;
                break;
            }
            scan = next;
        }
        if (!found)
            throw EnvelopeError(
                "S tangent: no sign change above the inflection pbar=" +
                std::to_string(pbar) + "; h(pbar)=" + std::to_string(hhi));
    }
    double eps = 1e-3;
    double lo = eps;
    while (lo >= hi) {
        eps *= 0.5;
        lo = eps;
    }
    double hlo = h(lo);
    while (hlo >= 0.0 && eps > kBracketGuard * 1e-4) {
        eps *= 0.1;
        lo = eps;
        hlo = h(lo);
    }
    if (hlo >= 0.0) return 0.0;  // chord to (1,1) binds from the start
    return numeric::bisect(h, lo, hi, {1e-12, 1e-16, 300});
}

Envelope build_envelope(const Weighting& t, int hull_points) {
    Envelope env(t, t.conjugate());
    const ShapeReport rep = classify(t);
    env.shape_ = rep.shape;
    switch (rep.shape) {
        case Shape::Linear:
        case Shape::Convex:
            env.kind_ = Envelope::Kind::Identity;
            env.pstar_ = 1.0;
            env.slope_ = 1.0;
            env.fi_mass_ = 1.0;
            env.contact_ = "affine on [0, 1]; contact at the endpoints";
            return env;
        case Shape::Concave:
            env.kind_ = Envelope::Kind::CoincidesWithConjugate;
            env.pstar_ = 0.0;
            env.slope_ = 0.0;
            env.fi_mass_ = 0.0;
            env.contact_ = "delta = Ttilde on [0, 1]";
            return env;
        case Shape::InverseSShaped: {
            const double pbar = 1.0 - rep.inflection.value_or(0.5);
            const double ps = tangent_point_inverse_s(env.conj_, pbar);
            env.kind_ = Envelope::Kind::AnalyticInverseS;
            env.pstar_ = ps;
            env.slope_ = ps >= 1.0 ? 1.0 : env.conj_(ps) / ps;
            env.fi_mass_ = ps;
            env.contact_ = "affine on " + interval_str(0.0, ps) +
                           "; delta = Ttilde on " + interval_str(ps, 1.0);
            return env;
        }
        case Shape::SShaped: {
            const double pbar = 1.0 - rep.inflection.value_or(0.5);
            const double ps = tangent_point_s(env.conj_, pbar);
            env.kind_ = Envelope::Kind::AnalyticS;
            env.pstar_ = ps;
            env.slope_ =
                ps <= 0.0 ? 1.0 : (1.0 - env.conj_(ps)) / (1.0 - ps);
            env.fi_mass_ = 1.0 - ps;
            env.contact_ = "delta = Ttilde on " + interval_str(0.0, ps) +
                           "; affine on " + interval_str(ps, 1.0);
            return env;
        }
        case Shape::Other:
            break;
    }
    // generic fall-back: lower convex hull of sampled Ttilde
    env.kind_ = Envelope::Kind::PiecewiseLinearHull;
    env.knots_ = conjugate_hull(t, hull_points);
    double detached = 0.0;
    const double step = 1.0 / (hull_points - 1);
    for (size_t i = 0; i + 1 < env.knots_.size(); ++i) {
        const double gap = env.knots_[i + 1].first - env.knots_[i].first;
        if (gap > 1.5 * step) detached += gap;
    }
    env.pstar_ = 0.0;
    env.slope_ = 0.0;
    env.fi_mass_ = detached;
    env.contact_ = "piecewise-linear hull with " +
                   std::to_string(env.knots_.size()) + " knots";
    return env;
}

std::vector<std::pair<double, double>> conjugate_hull(const Weighting& t,
                                                      int samples) {
    const Weighting conj = t.conjugate();
    std::vector<std::pair<double, double>> pts;
    pts.reserve(static_cast<size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        const double x = static_cast<double>(i) / (samples - 1);
        pts.emplace_back(x, conj(x));
    }
    return numeric::lower_convex_hull(pts);
}

double Envelope::operator()(double t) const {
    switch (kind_) {
        case Kind::Identity:
            return t;
        case Kind::CoincidesWithConjugate:
            return conj_(t);
        case Kind::AnalyticInverseS:
            return t <= pstar_ ? slope_ * t : conj_(t);
        case Kind::AnalyticS:
            return t <= pstar_ ? conj_(t)
                               : conj_(pstar_) + slope_ * (t - pstar_);
        case Kind::PiecewiseLinearHull: {
            auto it = std::lower_bound(
                knots_.begin(), knots_.end(), t,
                [](const auto& knot, double x) { return knot.first < x; });
            if (it == knots_.begin()) return it->second;
            if (it == knots_.end()) return knots_.back().second;
            const auto& [x1, y1] = *(it - 1);
            const auto& [x2, y2] = *it;
            const double w = (t - x1) / (x2 - x1);
            return y1 + w * (y2 - y1);
        }
    }
    return t;
}

double Envelope::deriv(double t) const {
    switch (kind_) {
        case Kind::Identity:
            return 1.0;
        case Kind::CoincidesWithConjugate:
            return conj_.deriv(t);
        case Kind::AnalyticInverseS:
            // left-continuous: the kink at p* belongs to the affine piece
            return t <= pstar_ ? slope_ : conj_.deriv(t);
        case Kind::AnalyticS:
            return t <= pstar_ ? conj_.deriv(t) : slope_;
        case Kind::PiecewiseLinearHull: {
            auto it = std::lower_bound(
                knots_.begin(), knots_.end(), t,
                [](const auto& knot, double x) { return knot.first < x; });
            if (it == knots_.begin()) ++it;
            if (it == knots_.end()) --it;
            const auto& [x1, y1] = *(it - 1);
            const auto& [x2, y2] = *it;
            return (y2 - y1) / (x2 - x1);
        }
    }
    return 1.0;
}

}  // namespace riskshare
