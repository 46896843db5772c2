#pragma once

#include <string>
#include <utility>
#include <vector>

#include "riskshare/weighting.hpp"

namespace riskshare {

/// Convex envelope delta of the conjugate distortion Ttilde(t) = 1 - T(1-t),
/// together with the tangent point p*, the affine slope, and the probability
/// mass of the full-insurance event.
class Envelope {
public:
    enum class Kind {
        Identity,               // T convex (or linear): delta(t) = t
        CoincidesWithConjugate, // T concave: delta = Ttilde
        AnalyticInverseS,       // affine on [0,p*] with slope Ttilde(p*)/p*
        AnalyticS,              // affine on [p*,1] with slope (1-Ttilde(p*))/(1-p*)
        PiecewiseLinearHull,    // generic lower convex hull of sampled Ttilde
    };

    Kind kind() const { return kind_; }
    const Weighting& source() const { return source_; }
    const Weighting& conjugate() const { return conj_; }
    Shape source_shape() const { return shape_; }

    /// Tangent point p* for the analytic kinds (1 or 0 when degenerate).
    double pstar() const { return pstar_; }
    /// Slope of the affine piece (analytic kinds).
    double affine_slope() const { return slope_; }
    double fi_mass() const { return fi_mass_; }
    const std::string& contact_description() const { return contact_; }

    /// delta(t)
    double operator()(double t) const;
    /// delta'(t), left-continuous at kinks.
    double deriv(double t) const;

    /// Hull knots (t, delta(t)) for Kind::PiecewiseLinearHull.
    const std::vector<std::pair<double, double>>& knots() const { return knots_; }

private:
    friend Envelope build_envelope(const Weighting&, int);
    friend Envelope nudged_envelope(const Envelope&, double);
    Envelope(Weighting source, Weighting conj)
        : source_(std::move(source)), conj_(std::move(conj)) {}

    Weighting source_;
    Weighting conj_;
    Shape shape_ = Shape::Other;
    Kind kind_ = Kind::Identity;
    double pstar_ = 1.0;
    double slope_ = 1.0;
    double fi_mass_ = 1.0;
    std::string contact_;
    std::vector<std::pair<double, double>> knots_;
};

std::string envelope_kind_name(Envelope::Kind k);

/// Unique p* in [pbar, 1] solving Ttilde'(p) p = Ttilde(p) for an inverse-S
/// conjugate with inflection pbar.  Returns 1 when the envelope degenerates
/// to the identity (no detachment before 1).
double tangent_point_inverse_s(const Weighting& conj, double pbar);

/// Unique p* in [0, pbar] solving Ttilde'(p)(1-p) = 1 - Ttilde(p) for an
/// S-shaped conjugate.  Returns 0 when delta is the identity.
double tangent_point_s(const Weighting& conj, double pbar);

/// Shape dispatch per the FI table: convex/linear T -> identity envelope,
/// concave T -> delta = Ttilde, S / inverse-S -> analytic two-piece form,
/// anything else -> lower convex hull of `hull_points` samples.
Envelope build_envelope(const Weighting& t, int hull_points = 10001);

/// Envelope of the conjugate's samples only (tabulated input path).
std::vector<std::pair<double, double>> conjugate_hull(const Weighting& t,
                                                      int samples);

}  // namespace riskshare
