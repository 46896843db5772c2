#pragma once

// Shared fixtures: the scaled-restriction weightings used by the
// concave/convex experiments and the baseline CARA rosters.

#include <cmath>

#include "riskshare/economy.hpp"
#include "riskshare/weighting.hpp"

namespace testhelpers {

using riskshare::Economy;
using riskshare::Utility;
using riskshare::Weighting;

// Convex weighting built from the conjugate of a Prelec distortion restricted
// to [0, 1/4] and rescaled: T1(p) = 1 - Ttilde((1-p)/4) / Ttilde(1/4).
inline Weighting make_convex_restriction(double alpha) {
    const Weighting conj = Weighting::prelec(alpha).conjugate();
    const double scale = conj(0.25);
    return Weighting::custom(
        [conj, scale](double p) { return 1.0 - conj((1.0 - p) / 4.0) / scale; },
        [conj, scale](double p) { return conj.deriv((1.0 - p) / 4.0) / (4.0 * scale); },
        [conj, scale](double p) { return -conj.deriv2((1.0 - p) / 4.0) / (16.0 * scale); },
        "convex-restriction");
}

// Concave weighting: T2(p) = T(p/4) / T(1/4).
inline Weighting make_concave_restriction(double alpha) {
    const Weighting base = Weighting::prelec(alpha);
    const double scale = base(0.25);
    return Weighting::custom(
        [base, scale](double p) { return base(p / 4.0) / scale; },
        [base, scale](double p) { return base.deriv(p / 4.0) / (4.0 * scale); },
        [base, scale](double p) { return base.deriv2(p / 4.0) / (16.0 * scale); },
        "concave-restriction");
}

// Baseline three-agent roster with weights that zero all side payments.
inline Economy baseline_economy(double alpha, double b1 = 0.5, double b2 = 0.5,
                                double b3 = 2.0, double w = 0.0) {
    return Economy{Weighting::prelec(alpha),
                   Utility::cara(b1),
                   {Utility::cara(b2), Utility::cara(b3)},
                   riskshare::no_side_payment_weights(b2, b3),
                   w};
}

// CARA wrapped as an opaque custom utility: exercises the generic code paths.
inline Utility cara_as_custom(double beta) {
    return Utility::custom(
        [beta](double x) { return -std::exp(-beta * x) / beta; },
        [beta](double x) { return std::exp(-beta * x); },
        [beta](double x) { return -beta * std::exp(-beta * x); },
        [beta](double y) { return -std::log(y) / beta; }, -30.0, 30.0,
        "cara-opaque");
}

}  // namespace testhelpers
