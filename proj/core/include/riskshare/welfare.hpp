#pragma once

#include <vector>

#include "riskshare/economy.hpp"

namespace riskshare {

/// Mixed law of a single payoff presented in U-space: point masses carried by
/// U-intervals plus smooth segments described by the payoff as a function of
/// U.  Expectations against dt or against distorted increments integrate the
/// atoms exactly and quadrature the segments.
struct MixedLaw {
    struct AtomPart {
        double u_lo = 0.0;
        double u_hi = 0.0;
        double value = 0.0;
    };
    struct SmoothPart {
        double u_lo = 0.0;
        double u_hi = 0.0;
        std::function<double(double)> payoff;  // nondecreasing or monotone in U
    };
    std::vector<AtomPart> atoms;
    std::vector<SmoothPart> segments;

    /// The agent's slice of a solved allocation.
    static MixedLaw from_allocation(const Allocation& alloc, size_t agent);
    static MixedLaw constant(double c);
    /// Discrete law on equiprobable U-intervals (values in quantile order).
    static MixedLaw discrete(const std::vector<double>& sorted_values);
};

struct QuadratureDiagnostics {
    double error_estimate = 0.0;
    long evaluations = 0;
};

struct CeResult {
    double value = 0.0;
    QuadratureDiagnostics diagnostics;
};

/// RDU certainty equivalent u1^{-1}( int u1(F^{-1}(p)) Ttilde'(p) dp ), with
/// atom intervals contributing u1(x) * (Ttilde(hi) - Ttilde(lo)) exactly.
CeResult ce_rdu(const MixedLaw& law, const Utility& u1, const Weighting& t,
                double abs_tol = 1e-10);

/// EU certainty equivalent (linear weights).
CeResult ce_eu(const MixedLaw& law, const Utility& u, double abs_tol = 1e-10);

struct WelfareReport {
    std::vector<double> ce;  // per agent, RDU first
    double ce_sum = 0.0;
    std::vector<double> side_payments;      // Kaldor-Hicks equalizing transfers
    std::vector<double> post_transfer_ce;   // all equal to ce_sum / n
    QuadratureDiagnostics diagnostics;
};

/// Certainty equivalents of every agent of a solved allocation plus the
/// Kaldor-Hicks transfer scheme that equalizes them.
WelfareReport welfare_report(const Economy& econ, const Allocation& alloc);

struct CeSweepRow {
    double alpha = 0.0;
    std::vector<double> ce;
    double ce_sum = 0.0;
};

/// Prelec-parameter sweep of the baseline roster: for each alpha the economy
/// is re-solved with the template's utilities, weights, and endowment.
std::vector<CeSweepRow> ce_sweep(const Economy& economy_template,
                                 const std::vector<double>& alphas);

}  // namespace riskshare
