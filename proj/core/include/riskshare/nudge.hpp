#pragma once

#include <optional>
#include <vector>

#include "riskshare/economy.hpp"
#include "riskshare/envelope.hpp"
#include "riskshare/utility.hpp"
#include "riskshare/weighting.hpp"

namespace riskshare {

/// Planner's problem: spend M in [0, w] to blend the RDU agent's weighting
/// toward linearity via T_M = (1-f(M)) T + f(M) id with f(M) = 1-(1-M/w)^k,
/// at the cost of shrinking the endowment to w - M.  The EU side is the
/// representative agent of the underlying roster.
struct NudgeConfig {
    double k = 20.0;  // cost curvature, > 1
    Weighting weighting = Weighting::linear();
    Utility rdu_utility = Utility::cara(0.5);
    Utility eu_utility = Utility::cara(0.4);  // representative EU agent
    double lambda2 = 1.0;
    double endowment = 1.0;  // w
    double scan_points = 41;
    double refine_tol = 1e-6;
    double foc_tol = 1e-6;

    double effort_fraction(double m) const;   // f(M)
    double effort_fraction_deriv(double m) const;
    void validate() const;

    /// Collapse an n-agent economy to the two-agent planner setup.  For a
    /// CARA roster the representative agent is CARA(beta_bar) with weight
    /// equal to the aggregate constant exp(log_c).
    static NudgeConfig from_economy(const Economy& econ, double k);
};

Weighting nudged_weighting(const Weighting& t, double f_of_m);

/// delta_M(p) = delta(p) - f (delta(p) - p); same contact set, affine slope
/// blended toward 1.  Must agree pointwise with
/// build_envelope(nudged_weighting(T, f)).
Envelope nudged_envelope(const Envelope& env, double f_of_m);

/// Two-agent allocation map at effort M:
/// x_M(t) = m^{-1}( delta'(t) - f(M)(delta'(t) - 1) ),
/// m(x) = lambda2 u2'(w - M - x) / u1'(x).
class EffortAllocation {
public:
    double x1(double t) const;                 // RDU payoff at U = t
    double x2(double t) const { return cfg_w_ - m_ - x1(t); }
    double m_of(double x) const;
    double m_inverse(double y) const;
    double effort() const { return m_; }
    double f() const { return f_; }
    const Envelope& base_envelope() const { return *env_; }

private:
    friend EffortAllocation allocation_at_effort(const NudgeConfig&,
                                                 const Envelope&, double);
    std::shared_ptr<const NudgeConfig> cfg_;
    std::shared_ptr<const Envelope> env_;  // envelope of the *base* weighting
    double m_ = 0.0;
    double f_ = 0.0;
    double cfg_w_ = 0.0;
    bool cara_ = false;
    double b1_ = 0.0, b2_ = 0.0;
};

EffortAllocation allocation_at_effort(const NudgeConfig& cfg,
                                      const Envelope& base_env, double m);

/// Closed-form sensitivity x'_M(t) = dX_M(t)/dM.
double sensitivity(const NudgeConfig& cfg, const Envelope& base_env, double m,
                   double t);

/// Planner's value V(M) = U1(x_M, T_M) + E[u2(w - M - x_M(U))], with the
/// full-insurance region integrated exactly.
double planner_value(const NudgeConfig& cfg, const Envelope& base_env,
                     double m);

/// dV/dM evaluated semi-analytically (the first-order-condition residual).
double planner_value_derivative(const NudgeConfig& cfg,
                                const Envelope& base_env, double m);

struct NudgeSolution {
    double m_star = 0.0;
    double value = 0.0;
    bool boundary = false;         // M* = 0 (or w)
    bool multimodal_warning = false;
    double foc_residual = 0.0;     // dV/dM at M* (one-sided at boundaries)
    std::vector<std::pair<double, double>> value_curve;  // (M, V) scan samples
    double fi_mass_at_star = 0.0;
};

/// Derivative-free maximization of V over [0, w]: coarse bracketing scan,
/// golden-section refinement, FOC verification layer.  Multiple local maxima
/// in the scan raise the warning flag and the global scan optimum is refined.
NudgeSolution optimal_effort(const NudgeConfig& cfg);

}  // namespace riskshare
