#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "riskshare/envelope.hpp"
#include "riskshare/utility.hpp"
#include "riskshare/weighting.hpp"

namespace riskshare {

/// One RDU agent (index 0) plus n-1 >= 1 EU agents with welfare weights
/// lambda and a constant aggregate endowment w.
struct Economy {
    Weighting rdu_weighting;
    Utility rdu_utility;
    std::vector<Utility> eu_agents;
    std::vector<double> lambda;  // one weight per EU agent
    double endowment = 0.0;      // w

    size_t num_agents() const { return eu_agents.size() + 1; }
    void validate() const;
};

struct Atom {
    double location = 0.0;
    double mass = 0.0;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool empty() const { return !(lo < hi); }
};

/// Welfare-optimal allocation: every agent's payoff is a deterministic
/// transform of one uniform variate U.  Agent 0 (RDU) gets
/// X1 = m_lambda^{-1}(delta'(U)); EU agent i gets I_i(J(w - X1)/lambda_i).
/// Payoffs carry an atom on the full-insurance event plus an absolutely
/// continuous part whose quantile and density are exposed per agent.
class Allocation {
public:
    size_t num_agents() const;
    double endowment() const;
    const Envelope& envelope() const { return *envelope_; }

    /// Payoff of `agent` when U = t (the shared coupling).  Agent 0 is RDU.
    double payoff(size_t agent, double t) const;
    /// The agent's own left-continuous quantile function.
    double quantile(size_t agent, double s) const;

    double fi_mass() const;
    /// Full-insurance atom of the agent's law; absent when fi_mass is 0.
    std::optional<Atom> atom(size_t agent) const;
    /// U-interval carrying the absolutely continuous part (may be empty).
    Interval continuous_u_interval() const;
    /// Support of the continuous part of the agent's law (bounds evaluated
    /// at the numeric edge of the U-interval; may be effectively unbounded).
    Interval continuous_support(size_t agent) const;

    /// Density of the continuous part at x (analytic transform of the
    /// inverse-S / S closed form).  Zero outside the support.  Throws
    /// NumericError for hull-backed envelopes (use sampled_density).
    double density(size_t agent, double x) const;

    /// Monte Carlo fallback: histogram of `draws` transformed uniforms.
    /// Returns bin centers and density estimates for the continuous part.
    std::vector<std::pair<double, double>> sampled_density(
        size_t agent, int bins, long draws, unsigned long long seed) const;

    /// m_lambda(x) = u_lambda'(w - x) / u_1'(x) and its inverse.
    double m_lambda(double x) const;
    double m_lambda_inverse(double y) const;

private:
    friend Allocation solve_allocation(const Economy&, const Envelope&);
    Allocation() = default;

    std::shared_ptr<const Economy> econ_;
    std::shared_ptr<const Envelope> envelope_;
    std::shared_ptr<const AggregateEu> agg_;
    // CARA fast-path constants: x = (ln y - log_c + beta_bar w)/(beta1+beta_bar)
    bool cara_ = false;
    double beta1_ = 0.0;
    double beta_bar_ = 0.0;
    double log_c_ = 0.0;
};

/// Builds the aggregate EU agent and the quantile-space allocation map for
/// the given envelope (which must come from econ.rdu_weighting).
Allocation solve_allocation(const Economy& econ, const Envelope& envelope);

/// CARA closed form at arbitrary w: X1(t) = (ln delta'(t) - log_c + beta_bar w)
/// / (beta1 + beta_bar), with the random/side-payment decomposition of the
/// EU payoffs.  Requires an all-CARA roster.
struct CaraClosedForm {
    double beta1 = 0.0;
    double beta_bar = 0.0;
    double log_c = 0.0;          // ln prod_i lambda_i^{beta_bar/beta_i}
    std::vector<double> betas;   // EU betas
    std::vector<double> lambda;
    double endowment = 0.0;

    /// X1 as a function of the uniform variate.
    double x1(const Envelope& env, double t) const;
    /// Random component of EU agent j's payoff (j indexes EU agents from 0).
    double random_part(const Envelope& env, size_t j, double t) const;
    /// Deterministic side payment of EU agent j (zero-sum with the RDU's).
    double side_payment(size_t j) const;
    double rdu_side_payment() const;
    /// Full-insurance share of w accruing to agent j (lambda-independent).
    double fi_share(size_t j) const;
    double rdu_fi_share() const;
};

CaraClosedForm cara_closed_form(const Economy& econ);

/// Welfare weights that zero every deterministic side payment for a
/// three-agent CARA roster: bisection on the tangency-of-logs condition
/// under lambda2 + lambda3 = 1, then rescaled so that the aggregate constant
/// log_c vanishes (the scale of lambda only shifts payoffs deterministically).
std::vector<double> no_side_payment_weights(double beta2, double beta3);

/// Max Borch-rule deviation max_{i,j,t} |lam_i u_i'(X_i) - lam_j u_j'(X_j)| /
/// scale over a midpoint U-grid.
double borch_check(const Allocation& alloc, const Economy& econ,
                   int grid = 1001);

}  // namespace riskshare
