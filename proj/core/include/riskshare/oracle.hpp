#pragma once

#include <vector>

#include "riskshare/economy.hpp"
#include "riskshare/weighting.hpp"

namespace riskshare {

/// Finite surrogate of the economy: m equiprobable states, allocation given
/// as an n x m wealth matrix whose columns sum to the endowment.
struct DiscreteEconomy {
    int states = 0;  // m >= 2
    Economy economy;
    std::vector<std::vector<double>> allocation;  // [agent][state]

    void validate() const;
};

/// Rank-dependent evaluation over m equiprobable outcomes: sort ascending and
/// weight the k-th smallest by Ttilde(k/m) - Ttilde((k-1)/m).
double discrete_rdu(std::vector<double> outcomes, const Utility& u1,
                    const Weighting& t);

/// Full welfare of an allocation matrix: discrete RDU for agent 0 plus
/// lambda-weighted EU means for the rest.
double discrete_welfare(const DiscreteEconomy& de);

struct OracleResult {
    std::vector<double> best_x1;  // RDU payoff per state (EU split is exact)
    double best_welfare = 0.0;
    int restarts_used = 0;
};

struct OracleOptions {
    int grid_levels = 41;       // per-state wealth levels in the declared range
    double range_lo = -4.0;     // declared wealth range for agent 0
    double range_hi = 4.0;
    int restarts = 6;
    unsigned long long seed = 42;
    int max_sweeps = 200;
    double polish_tol = 1e-10;
};

/// Heuristic lower bound on the discrete optimum: multi-start coordinate
/// search over agent 0's state payoffs (the EU side is split exactly via the
/// Borch rule), followed by per-coordinate derivative-free polish.
OracleResult brute_force_welfare(const Economy& econ, int states,
                                 const OracleOptions& opt = {});

/// Pairwise comonotonicity of the rows (state-ordered increments).
bool comonotone_check(const std::vector<std::vector<double>>& rows,
                      double tol = 1e-12);

/// The closed-form allocation projected onto the m-state world: agent 0's
/// state-k payoff is m_lambda^{-1} of the k-th slope of the lower convex hull
/// of Ttilde sampled at j/m.  This is the exact discrete analogue of the
/// envelope construction (midpoint evaluation of the continuum envelope is
/// not within oracle tolerance of the discrete optimum at small m).
std::vector<double> closed_form_discretized(const Economy& econ, int states);

}  // namespace riskshare
