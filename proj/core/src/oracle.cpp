#include "riskshare/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "riskshare/errors.hpp"
#include "riskshare/numeric.hpp"

namespace riskshare {

void DiscreteEconomy::validate() const {
    if (states < 2) throw ConfigError("discrete economy: need m >= 2 states");
    economy.validate();
    if (allocation.size() != economy.num_agents())
        throw ConfigError("discrete economy: allocation row count mismatch");
    for (const auto& row : allocation)
        if (static_cast<int>(row.size()) != states)
            throw ConfigError("discrete economy: allocation column count mismatch");
    for (int s = 0; s < states; ++s) {
        double col = 0.0;
        for (const auto& row : allocation) col += row[static_cast<size_t>(s)];
        if (std::abs(col - economy.endowment) > 1e-6)
            throw ConfigError("discrete economy: column " + std::to_string(s) +
                              " does not sum to the endowment");
    }
}

double discrete_rdu(std::vector<double> outcomes, const Utility& u1,
                    const Weighting& t) {
    if (outcomes.empty()) throw ConfigError("discrete_rdu: empty outcome vector");
    std::sort(outcomes.begin(), outcomes.end());
    const Weighting conj = t.conjugate();
    const double m = static_cast<double>(outcomes.size());
    double acc = 0.0;
    double prev = 0.0;
    for (size_t kk = 0; kk < outcomes.size(); ++kk) {
        const double cur = conj((static_cast<double>(kk) + 1.0) / m);
        acc += u1(outcomes[kk]) * (cur - prev);
        prev = cur;
    }
    return acc;
}

namespace {

// Welfare of an agent-0 payoff vector with the EU side split optimally
// (Borch): X_i = I_i(J(w - x1)/lambda_i) state by state.
class InnerSplitWelfare {
public:
    InnerSplitWelfare(const Economy& econ)
        : econ_(econ), agg_(econ.eu_agents, econ.lambda) {}

    double operator()(const std::vector<double>& x1,
                      const Weighting& conj) const {
        const size_t m = x1.size();
        // RDU part: sorted ascending with conjugate increments
        std::vector<double> sorted(x1);
        std::sort(sorted.begin(), sorted.end());
        double acc = 0.0;
        double prev = 0.0;
        for (size_t kk = 0; kk < m; ++kk) {
            const double cur =
                conj((static_cast<double>(kk) + 1.0) / static_cast<double>(m));
            acc += econ_.rdu_utility(sorted[kk]) * (cur - prev);
            prev = cur;
        }
        // EU part: exact inner split per state
        for (size_t s = 0; s < m; ++s) {
            const double rest = econ_.endowment - x1[s];
            for (size_t i = 0; i < econ_.eu_agents.size(); ++i) {
                const double xi = agg_.component(i, rest);
                acc += econ_.lambda[i] * econ_.eu_agents[i](xi) /
                       static_cast<double>(m);
            }
        }
        return acc;
    }

    std::vector<double> eu_row(const std::vector<double>& x1, size_t i) const {
        std::vector<double> row(x1.size());
        for (size_t s = 0; s < x1.size(); ++s)
            row[s] = agg_.component(i, econ_.endowment - x1[s]);
        return row;
    }

private:
    const Economy& econ_;
    AggregateEu agg_;
};

}  // namespace

double discrete_welfare(const DiscreteEconomy& de) {
    de.validate();
    double acc = discrete_rdu(de.allocation[0], de.economy.rdu_utility,
                              de.economy.rdu_weighting);
    const double m = static_cast<double>(de.states);
    for (size_t i = 0; i < de.economy.eu_agents.size(); ++i) {
        double mean = 0.0;
        for (double x : de.allocation[i + 1]) mean += de.economy.eu_agents[i](x);
        acc += de.economy.lambda[i] * mean / m;
    }
    return acc;
}

OracleResult brute_force_welfare(const Economy& econ, int states,
                                 const OracleOptions& opt) {
    econ.validate();
    if (states < 2) throw ConfigError("brute_force_welfare: need m >= 2");
    const InnerSplitWelfare welfare(econ);
    const Weighting conj = econ.rdu_weighting.conjugate();
    const size_t m = static_cast<size_t>(states);

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unif(opt.range_lo, opt.range_hi);

    const auto levels = [&](int idx) {
        return opt.range_lo +
               (opt.range_hi - opt.range_lo) * idx / (opt.grid_levels - 1);
    };

    OracleResult result;
    result.best_welfare = -std::numeric_limits<double>::infinity();

    for (int start = 0; start < opt.restarts; ++start) {
        std::vector<double> x(m);
        if (start == 0) {
            std::fill(x.begin(), x.end(),
                      econ.endowment / static_cast<double>(econ.num_agents()));
        } else if (start == 1) {
            // a spread-out monotone start
            for (size_t s = 0; s < m; ++s)
                x[s] = opt.range_lo + (opt.range_hi - opt.range_lo) *
                                          (static_cast<double>(s) + 0.5) /
                                          static_cast<double>(m);
        } else {
            for (size_t s = 0; s < m; ++s) x[s] = unif(rng);
        }
        double best = welfare(x, conj);

        // coordinate-wise grid descent
        bool improved = true;
        int sweeps = 0;
        while (improved && sweeps++ < opt.max_sweeps) {
            improved = false;
            for (size_t s = 0; s < m; ++s) {
                const double keep = x[s];
                double cand_best = best;
                double cand_x = keep;
                for (int g = 0; g < opt.grid_levels; ++g) {
                    x[s] = levels(g);
                    const double v = welfare(x, conj);
                    if (v > cand_best) {
                        cand_best = v;
                        cand_x = x[s];
                    }
                }
                x[s] = cand_x;
                if (cand_best > best + 1e-15) {
                    best = cand_best;
                    improved = true;
                }
            }
        }
        // derivative-free polish: per-coordinate golden section
        const double span =
            (opt.range_hi - opt.range_lo) / (opt.grid_levels - 1);
        for (int round = 0; round < 4; ++round) {
            for (size_t s = 0; s < m; ++s) {
                const double center = x[s];
                const auto fn = [&](double v) {
                    x[s] = v;
                    return welfare(x, conj);
                };
                const auto r = numeric::golden_max(fn, center - span,
                                                   center + span, opt.polish_tol);
                x[s] = r.x;
                best = std::max(best, r.value);
            }
        }
        best = welfare(x, conj);
        if (best > result.best_welfare) {
            result.best_welfare = best;
            result.best_x1 = x;
        }
        ++result.restarts_used;
    }
    return result;
}

bool comonotone_check(const std::vector<std::vector<double>>& rows, double tol) {
    for (size_t a = 0; a < rows.size(); ++a) {
        for (size_t b = a + 1; b < rows.size(); ++b) {
            const auto& ya = rows[a];
            const auto& yb = rows[b];
            for (size_t s = 0; s < ya.size(); ++s)
                for (size_t t = s + 1; t < ya.size(); ++t)
                    if ((ya[t] - ya[s]) * (yb[t] - yb[s]) < -tol) return false;
        }
    }
    return true;
}

std::vector<double> closed_form_discretized(const Economy& econ, int states) {
    econ.validate();
    if (states < 2) throw ConfigError("closed_form_discretized: need m >= 2");
    const Weighting conj = econ.rdu_weighting.conjugate();
    const size_t m = static_cast<size_t>(states);
    std::vector<std::pair<double, double>> pts;
    pts.reserve(m + 1);
    for (size_t j = 0; j <= m; ++j) {
        const double p = static_cast<double>(j) / static_cast<double>(m);
        pts.emplace_back(p, conj(p));
    }
    const auto hull = numeric::lower_convex_hull(pts);
    // slope of the hull over each state interval ((k-1)/m, k/m]
    std::vector<double> slopes(m);
    size_t seg = 1;
    for (size_t kk = 0; kk < m; ++kk) {
        const double mid = (static_cast<double>(kk) + 0.5) / static_cast<double>(m);
        while (seg + 1 < hull.size() && hull[seg].first < mid) ++seg;
        slopes[kk] = (hull[seg].second - hull[seg - 1].second) /
                     (hull[seg].first - hull[seg - 1].first);
    }
    const Envelope env = build_envelope(econ.rdu_weighting);
    const Allocation alloc = solve_allocation(econ, env);
    std::vector<double> x1(m);
    for (size_t kk = 0; kk < m; ++kk) x1[kk] = alloc.m_lambda_inverse(slopes[kk]);
    return x1;
}

}  // namespace riskshare
