#include "riskshare/welfare.hpp"

#include <cmath>

#include "riskshare/errors.hpp"
#include "riskshare/numeric.hpp"

namespace riskshare {

MixedLaw MixedLaw::from_allocation(const Allocation& alloc, size_t agent) {
    MixedLaw law;
    const Interval u = alloc.continuous_u_interval();
    const auto at = alloc.atom(agent);
    switch (alloc.envelope().kind()) {
        case Envelope::Kind::Identity:
            law.atoms.push_back({0.0, 1.0, at->location});
            return law;
        case Envelope::Kind::AnalyticInverseS:
            law.atoms.push_back({0.0, u.lo, at->location});
            break;
        case Envelope::Kind::AnalyticS:
            law.atoms.push_back({u.hi, 1.0, at->location});
            break;
        case Envelope::Kind::CoincidesWithConjugate:
            break;
        case Envelope::Kind::PiecewiseLinearHull: {
            // one atom per detached hull segment, smooth in between
            const auto& knots = alloc.envelope().knots();
            double cursor = 0.0;
            const double step = knots.size() > 1 ? 1.0 / 10000.0 : 1.0;
            for (size_t i = 0; i + 1 < knots.size(); ++i) {
                const double a = knots[i].first, b = knots[i + 1].first;
                if (b - a > 1.5 * step) {
                    if (a > cursor)
                        law.segments.push_back(
                            {cursor, a,
                             [alloc, agent](double t) { return alloc.payoff(agent, t); }});
                    law.atoms.push_back(
                        {a, b, alloc.payoff(agent, 0.5 * (a + b))});
                    cursor = b;
                }
            }
            if (cursor < 1.0)
                law.segments.push_back(
                    {cursor, 1.0,
                     [alloc, agent](double t) { return alloc.payoff(agent, t); }});
            return law;
        }
    }
    if (!u.empty())
        law.segments.push_back(
            {u.lo, u.hi,
             [alloc, agent](double t) { return alloc.payoff(agent, t); }});
    return law;
}

MixedLaw MixedLaw::constant(double c) {
    MixedLaw law;
    law.atoms.push_back({0.0, 1.0, c});
    return law;
}

MixedLaw MixedLaw::discrete(const std::vector<double>& sorted_values) {
    MixedLaw law;
    const size_t m = sorted_values.size();
    for (size_t k = 0; k < m; ++k)
        law.atoms.push_back({static_cast<double>(k) / m,
                             static_cast<double>(k + 1) / m, sorted_values[k]});
    return law;
}

namespace {

CeResult distorted_expectation(const MixedLaw& law, const Utility& u,
                               const Weighting* conj, double abs_tol) {
    double acc = 0.0;
    QuadratureDiagnostics diag;
    for (const auto& a : law.atoms) {
        const double w = conj ? (*conj)(a.u_hi) - (*conj)(a.u_lo)
                              : a.u_hi - a.u_lo;
        acc += u(a.value) * w;
    }
    for (const auto& seg : law.segments) {
        const auto f = [&](double t) {
            const double weight = conj ? conj->deriv(t) : 1.0;
            return u(seg.payoff(t)) * weight;
        };
        const auto q = numeric::integrate_open(f, seg.u_lo, seg.u_hi, abs_tol,
                                               abs_tol);
        acc += q.value;
        diag.error_estimate += q.error_estimate;
        diag.evaluations += q.evaluations;
    }
    return {acc, diag};
}

}  // namespace

CeResult ce_rdu(const MixedLaw& law, const Utility& u1, const Weighting& t,
                double abs_tol) {
    const Weighting conj = t.conjugate();
    CeResult r = distorted_expectation(law, u1, &conj, abs_tol);
    r.value = u1.inverse(r.value);
    return r;
}

CeResult ce_eu(const MixedLaw& law, const Utility& u, double abs_tol) {
    CeResult r = distorted_expectation(law, u, nullptr, abs_tol);
    r.value = u.inverse(r.value);
    return r;
}

WelfareReport welfare_report(const Economy& econ, const Allocation& alloc) {
    WelfareReport rep;
    const size_t n = econ.num_agents();
    rep.ce.resize(n);
    {
        const MixedLaw law = MixedLaw::from_allocation(alloc, 0);
        const CeResult r = ce_rdu(law, econ.rdu_utility, econ.rdu_weighting);
        rep.ce[0] = r.value;
        rep.diagnostics.error_estimate += r.diagnostics.error_estimate;
        rep.diagnostics.evaluations += r.diagnostics.evaluations;
    }
    for (size_t i = 1; i < n; ++i) {
        const MixedLaw law = MixedLaw::from_allocation(alloc, i);
        const CeResult r = ce_eu(law, econ.eu_agents[i - 1]);
        rep.ce[i] = r.value;
        rep.diagnostics.error_estimate += r.diagnostics.error_estimate;
        rep.diagnostics.evaluations += r.diagnostics.evaluations;
    }
    rep.ce_sum = 0.0;
    for (double c : rep.ce) rep.ce_sum += c;
    // Kaldor-Hicks: each agent hands over CE_i minus an equal share of the sum,
    // leaving everyone at ce_sum / n
    const double share = rep.ce_sum / static_cast<double>(n);
    rep.side_payments.resize(n);
    rep.post_transfer_ce.resize(n);
    for (size_t i = 0; i < n; ++i) {
        rep.side_payments[i] = rep.ce[i] - share;
        rep.post_transfer_ce[i] = rep.ce[i] - rep.side_payments[i];
    }
    return rep;
}

std::vector<CeSweepRow> ce_sweep(const Economy& economy_template,
                                 const std::vector<double>& alphas) {
    std::vector<CeSweepRow> rows;
    rows.reserve(alphas.size());
    for (double a : alphas) {
        Economy econ = economy_template;
        econ.rdu_weighting = Weighting::prelec(a);
        const Envelope env = build_envelope(econ.rdu_weighting);
        const Allocation alloc = solve_allocation(econ, env);
        const WelfareReport rep = welfare_report(econ, alloc);
        rows.push_back({a, rep.ce, rep.ce_sum});
    }
    return rows;
}

}  // namespace riskshare
