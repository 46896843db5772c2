#include "riskshare/economy.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "riskshare/errors.hpp"
#include "riskshare/numeric.hpp"

namespace riskshare {

namespace {

// numeric edge of the U-interval used for open-endpoint evaluations
constexpr double kEdge = 1e-12;

}  // namespace

void Economy::validate() const {
    if (eu_agents.empty())
        throw ConfigError("economy: need at least one EU agent (n >= 2)");
    if (lambda.size() != eu_agents.size())
        throw ConfigError("economy: lambda must have one entry per EU agent");
    for (double l : lambda)
        if (!(l > 0.0) || !std::isfinite(l))
            throw ConfigError("economy: welfare weights must be positive");
    if (!std::isfinite(endowment))
        throw ConfigError("economy: aggregate endowment must be finite");
}

Allocation solve_allocation(const Economy& econ, const Envelope& envelope) {
    econ.validate();
    Allocation a;
    a.econ_ = std::make_shared<const Economy>(econ);
    a.envelope_ = std::make_shared<const Envelope>(envelope);
    a.agg_ = std::make_shared<const AggregateEu>(econ.eu_agents, econ.lambda);
    if (econ.rdu_utility.is_cara() && a.agg_->cara_fast_path()) {
        a.cara_ = true;
        a.beta1_ = econ.rdu_utility.cara_beta();
        a.beta_bar_ = a.agg_->beta_bar();
        a.log_c_ = a.agg_->log_c();
    }
    return a;
}

size_t Allocation::num_agents() const { return econ_->num_agents(); }
double Allocation::endowment() const { return econ_->endowment; }

double Allocation::m_lambda(double x) const {
    const double w = econ_->endowment;
    return agg_->marginal(w - x) / econ_->rdu_utility.deriv(x);
}

double Allocation::m_lambda_inverse(double y) const {
    if (!(y > 0.0))
        throw NumericError("m_lambda_inverse: argument must be positive, got " +
                           std::to_string(y));
    if (cara_)
        return (std::log(y) - log_c_ + beta_bar_ * econ_->endowment) /
               (beta1_ + beta_bar_);
    const auto g = [this, y](double x) { return m_lambda(x) - y; };
    auto [lo, hi] = numeric::grow_bracket(g, 0.0, 1.0);
    const double x = numeric::bisect(g, lo, hi, {0.0, 1e-14, 260});
    if (std::abs(m_lambda(x) - y) > 1e-9 * std::max(1.0, y))
        throw NumericError("m_lambda_inverse: tolerance not reached");
    return x;
}

double Allocation::payoff(size_t agent, double t) const {
    t = std::clamp(t, kEdge, 1.0 - kEdge);
    const double x1 = m_lambda_inverse(envelope_->deriv(t));
    if (agent == 0) return x1;
    return agg_->component(agent - 1, econ_->endowment - x1);
}

double Allocation::quantile(size_t agent, double s) const {
    if (agent == 0) return payoff(0, s);     // X1 is nondecreasing in U
    return payoff(agent, 1.0 - s);           // EU payoffs are nonincreasing in U
}

double Allocation::fi_mass() const { return envelope_->fi_mass(); }

std::optional<Atom> Allocation::atom(size_t agent) const {
    const double fi = envelope_->fi_mass();
    if (fi <= 0.0) return std::nullopt;
    Atom at;
    at.mass = fi;
    switch (envelope_->kind()) {
        case Envelope::Kind::Identity:
            at.location = payoff(agent, 0.5);
            break;
        case Envelope::Kind::AnalyticInverseS:
            at.location = payoff(agent, 0.5 * envelope_->pstar());
            break;
        case Envelope::Kind::AnalyticS:
            at.location = payoff(agent, 0.5 * (1.0 + envelope_->pstar()));
            break;
        case Envelope::Kind::CoincidesWithConjugate:
            return std::nullopt;
        case Envelope::Kind::PiecewiseLinearHull:
            // several detached segments may exist; no single atom
            return std::nullopt;
    }
    return at;
}

Interval Allocation::continuous_u_interval() const {
    switch (envelope_->kind()) {
        case Envelope::Kind::Identity:
            return {0.0, 0.0};
        case Envelope::Kind::CoincidesWithConjugate:
            return {0.0, 1.0};
        case Envelope::Kind::AnalyticInverseS:
            return {envelope_->pstar(), 1.0};
        case Envelope::Kind::AnalyticS:
            return {0.0, envelope_->pstar()};
        case Envelope::Kind::PiecewiseLinearHull:
            return {0.0, 1.0};
    }
    return {0.0, 1.0};
}

Interval Allocation::continuous_support(size_t agent) const {
    const Interval u = continuous_u_interval();
    if (u.empty()) return {0.0, 0.0};
    const double a = payoff(agent, u.lo);
    const double b = payoff(agent, u.hi);
    return {std::min(a, b), std::max(a, b)};
}

double Allocation::density(size_t agent, double x) const {
    const auto kind = envelope_->kind();
    if (kind == Envelope::Kind::Identity) return 0.0;
    if (kind == Envelope::Kind::PiecewiseLinearHull)
        throw NumericError("density: hull-backed envelope has no analytic "
                           "density; use sampled_density");
    const Weighting& conj = envelope_->conjugate();
    const Interval u = continuous_u_interval();

    // map x back to the RDU agent's value
    double x1;
    double transform_deriv = 1.0;  // |dX_agent / dX_1|
    if (agent == 0) {
        x1 = x;
    } else {
        // X_j = I_j(J(w - X1)/lam_j): strictly decreasing in X1; invert
        const auto g = [this, agent, x](double z) {
            return agg_->component(agent - 1, econ_->endowment - z) - x;
        };
        const Interval sup = continuous_support(0);
        double lo = sup.lo, hi = sup.hi;
        if (!(g(lo) > 0.0) == !(g(hi) > 0.0)) return 0.0;  // outside support
        x1 = numeric::bisect([&g](double z) { return -g(z); }, lo, hi,
                             {0.0, 1e-13, 260});
        const double J = agg_->marginal(econ_->endowment - x1);
        const double Jp = agg_->marginal_deriv(econ_->endowment - x1);
        const size_t j = agent - 1;
        const double Ij_prime =
            1.0 / econ_->eu_agents[j].deriv2(econ_->eu_agents[j].inverse_marginal(
                J / econ_->lambda[j]));
        transform_deriv = std::abs(Ij_prime * (-Jp) / econ_->lambda[j]);
        (void)J;
    }

    const Interval sup1 = continuous_support(0);
    if (!(x1 >= sup1.lo - 1e-12 && x1 <= sup1.hi + 1e-12)) return 0.0;

    const double y = m_lambda(x1);
    // locate s with Ttilde'(s) = y inside the continuous U-interval
    const double lo = std::max(u.lo, kEdge);
    const double hi = std::min(u.hi, 1.0 - kEdge);
    const auto h = [&conj, y](double s) { return conj.deriv(s) - y; };
    double s;
    if (h(lo) >= 0.0)
        s = lo;
    else if (h(hi) <= 0.0)
        s = hi;
    else
        s = numeric::bisect(h, lo, hi, {0.0, 1e-14, 260});

    const double curvature = conj.deriv2(s);
    if (std::abs(curvature) < 1e-300)
        throw NumericError("density: vanishing conjugate curvature at s=" +
                           std::to_string(s));
    // m'(x) via d/dx [J(w-x)/u1'(x)]
    const double w = econ_->endowment;
    const double u1p = econ_->rdu_utility.deriv(x1);
    const double u1pp = econ_->rdu_utility.deriv2(x1);
    const double J = agg_->marginal(w - x1);
    const double Jp = agg_->marginal_deriv(w - x1);
    const double m_prime = (-Jp * u1p - J * u1pp) / (u1p * u1p);
    const double f1 = m_prime / curvature;
    return f1 / transform_deriv;
}

std::vector<std::pair<double, double>> Allocation::sampled_density(
    size_t agent, int bins, long draws, unsigned long long seed) const {
    const Interval u = continuous_u_interval();
    if (u.empty() || bins <= 0) return {};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> xs;
    xs.reserve(static_cast<size_t>(draws) / 2);
    for (long i = 0; i < draws; ++i) {
        const double t = unif(rng);
        if (t <= u.lo || t >= u.hi) continue;
        xs.push_back(payoff(agent, t));
    }
    if (xs.empty()) return {};
    auto [mn_it, mx_it] = std::minmax_element(xs.begin(), xs.end());
    const double mn = *mn_it, mx = *mx_it;
    const double width = (mx - mn) / bins;
    if (!(width > 0.0)) return {};
    std::vector<long> counts(static_cast<size_t>(bins), 0);
    for (double x : xs) {
        int b = static_cast<int>((x - mn) / width);
        b = std::clamp(b, 0, bins - 1);
        ++counts[static_cast<size_t>(b)];
    }
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<size_t>(bins));
    for (int b = 0; b < bins; ++b) {
        const double center = mn + (b + 0.5) * width;
        const double dens = static_cast<double>(counts[static_cast<size_t>(b)]) /
                            (static_cast<double>(draws) * width);
        out.emplace_back(center, dens);
    }
    return out;
}

double CaraClosedForm::x1(const Envelope& env, double t) const {
    const double B = beta1 + beta_bar;
    return (std::log(env.deriv(std::clamp(t, kEdge, 1.0 - kEdge))) - log_c +
            beta_bar * endowment) /
           B;
}

double CaraClosedForm::random_part(const Envelope& env, size_t j,
                                   double t) const {
    const double B = beta1 + beta_bar;
    const double it = std::log(env.deriv(std::clamp(t, kEdge, 1.0 - kEdge)));
    return -(beta_bar / betas[j]) * it / B;
}

double CaraClosedForm::side_payment(size_t j) const {
    const double B = beta1 + beta_bar;
    return (std::log(lambda[j]) - log_c) / betas[j] +
           (beta_bar / betas[j]) * log_c / B;
}

double CaraClosedForm::rdu_side_payment() const {
    return -log_c / (beta1 + beta_bar);
}

double CaraClosedForm::fi_share(size_t j) const {
    const double B = beta1 + beta_bar;
    return (beta_bar / betas[j]) * endowment * beta1 / B;
}

double CaraClosedForm::rdu_fi_share() const {
    return beta_bar * endowment / (beta1 + beta_bar);
}

CaraClosedForm cara_closed_form(const Economy& econ) {
    econ.validate();
    if (!econ.rdu_utility.is_cara())
        throw ConfigError("cara_closed_form: RDU agent is not CARA");
    for (const auto& a : econ.eu_agents)
        if (!a.is_cara())
            throw ConfigError("cara_closed_form: non-CARA EU agent present");
    CaraClosedForm cf;
    cf.beta1 = econ.rdu_utility.cara_beta();
    double inv_sum = 0.0, lc = 0.0;
    for (size_t i = 0; i < econ.eu_agents.size(); ++i) {
        const double b = econ.eu_agents[i].cara_beta();
        cf.betas.push_back(b);
        inv_sum += 1.0 / b;
        lc += std::log(econ.lambda[i]) / b;
    }
    cf.beta_bar = 1.0 / inv_sum;
    cf.log_c = cf.beta_bar * lc;
    cf.lambda = econ.lambda;
    cf.endowment = econ.endowment;
    return cf;
}

std::vector<double> no_side_payment_weights(double beta2, double beta3) {
    if (!(beta2 > 0.0 && beta3 > 0.0))
        throw ConfigError("no_side_payment_weights: betas must be positive");
    const double beta_bar = 1.0 / (1.0 / beta2 + 1.0 / beta3);
    // tangency-of-logs condition under lambda2 + lambda3 = 1
    const auto cond = [&](double l2) {
        const double l3 = 1.0 - l2;
        return (beta2 - beta_bar) / beta2 * std::log(l2) -
               beta_bar / beta3 * std::log(l3);
    };
    double l2;
    try {
        l2 = numeric::bisect(cond, 1e-12, 1.0 - 1e-12, {1e-15, 1e-15, 300});
    } catch (const NumericError&) {
        return {1.0, 1.0};  // fall back to uniform weights
    }
    const double l3 = 1.0 - l2;
    // Scaling all weights by c shifts every payoff deterministically and
    // multiplies the aggregate constant C by c; pick c so that C = 1, which
    // zeroes the deterministic component of every payoff (including the RDU
    // agent's).  The tangency condition is scale invariant.
    const double log_c =
        beta_bar * (std::log(l2) / beta2 + std::log(l3) / beta3);
    const double c = std::exp(-log_c);
    return {c * l2, c * l3};
}

double borch_check(const Allocation& alloc, const Economy& econ, int grid) {
    const auto ts = numeric::midpoint_grid(grid);
    double worst = 0.0;
    for (double t : ts) {
        double scale = 0.0;
        std::vector<double> weighted;
        for (size_t i = 0; i < econ.eu_agents.size(); ++i) {
            const double m =
                econ.lambda[i] * econ.eu_agents[i].deriv(alloc.payoff(i + 1, t));
            weighted.push_back(m);
            scale = std::max(scale, std::abs(m));
        }
        for (size_t i = 0; i < weighted.size(); ++i)
            for (size_t j = i + 1; j < weighted.size(); ++j)
                worst = std::max(worst,
                                 std::abs(weighted[i] - weighted[j]) / scale);
    }
    return worst;
}

}  // namespace riskshare
