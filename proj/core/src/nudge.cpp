#include "riskshare/nudge.hpp"

#include <algorithm>
#include <cmath>

#include "riskshare/errors.hpp"
#include "riskshare/numeric.hpp"

namespace riskshare {

namespace {
constexpr double kEdge = 1e-12;
}

double NudgeConfig::effort_fraction(double m) const {
    const double s = std::clamp(m / endowment, 0.0, 1.0);
    return 1.0 - std::pow(1.0 - s, k);
}

double NudgeConfig::effort_fraction_deriv(double m) const {
    const double s = std::clamp(m / endowment, 0.0, 1.0);
    return k * std::pow(1.0 - s, k - 1.0) / endowment;
}

void NudgeConfig::validate() const {
    if (!(k > 1.0)) throw ConfigError("nudge: cost curvature k must exceed 1");
    if (!(endowment > 0.0)) throw ConfigError("nudge: endowment must be positive");
    if (!(lambda2 > 0.0)) throw ConfigError("nudge: lambda2 must be positive");
}

NudgeConfig NudgeConfig::from_economy(const Economy& econ, double k) {
    econ.validate();
    NudgeConfig cfg;
    cfg.k = k;
    cfg.weighting = econ.rdu_weighting;
    cfg.rdu_utility = econ.rdu_utility;
    cfg.endowment = econ.endowment;
    const AggregateEu agg(econ.eu_agents, econ.lambda);
    if (agg.cara_fast_path()) {
        cfg.eu_utility = Utility::cara(agg.beta_bar());
        cfg.lambda2 = std::exp(agg.log_c());
    } else {
        // wrap the aggregate as a generic utility
        auto agg_ptr = std::make_shared<AggregateEu>(agg);
        cfg.eu_utility = Utility::custom(
            [agg_ptr](double x) { return agg_ptr->value(x); },
            [agg_ptr](double x) { return agg_ptr->marginal(x); },
            [agg_ptr](double x) { return agg_ptr->marginal_deriv(x); },
            [agg_ptr](double y) { return agg_ptr->inverse_aggregate(y); },
            econ.endowment - 5.0, econ.endowment + 5.0, "aggregate");
        cfg.lambda2 = 1.0;
    }
    cfg.validate();
    return cfg;
}

Weighting nudged_weighting(const Weighting& t, double f_of_m) {
    return Weighting::mixture(t, f_of_m);
}

Envelope nudged_envelope(const Envelope& env, double f) {
    if (!(f >= 0.0 && f <= 1.0))
        throw ConfigError("nudged_envelope: blend must lie in [0,1]");
    const Weighting mixed = Weighting::mixture(env.source(), f);
    Envelope out(mixed, mixed.conjugate());
    out.shape_ = f >= 1.0 - 1e-9 ? Shape::Linear : env.source_shape();
    if (out.shape_ == Shape::Linear) {
        out.kind_ = Envelope::Kind::Identity;
        out.pstar_ = 1.0;
        out.slope_ = 1.0;
        out.fi_mass_ = 1.0;
        out.contact_ = "affine on [0, 1]";
        return out;
    }
    out.kind_ = env.kind();
    out.pstar_ = env.pstar();
    out.slope_ = (1.0 - f) * env.affine_slope() + f;
    out.fi_mass_ = env.fi_mass();
    out.contact_ = env.contact_description();
    if (env.kind() == Envelope::Kind::PiecewiseLinearHull) {
        out.knots_ = env.knots();
        for (auto& [x, y] : out.knots_) y = (1.0 - f) * y + f * x;
    }
    return out;
}

EffortAllocation allocation_at_effort(const NudgeConfig& cfg,
                                      const Envelope& base_env, double m) {
    cfg.validate();
    if (!(m >= 0.0 && m <= cfg.endowment))
        throw ConfigError("allocation_at_effort: M outside [0, w]");
    EffortAllocation a;
    a.cfg_ = std::make_shared<const NudgeConfig>(cfg);
    a.env_ = std::make_shared<const Envelope>(base_env);
    a.m_ = m;
    a.f_ = cfg.effort_fraction(m);
    a.cfg_w_ = cfg.endowment;
    a.cara_ = cfg.rdu_utility.is_cara() && cfg.eu_utility.is_cara();
    if (a.cara_) {
        a.b1_ = cfg.rdu_utility.cara_beta();
        a.b2_ = cfg.eu_utility.cara_beta();
    }
    return a;
}

double EffortAllocation::m_of(double x) const {
    return cfg_->lambda2 * cfg_->eu_utility.deriv(cfg_w_ - m_ - x) /
           cfg_->rdu_utility.deriv(x);
}

double EffortAllocation::m_inverse(double y) const {
    if (!(y > 0.0)) throw NumericError("EffortAllocation: m^{-1} needs y > 0");
    if (cara_)
        return (std::log(y) - std::log(cfg_->lambda2) + b2_ * (cfg_w_ - m_)) /
               (b1_ + b2_);
    const auto g = [this, y](double x) { return m_of(x) - y; };
    auto [lo, hi] = numeric::grow_bracket(g, 0.0, 1.0);
    return numeric::bisect(g, lo, hi, {0.0, 1e-14, 260});
}

double EffortAllocation::x1(double t) const {
    t = std::clamp(t, kEdge, 1.0 - kEdge);
    const double dp = env_->deriv(t);
    return m_inverse(dp - f_ * (dp - 1.0));
}

double sensitivity(const NudgeConfig& cfg, const Envelope& base_env, double m,
                   double t) {
    const EffortAllocation alloc = allocation_at_effort(cfg, base_env, m);
    t = std::clamp(t, kEdge, 1.0 - kEdge);
    const double dp = base_env.deriv(t);
    const double dpm = dp - alloc.f() * (dp - 1.0);
    const double fp = cfg.effort_fraction_deriv(m);
    const double x = alloc.m_inverse(dpm);
    const double w_m_x = cfg.endowment - m - x;
    const double u1p = cfg.rdu_utility.deriv(x);
    const double numer = -fp * (dp - 1.0) +
                         cfg.lambda2 * cfg.eu_utility.deriv2(w_m_x) / u1p;
    // Lambda(y) = d m / dx at m^{-1}(y)
    const double lambda_val =
        -cfg.lambda2 / u1p *
        (cfg.eu_utility.deriv2(w_m_x) +
         cfg.eu_utility.deriv(w_m_x) * cfg.rdu_utility.deriv2(x) / u1p);
    if (std::abs(lambda_val) < 1e-300)
        throw NumericError("sensitivity: singular Lambda at t=" + std::to_string(t));
    return numer / lambda_val;
}

namespace {

// U-interval of the affine (full-insurance) region of the base envelope.
Interval affine_region(const Envelope& env) {
    switch (env.kind()) {
        case Envelope::Kind::Identity: return {0.0, 1.0};
        case Envelope::Kind::CoincidesWithConjugate: return {0.0, 0.0};
        case Envelope::Kind::AnalyticInverseS: return {0.0, env.pstar()};
        case Envelope::Kind::AnalyticS: return {env.pstar(), 1.0};
        case Envelope::Kind::PiecewiseLinearHull: return {0.0, 0.0};
    }
    return {0.0, 0.0};
}

// Ttilde_M increment over [lo, hi]: (1-f)(Ttilde(hi)-Ttilde(lo)) + f(hi-lo).
double conj_m_increment(const Weighting& conj, double f, double lo, double hi) {
    return (1.0 - f) * (conj(hi) - conj(lo)) + f * (hi - lo);
}

}  // namespace

double planner_value(const NudgeConfig& cfg, const Envelope& base_env,
                     double m) {
    const EffortAllocation alloc = allocation_at_effort(cfg, base_env, m);
    const double f = alloc.f();
    const double w = cfg.endowment;
    const Weighting conj = base_env.conjugate();
    const Interval flat = affine_region(base_env);

    double value = 0.0;
    if (!flat.empty()) {
        const double x0 = alloc.x1(0.5 * (flat.lo + flat.hi));
        value += cfg.rdu_utility(x0) * conj_m_increment(conj, f, flat.lo, flat.hi);
        value += cfg.eu_utility(w - m - x0) * (flat.hi - flat.lo);
    }
    const auto add_segment = [&](double lo, double hi) {
        if (!(lo < hi)) return;
        const auto f_rdu = [&](double t) {
            const double weight = (1.0 - f) * conj.deriv(t) + f;
            return cfg.rdu_utility(alloc.x1(t)) * weight;
        };
        const auto f_eu = [&](double t) {
            return cfg.eu_utility(w - m - alloc.x1(t));
        };
        value += numeric::integrate_open(f_rdu, lo, hi, 1e-11, 1e-11).value;
        value += numeric::integrate_open(f_eu, lo, hi, 1e-11, 1e-11).value;
    };
    if (flat.empty()) {
        add_segment(0.0, 1.0);
    } else {
        add_segment(0.0, flat.lo);
        add_segment(flat.hi, 1.0);
    }
    return value;
}

double planner_value_derivative(const NudgeConfig& cfg,
                                const Envelope& base_env, double m) {
    const EffortAllocation alloc = allocation_at_effort(cfg, base_env, m);
    const double f = alloc.f();
    const double fp = cfg.effort_fraction_deriv(m);
    const double w = cfg.endowment;
    const Weighting conj = base_env.conjugate();
    const Interval flat = affine_region(base_env);

    // d/dM [ u1(x_M) Ttilde'_M + u2(w - M - x_M) ] =
    //   u1'(x) x' Ttilde'_M + u1(x) f'(M)(1 - Ttilde') - u2'(w-M-x)(1 + x')
    double value = 0.0;
    if (!flat.empty()) {
        const double tm = 0.5 * (flat.lo + flat.hi);
        const double x0 = alloc.x1(tm);
        const double xp = sensitivity(cfg, base_env, m, tm);
        const double len = flat.hi - flat.lo;
        const double inc = conj_m_increment(conj, f, flat.lo, flat.hi);
        value += cfg.rdu_utility.deriv(x0) * xp * inc;
        value += cfg.rdu_utility(x0) * fp *
                 (len - (conj(flat.hi) - conj(flat.lo)));
        value -= cfg.eu_utility.deriv(w - m - x0) * (1.0 + xp) * len;
    }
    const auto add_segment = [&](double lo, double hi) {
        if (!(lo < hi)) return;
        const auto g = [&](double t) {
            const double x = alloc.x1(t);
            const double xp = sensitivity(cfg, base_env, m, t);
            const double tw = conj.deriv(t);
            const double twm = (1.0 - f) * tw + f;
            return cfg.rdu_utility.deriv(x) * xp * twm +
                   cfg.rdu_utility(x) * fp * (1.0 - tw) -
                   cfg.eu_utility.deriv(w - m - x) * (1.0 + xp);
        };
        value += numeric::integrate_open(g, lo, hi, 1e-10, 1e-10).value;
    };
    if (flat.empty()) {
        add_segment(0.0, 1.0);
    } else {
        add_segment(0.0, flat.lo);
        add_segment(flat.hi, 1.0);
    }
    return value;
}

NudgeSolution optimal_effort(const NudgeConfig& cfg) {
    cfg.validate();
    const Envelope base_env = build_envelope(cfg.weighting);
    const int n = static_cast<int>(cfg.scan_points);
    const double w = cfg.endowment;

    NudgeSolution sol;
    sol.value_curve.reserve(static_cast<size_t>(n));
    int best = 0;
    for (int i = 0; i < n; ++i) {
        const double m = w * i / (n - 1);
        const double v = planner_value(cfg, base_env, m);
        sol.value_curve.emplace_back(m, v);
        if (v > sol.value_curve[static_cast<size_t>(best)].second) best = i;
    }
    // count interior local maxima of the scan
    int local_maxima = 0;
    for (int i = 1; i + 1 < n; ++i)
        if (sol.value_curve[static_cast<size_t>(i)].second >
                sol.value_curve[static_cast<size_t>(i - 1)].second &&
            sol.value_curve[static_cast<size_t>(i)].second >=
                sol.value_curve[static_cast<size_t>(i + 1)].second)
            ++local_maxima;
    sol.multimodal_warning = local_maxima > 1;

    const double lo = sol.value_curve[static_cast<size_t>(std::max(best - 1, 0))].first;
    const double hi =
        sol.value_curve[static_cast<size_t>(std::min(best + 1, n - 1))].first;
    const auto refined = numeric::golden_max(
        [&](double m) { return planner_value(cfg, base_env, m); }, lo, hi,
        cfg.refine_tol);

    sol.m_star = refined.x;
    sol.value = refined.value;
    // snap to the boundary when the refinement hugs it
    if (sol.m_star <= cfg.refine_tol &&
        sol.value_curve.front().second >= refined.value - 1e-12) {
        sol.m_star = 0.0;
        sol.value = sol.value_curve.front().second;
    }
    if (sol.m_star >= w - cfg.refine_tol) {
        const double vend = sol.value_curve.back().second;
        if (vend >= refined.value - 1e-12) {
            sol.m_star = w;
            sol.value = vend;
        }
    }
    sol.boundary = sol.m_star <= 0.0 || sol.m_star >= w;
    sol.foc_residual = planner_value_derivative(cfg, base_env, sol.m_star);
    const Envelope at_star =
        nudged_envelope(base_env, cfg.effort_fraction(sol.m_star));
    sol.fi_mass_at_star = at_star.fi_mass();
    return sol;
}

}  // namespace riskshare
