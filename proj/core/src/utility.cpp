#include "riskshare/utility.hpp"

#include <cmath>

#include "riskshare/errors.hpp"
#include "riskshare/numeric.hpp"

namespace riskshare {

Utility Utility::cara(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw ConfigError("CARA: beta must be positive");
    Utility u;
    u.is_cara_ = true;
    u.beta_ = beta;
    u.label_ = "cara(" + std::to_string(beta) + ")";
    u.u_ = [beta](double x) { return -std::exp(-beta * x) / beta; };
    u.du_ = [beta](double x) { return std::exp(-beta * x); };
    u.d2u_ = [beta](double x) { return -beta * std::exp(-beta * x); };
    u.inv_ = [beta](double y) {
        if (!(y > 0.0)) throw NumericError("CARA inverse marginal: y must be > 0");
        return -std::log(y) / beta;
    };
    return u;
}

Utility Utility::custom(std::function<double(double)> u,
                        std::function<double(double)> du,
                        std::function<double(double)> d2u,
                        std::function<double(double)> inverse_marginal,
                        double domain_lo, double domain_hi, std::string label) {
    if (!u || !du || !d2u || !inverse_marginal)
        throw ConfigError("custom utility: missing callable");
    if (!(domain_lo < domain_hi))
        throw ConfigError("custom utility: empty working domain");
    // validate concavity and the inverse-marginal identity on a grid
    const int n = 101;
    for (int i = 0; i < n; ++i) {
        const double x = domain_lo + (domain_hi - domain_lo) * i / (n - 1);
        const double m = du(x);
        if (!(m > 0.0))
            throw ConfigError("custom utility '" + label +
                              "': u' not positive at x=" + std::to_string(x));
        if (!(d2u(x) < 0.0))
            throw ConfigError("custom utility '" + label +
                              "': u'' not negative at x=" + std::to_string(x));
        if (std::abs(inverse_marginal(m) - x) > 1e-9 * std::max(1.0, std::abs(x)))
            throw ConfigError("custom utility '" + label +
                              "': I(u'(x)) != x at x=" + std::to_string(x));
    }
    Utility out;
    out.u_ = std::move(u);
    out.du_ = std::move(du);
    out.d2u_ = std::move(d2u);
    out.inv_ = std::move(inverse_marginal);
    out.domain_lo_ = domain_lo;
    out.domain_hi_ = domain_hi;
    out.label_ = std::move(label);
    return out;
}

double Utility::inverse(double v) const {
    if (is_cara_) {
        if (!(v < 0.0))
            throw NumericError("CARA utility inverse: value must be negative");
        return -std::log(-beta_ * v) / beta_;
    }
    const auto g = [this, v](double x) { return u_(x) - v; };
    auto [lo, hi] = numeric::grow_bracket(g, 0.5 * (domain_lo_ + domain_hi_),
                                          0.25 * (domain_hi_ - domain_lo_));
    return numeric::bisect(g, lo, hi, {1e-14, 1e-13, 260});
}

AggregateEu::AggregateEu(std::vector<Utility> agents, std::vector<double> lambda,
                         AggregateOptions opt)
    : agents_(std::move(agents)), lambda_(std::move(lambda)), opt_(opt) {
    if (agents_.empty()) throw ConfigError("aggregate: need at least one EU agent");
    if (agents_.size() != lambda_.size())
        throw ConfigError("aggregate: lambda size mismatch");
    for (double l : lambda_)
        if (!(l > 0.0)) throw ConfigError("aggregate: weights must be positive");
    cara_ = true;
    for (const auto& a : agents_)
        if (!a.is_cara()) cara_ = false;
    if (cara_) {
        double inv_sum = 0.0;
        double lc = 0.0;
        for (size_t i = 0; i < agents_.size(); ++i) {
            inv_sum += 1.0 / agents_[i].cara_beta();
            lc += std::log(lambda_[i]) / agents_[i].cara_beta();
        }
        beta_bar_ = 1.0 / inv_sum;
        log_c_ = beta_bar_ * lc;  // J(x) = exp(log_c - beta_bar x)
    }
}

double AggregateEu::inverse_aggregate(double y) const {
    if (!(y > 0.0)) throw NumericError("I_lambda: argument must be positive");
    if (cara_) return (log_c_ - std::log(y)) / beta_bar_;
    double s = 0.0;
    for (size_t i = 0; i < agents_.size(); ++i)
        s += agents_[i].inverse_marginal(y / lambda_[i]);
    return s;
}

double AggregateEu::marginal(double x) const {
    if (cara_) return std::exp(log_c_ - beta_bar_ * x);
    // I_lambda is strictly decreasing; solve I_lambda(y) = x in log space
    const auto g = [this, x](double ly) { return inverse_aggregate(std::exp(ly)) - x; };
    double lo = -1.0, hi = 1.0;
    double flo = g(lo), fhi = g(hi);
    int guard = 0;
    while (flo < 0.0 && guard++ < 400) { lo -= 1.0; flo = g(lo); }
    guard = 0;
    while (fhi > 0.0 && guard++ < 400) { hi += 1.0; fhi = g(hi); }
    if (flo < 0.0 || fhi > 0.0)
        throw NumericError("J_lambda: failed to bracket marginal at x=" +
                           std::to_string(x));
    // g is decreasing in ly: negate for the increasing-root convention
    const double ly = numeric::bisect([&g](double v) { return -g(v); }, lo, hi,
                                      {1e-15, opt_.marginal_tol, 260});
    return std::exp(ly);
}

double AggregateEu::value(double x) const {
    const double J = marginal(x);
    if (cara_) return -J / beta_bar_;
    double s = 0.0;
    for (size_t i = 0; i < agents_.size(); ++i)
        s += lambda_[i] * agents_[i](agents_[i].inverse_marginal(J / lambda_[i]));
    return s;
}

double AggregateEu::marginal_deriv(double x) const {
    const double J = marginal(x);
    if (cara_) return -beta_bar_ * J;
    // d/dx J = 1 / I_lambda'(J);  I_lambda'(y) = sum_i I_i'(y/lam_i)/lam_i,
    // I_i'(z) = 1/u_i''(I_i(z)).
    double ip = 0.0;
    for (size_t i = 0; i < agents_.size(); ++i) {
        const double z = J / lambda_[i];
        ip += 1.0 / (lambda_[i] * agents_[i].deriv2(agents_[i].inverse_marginal(z)));
    }
    return 1.0 / ip;
}

double AggregateEu::component(size_t i, double aggregate_x) const {
    const double J = marginal(aggregate_x);
    return agents_[i].inverse_marginal(J / lambda_[i]);
}

AggregateEu build_aggregate(std::vector<Utility> eu_agents,
                            std::vector<double> lambda, AggregateOptions opt) {
    return AggregateEu(std::move(eu_agents), std::move(lambda), opt);
}

}  // namespace riskshare
