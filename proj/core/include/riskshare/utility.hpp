#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace riskshare {

/// Strictly increasing, strictly concave utility with analytic derivatives
/// and inverse marginal I = (u')^{-1}.  CARA has a global closed form;
/// generic utilities carry caller-supplied callables validated on a declared
/// working interval.
class Utility {
public:
    static Utility cara(double beta);
    static Utility custom(std::function<double(double)> u,
                          std::function<double(double)> du,
                          std::function<double(double)> d2u,
                          std::function<double(double)> inverse_marginal,
                          double domain_lo, double domain_hi,
                          std::string label = "custom");

    double operator()(double x) const { return u_(x); }
    double deriv(double x) const { return du_(x); }
    double deriv2(double x) const { return d2u_(x); }
    /// I(y) with y > 0.
    double inverse_marginal(double y) const { return inv_(y); }
    /// u^{-1}(v) on the utility's range.
    double inverse(double v) const;

    bool is_cara() const { return is_cara_; }
    double cara_beta() const { return beta_; }
    const std::string& label() const { return label_; }

private:
    Utility() = default;
    std::function<double(double)> u_, du_, d2u_, inv_;
    bool is_cara_ = false;
    double beta_ = 0.0;
    double domain_lo_ = 0.0, domain_hi_ = 0.0;
    std::string label_;
};

struct AggregateOptions {
    double marginal_tol = 1e-13;  // relative tolerance for J inversions
};

/// Representative EU agent for weights lambda: I_lam(y) = sum_i I_i(y/lam_i),
/// J = I_lam^{-1} (= the aggregate marginal utility), and the pointwise
/// aggregate utility u_lam.  The CARA roster has a closed form with harmonic
/// risk aversion beta_bar and constant log_c = beta_bar * sum_i ln(lam_i)/beta_i.
class AggregateEu {
public:
    AggregateEu(std::vector<Utility> agents, std::vector<double> lambda,
                AggregateOptions opt = {});

    /// I_lambda(y), y > 0.
    double inverse_aggregate(double y) const;
    /// J_lambda(x) = u_lambda'(x).
    double marginal(double x) const;
    /// u_lambda(x).
    double value(double x) const;
    /// d/dx J_lambda(x) (< 0).
    double marginal_deriv(double x) const;

    /// Component payoff x_i = I_i(J(x)/lam_i) of the representative split.
    double component(size_t i, double aggregate_x) const;

    bool cara_fast_path() const { return cara_; }
    double beta_bar() const { return beta_bar_; }
    double log_c() const { return log_c_; }
    size_t size() const { return agents_.size(); }
    const Utility& agent(size_t i) const { return agents_[i]; }
    double lambda(size_t i) const { return lambda_[i]; }

private:
    std::vector<Utility> agents_;
    std::vector<double> lambda_;
    AggregateOptions opt_;
    bool cara_ = false;
    double beta_bar_ = 0.0;
    double log_c_ = 0.0;
};

AggregateEu build_aggregate(std::vector<Utility> eu_agents,
                            std::vector<double> lambda,
                            AggregateOptions opt = {});

}  // namespace riskshare
