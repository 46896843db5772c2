#include "riskshare/weighting.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "riskshare/errors.hpp"
#include "riskshare/numeric.hpp"

namespace riskshare {

namespace {

constexpr double kLinearAlphaTol = 1e-9;  // |alpha-1| below this is Linear

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error(std::string(what) + ": probability " +
                                std::to_string(p) + " outside [0,1]");
}

// ---- Prelec ---------------------------------------------------------------
// T(p) = exp(-(-ln p)^alpha)

double prelec_eval(double a, double p) {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    return std::exp(-std::pow(-std::log(p), a));
}

double prelec_deriv(double a, double p) {
    if (p <= 0.0 || p >= 1.0) {
        if (std::abs(a - 1.0) < kLinearAlphaTol) return 1.0;
        if (a > 1.0) return 0.0;  // limit at both endpoints
        throw EndpointSingularity("Prelec alpha<1: T' unbounded at p=" +
                                  std::to_string(p));
    }
    const double L = -std::log(p);
    return a / p * std::pow(L, a - 1.0) * std::exp(-std::pow(L, a));
}

double prelec_deriv2(double a, double p) {
    if (p <= 0.0 || p >= 1.0) {
        if (std::abs(a - 1.0) < kLinearAlphaTol) return 0.0;
        if (p <= 0.0 && a > 1.0) return 0.0;
        throw EndpointSingularity("Prelec: T'' queried at endpoint p=" +
                                  std::to_string(p));
    }
    const double L = -std::log(p);
    const double La = std::pow(L, a);
    return a / (p * p) * std::pow(L, a - 2.0) * std::exp(-La) *
           (a * La - L - a + 1.0);
}

// ---- Tversky-Kahneman -----------------------------------------------------
// T(p) = p^g / (p^g + (1-p)^g)^(1/g)

double tk_eval(double g, double p) {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    const double pg = std::pow(p, g);
    const double qg = std::pow(1.0 - p, g);
    return pg * std::pow(pg + qg, -1.0 / g);
}

double tk_deriv(double g, double p) {
    if (p <= 0.0 || p >= 1.0) {
        if (std::abs(g - 1.0) < kLinearAlphaTol) return 1.0;
        if (g > 1.0) return 0.0;
        throw EndpointSingularity("Tversky-Kahneman gamma<1: T' unbounded at p=" +
                                  std::to_string(p));
    }
    const double q = 1.0 - p;
    const double S = std::pow(p, g) + std::pow(q, g);
    const double D = std::pow(p, g - 1.0) - std::pow(q, g - 1.0);
    const double ratio = g / p - D / S;
    return tk_eval(g, p) * ratio;
}

double tk_deriv2(double g, double p) {
    if (p <= 0.0 || p >= 1.0)
        throw EndpointSingularity("Tversky-Kahneman: T'' queried at endpoint");
    const double q = 1.0 - p;
    const double S = std::pow(p, g) + std::pow(q, g);
    const double D = std::pow(p, g - 1.0) - std::pow(q, g - 1.0);
    const double Dp = (g - 1.0) * (std::pow(p, g - 2.0) + std::pow(q, g - 2.0));
    const double r = g / p - D / S;
    const double rp = -g / (p * p) - Dp / S + g * D * D / (S * S);
    return tk_eval(g, p) * (r * r + rp);
}

// ---- Hurwicz --------------------------------------------------------------
// T(p) = g (1-k)p / D1 + (1-g)(1+k)p / D2,
// D1 = (1+k)(1-p) + (1-k)p,  D2 = (1-k)(1-p) + (1+k)p.

double heu_d1(double k, double p) { return (1.0 + k) - 2.0 * k * p; }
double heu_d2(double k, double p) { return (1.0 - k) + 2.0 * k * p; }

double heu_eval(double g, double k, double p) {
    return g * (1.0 - k) * p / heu_d1(k, p) +
           (1.0 - g) * (1.0 + k) * p / heu_d2(k, p);
}

double heu_deriv(double g, double k, double p) {
    const double c = 1.0 - k * k;
    const double d1 = heu_d1(k, p);
    const double d2 = heu_d2(k, p);
    return g * c / (d1 * d1) + (1.0 - g) * c / (d2 * d2);
}

double heu_deriv2(double g, double k, double p) {
    const double c = 1.0 - k * k;
    const double d1 = heu_d1(k, p);
    const double d2 = heu_d2(k, p);
    return 4.0 * k * c * (g / (d1 * d1 * d1) - (1.0 - g) / (d2 * d2 * d2));
}

}  // namespace

std::string shape_name(Shape s) {
    switch (s) {
        case Shape::Convex: return "Convex";
        case Shape::Concave: return "Concave";
        case Shape::Linear: return "Linear";
        case Shape::SShaped: return "SShaped";
        case Shape::InverseSShaped: return "InverseSShaped";
        case Shape::Other: return "Other";
    }
    return "Other";
}

Weighting::Weighting(Params p, bool conjugated)
    : params_(std::make_shared<const Params>(std::move(p))),
      conjugated_(conjugated) {}

Weighting Weighting::linear() { return Weighting(Linear{}, false); }

Weighting Weighting::prelec(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw ConfigError("Prelec: alpha must be positive, got " +
                          std::to_string(alpha));
    return Weighting(Prelec{alpha}, false);
}

Weighting Weighting::tversky_kahneman(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw ConfigError("Tversky-Kahneman: gamma must be positive");
    Weighting w(TverskyKahneman{gamma}, false);
    // the family is non-monotone for small gamma (roughly below 0.279)
    double prev = 0.0;
    for (int i = 1; i <= 200; ++i) {
        const double v = w(i / 200.0);
        if (v < prev - 1e-12)
            throw ConfigError("Tversky-Kahneman: gamma=" + std::to_string(gamma) +
                              " yields a non-monotone weighting");
        prev = v;
    }
    return w;
}

Weighting Weighting::hurwicz(double gamma, double kappa) {
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw ConfigError("Hurwicz: gamma must lie in [0,1]");
    if (!(kappa >= 0.0 && kappa < 1.0))
        throw ConfigError("Hurwicz: kappa must lie in [0,1); kappa=1 degenerates");
    return Weighting(Hurwicz{gamma, kappa}, false);
}

Weighting Weighting::mixture(Weighting base, double weight) {
    if (!(weight >= 0.0 && weight <= 1.0))
        throw ConfigError("Mixture: weight must lie in [0,1]");
    return Weighting(Mixture{std::make_shared<const Weighting>(std::move(base)),
                             weight},
                     false);
}

Weighting Weighting::custom(std::function<double(double)> f,
                            std::function<double(double)> df,
                            std::function<double(double)> d2f,
                            std::string label) {
    if (!f || !df || !d2f) throw ConfigError("Custom weighting: missing callable");
    return Weighting(Custom{std::move(f), std::move(df), std::move(d2f),
                            std::move(label)},
                     false);
}

double Weighting::operator()(double p) const {
    check_probability(p, "Weighting::eval");
    if (conjugated_) {
        Weighting plain(*this);
        plain.conjugated_ = false;
        return 1.0 - plain(1.0 - p);
    }
    return std::visit(
        [p](const auto& fam) -> double {
            using F = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<F, Linear>) {
                return p;
            } else if constexpr (std::is_same_v<F, Prelec>) {
                if (std::abs(fam.alpha - 1.0) < kLinearAlphaTol) return p;
                return prelec_eval(fam.alpha, p);
            } else if constexpr (std::is_same_v<F, TverskyKahneman>) {
                return tk_eval(fam.gamma, p);
            } else if constexpr (std::is_same_v<F, Hurwicz>) {
                return heu_eval(fam.gamma, fam.kappa, p);
            } else if constexpr (std::is_same_v<F, Mixture>) {
                return (1.0 - fam.weight) * (*fam.base)(p) + fam.weight * p;
            } else {
                return fam.f(p);
            }
        },
        *params_);
}

double Weighting::deriv(double p) const {
    check_probability(p, "Weighting::deriv");
    if (conjugated_) {
        Weighting plain(*this);
        plain.conjugated_ = false;
        return plain.deriv(1.0 - p);
    }
    return std::visit(
        [p](const auto& fam) -> double {
            using F = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<F, Linear>) {
                return 1.0;
            } else if constexpr (std::is_same_v<F, Prelec>) {
                if (std::abs(fam.alpha - 1.0) < kLinearAlphaTol) return 1.0;
                return prelec_deriv(fam.alpha, p);
            } else if constexpr (std::is_same_v<F, TverskyKahneman>) {
                return tk_deriv(fam.gamma, p);
            } else if constexpr (std::is_same_v<F, Hurwicz>) {
                return heu_deriv(fam.gamma, fam.kappa, p);
            } else if constexpr (std::is_same_v<F, Mixture>) {
                return (1.0 - fam.weight) * fam.base->deriv(p) + fam.weight;
            } else {
                const double v = fam.df(p);
                if (!std::isfinite(v))
                    throw EndpointSingularity("custom weighting '" + fam.label +
                                              "': derivative not finite at p=" +
                                              std::to_string(p));
                return v;
            }
        },
        *params_);
}

double Weighting::deriv2(double p) const {
    check_probability(p, "Weighting::deriv2");
    if (conjugated_) {
        Weighting plain(*this);
        plain.conjugated_ = false;
        return -plain.deriv2(1.0 - p);
    }
    return std::visit(
        [p](const auto& fam) -> double {
            using F = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<F, Linear>) {
                return 0.0;
            } else if constexpr (std::is_same_v<F, Prelec>) {
                if (std::abs(fam.alpha - 1.0) < kLinearAlphaTol) return 0.0;
                return prelec_deriv2(fam.alpha, p);
            } else if constexpr (std::is_same_v<F, TverskyKahneman>) {
                return tk_deriv2(fam.gamma, p);
            } else if constexpr (std::is_same_v<F, Hurwicz>) {
                return heu_deriv2(fam.gamma, fam.kappa, p);
            } else if constexpr (std::is_same_v<F, Mixture>) {
                return (1.0 - fam.weight) * fam.base->deriv2(p);
            } else {
                const double v = fam.d2f(p);
                if (!std::isfinite(v))
                    throw EndpointSingularity("custom weighting '" + fam.label +
                                              "': second derivative not finite");
                return v;
            }
        },
        *params_);
}

Weighting Weighting::conjugate() const {
    Weighting other(*this);
    other.conjugated_ = !conjugated_;
    return other;
}

bool Weighting::is_linear_family() const {
    if (std::holds_alternative<Linear>(*params_)) return true;
    if (const auto* pr = std::get_if<Prelec>(&*params_))
        return std::abs(pr->alpha - 1.0) < kLinearAlphaTol;
    if (const auto* tk = std::get_if<TverskyKahneman>(&*params_))
        return std::abs(tk->gamma - 1.0) < kLinearAlphaTol;
    if (const auto* h = std::get_if<Hurwicz>(&*params_))
        return h->kappa < kLinearAlphaTol;
    if (const auto* m = std::get_if<Mixture>(&*params_))
        return m->weight > 1.0 - kLinearAlphaTol || m->base->is_linear_family();
    return false;
}

std::string Weighting::describe() const {
    std::string s = std::visit(
        [](const auto& fam) -> std::string {
            using F = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<F, Linear>) {
                return "linear";
            } else if constexpr (std::is_same_v<F, Prelec>) {
                return "prelec(alpha=" + std::to_string(fam.alpha) + ")";
            } else if constexpr (std::is_same_v<F, TverskyKahneman>) {
                return "tk(gamma=" + std::to_string(fam.gamma) + ")";
            } else if constexpr (std::is_same_v<F, Hurwicz>) {
                return "heu(gamma=" + std::to_string(fam.gamma) +
                       ",kappa=" + std::to_string(fam.kappa) + ")";
            } else if constexpr (std::is_same_v<F, Mixture>) {
                return "mixture(" + fam.base->describe() +
                       ",weight=" + std::to_string(fam.weight) + ")";
            } else {
                return "custom(" + fam.label + ")";
            }
        },
        *params_);
    return conjugated_ ? "conjugate(" + s + ")" : s;
}

namespace {

// Refine an inflection bracket by bisecting T''.
double refine_inflection(const Weighting& t, double lo, double hi) {
    return numeric::bisect([&t](double p) { return t.deriv2(p); }, lo, hi,
                           {1e-14, 1e-12, 200});
}

// Prelec inflection: T''(p) = 0  <=>  a L^a - L - a + 1 = 0, L = -ln p.
double prelec_inflection(double a) {
    const auto h = [a](double L) {
        return a * std::pow(L, a) - L - a + 1.0;
    };
    double lo = 1e-8, hi = 1.0;
    // expand until h changes sign
    while (std::signbit(h(lo)) == std::signbit(h(hi)) && hi < 1e6) hi *= 2.0;
    const double L = numeric::bisect(h, lo, hi, {1e-14, 1e-14, 300});
    return std::exp(-L);
}

ShapeReport classify_grid(const Weighting& t, int n) {
    constexpr double kCurvTol = 1e-10;
    int sign = 0;           // current established sign of T''
    int changes = 0;
    int first_sign = 0;
    double change_lo = 0.0, change_hi = 0.0;
    double prev_p = 0.0;
    for (int i = 1; i < n - 1; ++i) {
        const double p = static_cast<double>(i) / (n - 1);
        double d2;
        try {
            d2 = t.deriv2(p);
        } catch (const EndpointSingularity&) {
            continue;
        }
        if (std::abs(d2) <= kCurvTol) continue;
        const int s = d2 > 0.0 ? 1 : -1;
        if (sign == 0) {
            sign = s;
            first_sign = s;
        } else if (s != sign) {
            ++changes;
            change_lo = prev_p;
            change_hi = p;
            sign = s;
        }
        prev_p = p;
    }
    ShapeReport rep;
    if (sign == 0) {
        rep.shape = Shape::Linear;
        return rep;
    }
    if (changes == 0) {
        rep.shape = first_sign > 0 ? Shape::Convex : Shape::Concave;
        return rep;
    }
    if (changes == 1) {
        rep.shape = first_sign > 0 ? Shape::SShaped : Shape::InverseSShaped;
        try {
            rep.inflection = refine_inflection(t, change_lo, change_hi);
        } catch (const NumericError&) {
            rep.inflection = 0.5 * (change_lo + change_hi);
        }
        return rep;
    }
    rep.shape = Shape::Other;
    return rep;
}

}  // namespace

ShapeReport classify(const Weighting& t, int grid_points) {
    // conjugation preserves the shape class and reflects the inflection
    if (t.is_conjugated()) {
        ShapeReport base = classify(t.conjugate(), grid_points);
        ShapeReport rep;
        rep.shape = base.shape;
        if (base.shape == Shape::Convex) rep.shape = Shape::Concave;
        else if (base.shape == Shape::Concave) rep.shape = Shape::Convex;
        if (base.inflection) rep.inflection = 1.0 - *base.inflection;
        return rep;
    }
    if (t.is_linear_family()) return {Shape::Linear, std::nullopt};
    if (const auto* pr = std::get_if<Weighting::Prelec>(&t.params())) {
        ShapeReport rep;
        rep.shape = pr->alpha < 1.0 ? Shape::InverseSShaped : Shape::SShaped;
        rep.inflection = prelec_inflection(pr->alpha);
        return rep;
    }
    if (const auto* mx = std::get_if<Weighting::Mixture>(&t.params())) {
        // mixing with the identity scales T'' by (1-weight): same sign pattern
        return classify(*mx->base, grid_points);
    }
    return classify_grid(t, grid_points);
}

}  // namespace riskshare
