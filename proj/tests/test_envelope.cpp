#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "riskshare/envelope.hpp"
#include "riskshare/numeric.hpp"

#include "helpers.hpp"

using namespace riskshare;

namespace {

double prelec_s_closed_form(double a) {
    return 1.0 - std::exp(-std::pow(a, -1.0 / (a - 1.0)));
}

// Independent oracle for the inverse-S tangent point: solve the x-space
// equation x^a = ln(a x^{a-1} e^x (1 - e^{-x}) + 1) directly, p* = 1 - e^{-x}.
double prelec_inverse_s_oracle(double a) {
    const auto h = [a](double x) {
        return std::pow(x, a) -
               std::log(a * std::pow(x, a - 1.0) * std::exp(x) *
                            (1.0 - std::exp(-x)) +
                        1.0);
    };
    const double x = riskshare::numeric::bisect(h, 0.05, 60.0, {1e-15, 1e-14, 300});
    return 1.0 - std::exp(-x);
}

}  // namespace

TEST_SUITE_BEGIN("envelope");

TEST_CASE("s-shaped tangent point matches the closed form") {
    for (double a : {1.1, 1.2, 1.5, 2.0, 3.0, 5.0}) {
        CAPTURE(a);
        const Envelope env = build_envelope(Weighting::prelec(a));
        REQUIRE(env.kind() == Envelope::Kind::AnalyticS);
        CHECK(std::abs(env.pstar() - prelec_s_closed_form(a)) < 1e-10);
    }
    CHECK(prelec_s_closed_form(2.0) == doctest::Approx(0.393469).epsilon(1e-6));
    // alpha = 1.2: exponent -1/0.2 = -5, p* = 1 - exp(-1.2^-5)
    CHECK(prelec_s_closed_form(1.2) ==
          doctest::Approx(1.0 - std::exp(-std::pow(1.2, -5.0))).epsilon(1e-15));
    CHECK(prelec_s_closed_form(1.2) == doctest::Approx(0.330937).epsilon(1e-5));
}

TEST_CASE("tangent point decreases toward the jump at alpha = 1") {
    const double p11 = build_envelope(Weighting::prelec(1.1)).pstar();
    const double p101 = build_envelope(Weighting::prelec(1.01)).pstar();
    const double p1001 = build_envelope(Weighting::prelec(1.001)).pstar();
    CHECK(p1001 < p101);
    CHECK(p101 < p11);
}

TEST_CASE("inverse-s tangent point satisfies the fixed-point equation") {
    for (double a : {0.2, 0.4, 0.5, 0.8}) {
        CAPTURE(a);
        const Envelope env = build_envelope(Weighting::prelec(a));
        REQUIRE(env.kind() == Envelope::Kind::AnalyticInverseS);
        CHECK(std::abs(env.pstar() - prelec_inverse_s_oracle(a)) < 1e-8);
        const double x = -std::log(1.0 - env.pstar());
        const double resid =
            x - std::pow(std::log(a * std::pow(x, a - 1.0) * std::exp(x) *
                                      (1.0 - std::exp(-x)) +
                                  1.0),
                         1.0 / a);
        CHECK(std::abs(resid) < 1e-10);
    }
    const double p08 = build_envelope(Weighting::prelec(0.8)).pstar();
    CHECK(p08 == doctest::Approx(0.9).epsilon(0.025));  // [0,p*] ~ [0,9/10]
    CHECK(p08 == doctest::Approx(0.89465789915).epsilon(1e-9));
}

TEST_CASE("hurwicz tangent point") {
    const Envelope env = build_envelope(Weighting::hurwicz(0.5, 0.5));
    REQUIRE(env.kind() == Envelope::Kind::AnalyticInverseS);
    CHECK(env.pstar() == doctest::Approx(0.768).epsilon(0.003));
    CHECK(env.pstar() == doctest::Approx(0.76794919243).epsilon(1e-9));
    // tangency slope = (2 + sqrt(3)) / 4 for this parameter pair
    CHECK(env.affine_slope() ==
          doctest::Approx((2.0 + std::sqrt(3.0)) / 4.0).epsilon(1e-9));
}

TEST_CASE("dispatch and the full-insurance table") {
    const Envelope lin = build_envelope(Weighting::linear());
    CHECK(lin.kind() == Envelope::Kind::Identity);
    CHECK(lin.fi_mass() == 1.0);
    for (double t : {0.1, 0.6}) CHECK(lin(t) == t);

    const Envelope convex = build_envelope(testhelpers::make_convex_restriction(0.5));
    CHECK(convex.kind() == Envelope::Kind::Identity);
    CHECK(convex.fi_mass() == 1.0);

    const Envelope concave =
        build_envelope(testhelpers::make_concave_restriction(0.5));
    CHECK(concave.kind() == Envelope::Kind::CoincidesWithConjugate);
    CHECK(concave.fi_mass() == 0.0);
    const Weighting conj2 = testhelpers::make_concave_restriction(0.5).conjugate();
    for (double t : {0.15, 0.5, 0.85})
        CHECK(concave(t) == doctest::Approx(conj2(t)).epsilon(1e-14));

    const Envelope inv = build_envelope(Weighting::prelec(0.8));
    CHECK(inv.fi_mass() == doctest::Approx(inv.pstar()));
    const Envelope s = build_envelope(Weighting::prelec(2.0));
    CHECK(s.fi_mass() == doctest::Approx(1.0 - s.pstar()));
}

TEST_CASE("inverse-s envelope form") {
    const Envelope env = build_envelope(Weighting::prelec(0.8));
    const Weighting conj = Weighting::prelec(0.8).conjugate();
    const double ps = env.pstar();
    const double slope = conj(ps) / ps;
    for (double t : {0.1, 0.5, ps * 0.999})
        CHECK(env(t) == doctest::Approx(slope * t).epsilon(1e-12));
    for (double t : {ps * 1.001, 0.97})
        CHECK(env(t) == doctest::Approx(conj(t)).epsilon(1e-12));
}

TEST_CASE("envelope derivative conventions") {
    const Envelope id = build_envelope(Weighting::linear());
    for (double t : {0.2, 0.9}) CHECK(id.deriv(t) == 1.0);

    const Envelope heu = build_envelope(Weighting::hurwicz(0.5, 0.5));
    const Weighting conj = Weighting::hurwicz(0.5, 0.5).conjugate();
    const double ps = heu.pstar();
    // left-continuous at the kink; conjugate derivative just to the right
    CHECK(heu.deriv(ps) == doctest::Approx(heu.affine_slope()));
    CHECK(heu.deriv(ps + 1e-9) ==
          doctest::Approx(conj.deriv(ps + 1e-9)).epsilon(1e-12));

    // hull derivative is a nondecreasing step function equal to segment slopes
    const auto knots = conjugate_hull(Weighting::prelec(0.8), 2001);
    double prev_slope = -1e300;
    for (size_t i = 0; i + 1 < knots.size(); ++i) {
        const double slope = (knots[i + 1].second - knots[i].second) /
                             (knots[i + 1].first - knots[i].first);
        CHECK(slope >= prev_slope - 1e-12);
        prev_slope = slope;
    }
}

TEST_CASE("smooth fit at the tangent point") {
    for (const auto& w : {Weighting::prelec(0.8), Weighting::prelec(2.0),
                          Weighting::hurwicz(0.5, 0.5)}) {
        CAPTURE(w.describe());
        const Envelope env = build_envelope(w);
        const double ps = env.pstar();
        CHECK(std::abs(env.affine_slope() - w.conjugate().deriv(ps)) < 1e-9);
    }
}

TEST_CASE("tversky-kahneman tangent point against an external solve") {
    const Envelope env = build_envelope(Weighting::tversky_kahneman(0.5));
    REQUIRE(env.kind() == Envelope::Kind::AnalyticInverseS);
    CHECK(env.pstar() == doctest::Approx(0.93275676546).epsilon(1e-9));
}

TEST_CASE("envelope sits below the conjugate and the identity, convex") {
    for (const auto& w : {Weighting::prelec(0.4), Weighting::prelec(2.0),
                          Weighting::hurwicz(0.5, 0.5),
                          Weighting::tversky_kahneman(0.61)}) {
        CAPTURE(w.describe());
        const Envelope env = build_envelope(w);
        CHECK(std::abs(env(0.0)) < 1e-12);
        CHECK(std::abs(env(1.0) - 1.0) < 1e-12);
        const Weighting conj = w.conjugate();
        double prev_slope = -1e300;
        double prev = 0.0;
        for (int i = 0; i <= 2000; ++i) {
            const double t = i / 2000.0;
            const double d = env(t);
            CHECK(d <= conj(t) + 1e-10);
            CHECK(d <= t + 1e-12);
            if (i > 0) {
                const double slope = (d - prev) * 2000.0;
                CHECK(slope >= prev_slope - 1e-9);
                prev_slope = slope;
            }
            prev = d;
        }
    }
}

TEST_CASE("contact set structure at grid resolution") {
    const Envelope env = build_envelope(Weighting::prelec(0.8));
    const Weighting conj = Weighting::prelec(0.8).conjugate();
    const double ps = env.pstar();
    for (int i = 1; i < 200; ++i) {
        const double t = i / 200.0;
        if (t > ps + 1e-6) {
            CHECK(std::abs(env(t) - conj(t)) < 1e-12);  // contact
        } else if (t < ps - 1e-6) {
            CHECK(env(t) < conj(t) - 1e-12);  // detached, affine piece
        }
    }
}

TEST_CASE("analytic envelope agrees with the sampled hull") {
    for (double a : {0.4, 0.8, 1.2, 2.0}) {
        CAPTURE(a);
        const Envelope env = build_envelope(Weighting::prelec(a));
        const auto knots = conjugate_hull(Weighting::prelec(a), 10001);
        // piecewise-linear evaluation over the knots
        const auto hull_at = [&knots](double t) {
            auto it = std::lower_bound(
                knots.begin(), knots.end(), t,
                [](const auto& k, double x) { return k.first < x; });
            if (it == knots.begin()) return it->second;
            if (it == knots.end()) return knots.back().second;
            const auto& [x1, y1] = *(it - 1);
            const auto& [x2, y2] = *it;
            return y1 + (t - x1) / (x2 - x1) * (y2 - y1);
        };
        double worst = 0.0;
        for (int i = 0; i <= 10000; ++i) {
            const double t = i / 10000.0;
            worst = std::max(worst, std::abs(env(t) - hull_at(t)));
        }
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("hull refinement is stable") {
    const auto coarse = conjugate_hull(Weighting::prelec(0.8), 10001);
    const auto fine = conjugate_hull(Weighting::prelec(0.8), 40001);
    const auto eval = [](const std::vector<std::pair<double, double>>& knots,
                         double t) {
        auto it = std::lower_bound(
            knots.begin(), knots.end(), t,
            [](const auto& k, double x) { return k.first < x; });
        if (it == knots.begin()) return it->second;
        if (it == knots.end()) return knots.back().second;
        const auto& [x1, y1] = *(it - 1);
        const auto& [x2, y2] = *it;
        return y1 + (t - x1) / (x2 - x1) * (y2 - y1);
    };
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double t = i / 1000.0;
        worst = std::max(worst, std::abs(eval(coarse, t) - eval(fine, t)));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("full-insurance mass moves with nonlinearity, both regimes") {
    // more nonlinearity (alpha further below 1) raises the mass
    double prev = 0.0;
    for (double a : {0.8, 0.6, 0.4, 0.2}) {
        const double fi = build_envelope(Weighting::prelec(a)).fi_mass();
        CHECK(fi > prev);
        prev = fi;
    }
    // more S-shape (alpha above 1) lowers it
    prev = 1.0;
    for (double a : {1.2, 1.5, 2.0, 3.0}) {
        const double fi = build_envelope(Weighting::prelec(a)).fi_mass();
        CHECK(fi < prev);
        prev = fi;
    }
}

TEST_SUITE_END();
