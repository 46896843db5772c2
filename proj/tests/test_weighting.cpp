#include <doctest.h>

#include <cmath>
#include <vector>

#include "riskshare/errors.hpp"
#include "riskshare/numeric.hpp"
#include "riskshare/weighting.hpp"

#include "helpers.hpp"

using namespace riskshare;

namespace {

std::vector<Weighting> family_matrix() {
    return {
        Weighting::prelec(0.4),  Weighting::prelec(0.8),
        Weighting::prelec(1.2),  Weighting::prelec(2.0),
        Weighting::tversky_kahneman(0.5), Weighting::tversky_kahneman(0.61),
        Weighting::tversky_kahneman(0.9), Weighting::hurwicz(0.5, 0.5),
        Weighting::hurwicz(0.3, 0.7),     Weighting::hurwicz(0.9, 0.5),
        Weighting::linear(),
        Weighting::mixture(Weighting::prelec(0.4), 0.25),
        Weighting::mixture(Weighting::prelec(2.0), 0.75),
    };
}

}  // namespace

TEST_SUITE_BEGIN("weighting");

TEST_CASE("prelec evaluation pins") {
    CHECK(Weighting::prelec(1.0)(0.3) == doctest::Approx(0.3).epsilon(1e-14));
    const double p = std::exp(-1.0);
    CHECK(Weighting::prelec(2.0)(p) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(Weighting::prelec(0.7)(0.0) == 0.0);
    CHECK(Weighting::prelec(0.7)(1.0) == 1.0);
}

TEST_CASE("hurwicz evaluation against direct substitution") {
    const Weighting t = Weighting::hurwicz(0.5, 0.5);
    // 0.5*(0.5*0.5)/(1.5*0.5+0.5*0.5) + 0.5*(1.5*0.5)/(0.5*0.5+1.5*0.5)
    const double expected = 0.5 * 0.25 / 1.0 + 0.5 * 0.75 / 1.0;
    CHECK(t(0.5) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(expected == doctest::Approx(0.5));
}

TEST_CASE("endpoints and monotonicity across the family matrix") {
    for (const auto& t : family_matrix()) {
        CAPTURE(t.describe());
        CHECK(t(0.0) == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(t(1.0) == doctest::Approx(1.0).epsilon(1e-14));
        double prev = 0.0;
        for (int i = 1; i <= 400; ++i) {
            const double p = i / 400.0;
            const double v = t(p);
            CHECK(v >= prev - 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("derivatives match central finite differences") {
    for (const auto& t : family_matrix()) {
        CAPTURE(t.describe());
        for (int i = 1; i <= 99; ++i) {
            const double p = i / 100.0;
            const double fd =
                numeric::central_diff([&t](double x) { return t(x); }, p, 1e-6);
            CHECK(std::abs(t.deriv(p) - fd) < 1e-6);
            const double fd2 = numeric::central_diff(
                [&t](double x) { return t.deriv(x); }, p, 1e-6);
            CHECK(std::abs(t.deriv2(p) - fd2) < 1e-6 * std::max(1.0, std::abs(fd2)));
        }
    }
}

TEST_CASE("prelec identity family has unit derivative") {
    const Weighting t = Weighting::prelec(1.0);
    for (double p : {0.1, 0.5, 0.9}) {
        CHECK(t.deriv(p) == 1.0);
        CHECK(t.deriv2(p) == 0.0);
    }
}

TEST_CASE("endpoint singularities are signalled") {
    CHECK_THROWS_AS(Weighting::prelec(0.5).deriv(0.0), EndpointSingularity);
    CHECK_THROWS_AS(Weighting::prelec(0.5).deriv(1.0), EndpointSingularity);
    CHECK_THROWS_AS(Weighting::tversky_kahneman(0.5).deriv(0.0),
                    EndpointSingularity);
    // bounded families return the endpoint limit
    CHECK(Weighting::prelec(2.0).deriv(0.0) == 0.0);
    CHECK(Weighting::hurwicz(0.5, 0.5).deriv(0.0) ==
          doctest::Approx(5.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("hurwicz conjugate derivative at the upper endpoint") {
    // Ttilde'(1-) = T'(0+) = g(1-k)/(1+k) + (1-g)(1+k)/(1-k); for g=k=1/2
    // this is 1/6 + 3/2 = 5/3.  Cross-checked by finite differences inside
    // the interval.
    const Weighting conj = Weighting::hurwicz(0.5, 0.5).conjugate();
    const double limit = conj.deriv(1.0);
    CHECK(limit == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
    CHECK(conj.deriv(1.0 - 1e-7) == doctest::Approx(limit).epsilon(1e-5));
}

TEST_CASE("conjugate involution and reflection identity") {
    for (const auto& t : family_matrix()) {
        CAPTURE(t.describe());
        const Weighting conj = t.conjugate();
        const Weighting back = conj.conjugate();
        for (int i = 0; i <= 1000; ++i) {
            const double p = i / 1000.0;
            CHECK(std::abs(back(p) - t(p)) < 1e-12);
            CHECK(std::abs(conj(p) + t(1.0 - p) - 1.0) < 1e-12);
        }
        // derivative mapping Ttilde'(t) = T'(1-t)
        for (double p : {0.2, 0.5, 0.8})
            CHECK(conj.deriv(p) == doctest::Approx(t.deriv(1.0 - p)).epsilon(1e-13));
    }
}

TEST_CASE("prelec conjugate closed form") {
    const double a = 0.8;
    const Weighting conj = Weighting::prelec(a).conjugate();
    for (double p : {0.1, 0.4, 0.75, 0.95}) {
        const double expected = 1.0 - std::exp(-std::pow(-std::log(1.0 - p), a));
        CHECK(conj(p) == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("mixture is the exact affine blend") {
    const Weighting base = Weighting::prelec(0.4);
    const double f = 0.3;
    const Weighting mix = Weighting::mixture(base, f);
    for (int i = 0; i <= 100; ++i) {
        const double p = i / 100.0;
        CHECK(mix(p) == (1.0 - f) * base(p) + f * p);
        if (i > 0 && i < 100)
            CHECK(mix.deriv(p) == (1.0 - f) * base.deriv(p) + f);
    }
}

TEST_CASE("classification") {
    CHECK(classify(Weighting::prelec(2.0)).shape == Shape::SShaped);
    CHECK(classify(Weighting::prelec(1.0)).shape == Shape::Linear);
    CHECK(classify(Weighting::prelec(1.0 + 1e-10)).shape == Shape::Linear);
    CHECK(classify(Weighting::prelec(0.4)).shape == Shape::InverseSShaped);
    CHECK(classify(Weighting::tversky_kahneman(0.5)).shape ==
          Shape::InverseSShaped);
    CHECK(classify(Weighting::hurwicz(0.5, 0.5)).shape == Shape::InverseSShaped);
    CHECK(classify(Weighting::hurwicz(1.0, 0.5)).shape == Shape::Convex);
    CHECK(classify(Weighting::hurwicz(0.0, 0.5)).shape == Shape::Concave);
    CHECK(classify(Weighting::linear()).shape == Shape::Linear);
    CHECK(classify(testhelpers::make_convex_restriction(0.5)).shape ==
          Shape::Convex);
    CHECK(classify(testhelpers::make_concave_restriction(0.5)).shape ==
          Shape::Concave);
}

TEST_CASE("inflection marks the single curvature sign change") {
    for (const auto& t : {Weighting::prelec(0.4), Weighting::prelec(2.0),
                          Weighting::hurwicz(0.5, 0.5),
                          Weighting::tversky_kahneman(0.5)}) {
        CAPTURE(t.describe());
        const ShapeReport rep = classify(t);
        REQUIRE(rep.inflection.has_value());
        const double q = *rep.inflection;
        CHECK(q > 0.0);
        CHECK(q < 1.0);
        const double left = t.deriv2(std::max(q - 0.02, 1e-3));
        const double right = t.deriv2(std::min(q + 0.02, 1.0 - 1e-3));
        CHECK(left * right < 0.0);
        CHECK(std::abs(t.deriv2(q)) < 1e-7);
    }
}

TEST_CASE("admissibility errors") {
    CHECK_THROWS_AS(Weighting::prelec(-1.0), ConfigError);
    CHECK_THROWS_AS(Weighting::prelec(0.0), ConfigError);
    CHECK_THROWS_AS(Weighting::hurwicz(1.5, 0.5), ConfigError);
    CHECK_THROWS_AS(Weighting::hurwicz(0.5, 1.0), ConfigError);
    CHECK_THROWS_AS(Weighting::mixture(Weighting::linear(), 1.5), ConfigError);
    // non-monotone region of the Tversky-Kahneman family
    CHECK_THROWS_AS(Weighting::tversky_kahneman(0.2), ConfigError);
}

TEST_SUITE_END();
