#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>

namespace riskshare {

enum class Shape {
    Convex,
    Concave,
    Linear,
    SShaped,          // convex then concave
    InverseSShaped,   // concave then convex
    Other,
};

std::string shape_name(Shape s);

struct ShapeReport {
    Shape shape = Shape::Other;
    std::optional<double> inflection;  // in (0,1) for the S/inverse-S cases
};

/// A probability weighting function T: [0,1] -> [0,1], strictly increasing,
/// T(0)=0, T(1)=1, with analytic first and second derivatives per family.
/// Immutable value type; cheap to copy and safe to share across threads.
class Weighting {
public:
    struct Linear {};
    struct Prelec {
        double alpha;
    };
    struct TverskyKahneman {
        double gamma;
    };
    struct Hurwicz {
        double gamma;
        double kappa;
    };
    struct Mixture {
        std::shared_ptr<const Weighting> base;
        double weight;  // convex weight on the identity
    };
    struct Custom {
        std::function<double(double)> f;
        std::function<double(double)> df;
        std::function<double(double)> d2f;
        std::string label;
    };

    using Params =
        std::variant<Linear, Prelec, TverskyKahneman, Hurwicz, Mixture, Custom>;

    static Weighting linear();
    static Weighting prelec(double alpha);
    static Weighting tversky_kahneman(double gamma);
    static Weighting hurwicz(double gamma, double kappa);
    static Weighting mixture(Weighting base, double weight);
    static Weighting custom(std::function<double(double)> f,
                            std::function<double(double)> df,
                            std::function<double(double)> d2f,
                            std::string label);

    /// T(p).  Requires p in [0,1].
    double operator()(double p) const;

    /// T'(p).  At exact endpoints returns the finite limit when one exists
    /// and throws EndpointSingularity when the derivative is unbounded there.
    double deriv(double p) const;

    /// T''(p).  Endpoint queries throw unless the family is (effectively)
    /// linear; no caller needs second derivatives at closed endpoints.
    double deriv2(double p) const;

    /// The conjugate distortion t -> 1 - T(1-t).  Involutive.
    Weighting conjugate() const;
    bool is_conjugated() const { return conjugated_; }

    const Params& params() const { return *params_; }
    bool is_linear_family() const;
    std::string describe() const;

private:
    Weighting(Params p, bool conjugated);

    std::shared_ptr<const Params> params_;
    bool conjugated_ = false;  // evaluate as 1 - T(1-t)
};

/// Shape classification.  Prelec and mixtures use analytic rules; other
/// families inspect the sign pattern of T'' on a fine grid.
ShapeReport classify(const Weighting& t, int grid_points = 10001);

}  // namespace riskshare
