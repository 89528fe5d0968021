#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace congestion {

class CostFunction;

// Parametric families. Every family is non-decreasing and non-negative on
// [0, inf) by construction; the factory functions on CostFunction reject
// parameters that would break that.
struct Constant {
  double c;
};

struct Affine {
  double slope;
  double intercept;
};

// xi_0 + xi_1 x + ... + xi_n x^n with all xi_i >= 0.
struct Polynomial {
  std::vector<double> coefficients;
};

// q x^beta + p.
struct Bpr {
  double q;
  double beta;
  double p;
};

// zeta x^beta ln^alpha(x + 1).
struct MonomialLog {
  double zeta;
  double beta;
  double alpha;
};

// Linear interpolation through (breakpoints[i], values[i]); breakpoints start
// at 0 and the function is constant beyond the last one.
struct PiecewiseLinear {
  std::vector<double> breakpoints;
  std::vector<double> values;
};

// out_scale * inner(in_scale * x) + offset + slope * x. Used where argument or
// value rescaling does not fold back into the inner family.
struct Transformed {
  std::shared_ptr<const CostFunction> inner;
  double out_scale = 1.0;
  double in_scale = 1.0;
  double offset = 0.0;
  double slope = 0.0;
};

enum class ExtensionMode { kConstant, kTangent };

// inner on [0, at]; beyond `at` either frozen at inner(at) or continued along
// the tangent line at `at`.
struct Extended {
  std::shared_ptr<const CostFunction> inner;
  double at;
  ExtensionMode mode;
};

class CostFunction {
 public:
  using Form = std::variant<Constant, Affine, Polynomial, Bpr, MonomialLog,
                            PiecewiseLinear, Transformed, Extended>;

  static CostFunction constant(double c);
  static CostFunction affine(double slope, double intercept);
  static CostFunction polynomial(std::vector<double> coefficients);
  static CostFunction bpr(double q, double beta, double p);
  static CostFunction monomial_log(double zeta, double beta, double alpha);
  static CostFunction piecewise_linear(std::vector<double> breakpoints,
                                       std::vector<double> values);
  static CostFunction transformed(CostFunction inner, double out_scale,
                                  double in_scale, double offset = 0.0,
                                  double slope = 0.0);
  static CostFunction extended(CostFunction inner, double at,
                               ExtensionMode mode);

  const Form& form() const { return form_; }
  std::string family() const;

  // All evaluators throw Error(kDomain) for negative x.
  double operator()(double x) const { return eval(x); }
  double eval(double x) const;
  // Right derivative. May be +inf at 0 (e.g. x^0.5).
  double derivative(double x) const;
  // Integral over [0, x].
  double integral(double x) const;
  // x * f'(x) + f(x), the marginal cost of the arc.
  double marginal(double x) const;

  // An upper bound on sup |f'| over [0, t]; exact for families whose
  // derivative is monotone. May be +inf.
  double lipschitz_on(double t) const;
  // A lower bound on inf f' over [0, t].
  double derivative_lower_bound(double t) const;
  // Whether f is continuously differentiable on [0, t].
  bool smooth_on(double t) const;

  // Coefficients (lowest degree first) of a polynomial that equals f on
  // [0, t], when f has such a representation.
  std::optional<std::vector<double>> polynomial_on(double t) const;

  // Sampled check that the marginal cost is non-decreasing on [0, t], with
  // explicit left-limit checks at kinks.
  bool marginal_nondecreasing_on(double t, std::size_t samples = 1025) const;

  // Positive multiple c * f. Folds into the family parameters when possible.
  CostFunction scaled(double c) const;
  // x -> f(u x). Folds into the family parameters when possible.
  CostFunction argument_scaled(double u) const;
  // f + offset + slope * x, with slope >= 0 and f(0) + offset >= 0.
  CostFunction shifted(double offset, double slope) const;

 private:
  explicit CostFunction(Form form) : form_(std::move(form)) {}
  Form form_;
};

// Evaluable marginal cost c(x) = x f'(x) + f(x) of an arc.
class MarginalCost {
 public:
  explicit MarginalCost(CostFunction f) : f_(std::move(f)) {}
  double operator()(double x) const { return f_.marginal(x); }
  // False flags a non-convex x f(x) on [0, t].
  bool nondecreasing_on(double t) const {
    return f_.marginal_nondecreasing_on(t);
  }

 private:
  CostFunction f_;
};

inline MarginalCost marginal(const CostFunction& f) { return MarginalCost(f); }

struct IntervalBound {
  double lo = 0.0;
  double hi = 0.0;
  double lipschitz = 0.0;  // M
  double deriv_min = 0.0;  // m
};

IntervalBound interval_bound(const CostFunction& f, double t);

inline constexpr std::size_t kDefaultGrid = 4097;

struct SupDistance {
  double estimate = 0.0;
  // The true sup lies in [estimate, estimate + error_bound].
  double error_bound = 0.0;
  bool exact = false;
};

// sup_{x in [0, t]} |f(x) - g(x)|. Exact when f - g is a polynomial of degree
// at most 3 on [0, t]; otherwise a grid maximum with a Lipschitz certificate.
SupDistance sup_distance(const CostFunction& f, const CostFunction& g,
                         double t, std::size_t grid_n = kDefaultGrid);

}  // namespace congestion
