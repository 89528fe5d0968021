#include "congestion/cost_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "congestion/error.hpp"

namespace congestion {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Subintervals used for the rigorous derivative bounds of MonomialLog.
constexpr int kBoundCells = 512;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kDomain, what);
}

void require_domain(double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw Error(ErrorCode::kDomain, "cost function evaluated outside [0, inf)");
  }
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

bool is_integer(double v) { return std::floor(v) == v && v <= 64.0; }

double horner(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

// Index of the segment [b_i, b_{i+1}) holding x; n-1 means the constant tail.
std::size_t segment_of(const PiecewiseLinear& f, double x) {
  auto it = std::upper_bound(f.breakpoints.begin(), f.breakpoints.end(), x);
  return static_cast<std::size_t>(it - f.breakpoints.begin()) - 1;
}

double segment_slope(const PiecewiseLinear& f, std::size_t i) {
  if (i + 1 >= f.breakpoints.size()) return 0.0;
  return (f.values[i + 1] - f.values[i]) /
         (f.breakpoints[i + 1] - f.breakpoints[i]);
}

double mlog_value(const MonomialLog& f, double x) {
  if (f.zeta == 0.0) return 0.0;
  return f.zeta * std::pow(x, f.beta) * std::pow(std::log1p(x), f.alpha);
}

double mlog_derivative(const MonomialLog& f, double x) {
  if (f.zeta == 0.0) return 0.0;
  if (f.alpha == 0.0) {
    if (f.beta == 0.0) return 0.0;
    if (x == 0.0) {
      if (f.beta < 1.0) return kInf;
      return f.beta == 1.0 ? f.zeta : 0.0;
    }
    return f.zeta * f.beta * std::pow(x, f.beta - 1.0);
  }
  if (x == 0.0) {
    // Both terms behave like x^(alpha + beta - 1) near the origin.
    const double e = f.alpha + f.beta - 1.0;
    if (e < 0.0) return kInf;
    return e == 0.0 ? f.zeta * (f.alpha + f.beta) : 0.0;
  }
  const double l = std::log1p(x);
  double d = f.zeta * f.alpha * std::pow(x, f.beta) *
             std::pow(l, f.alpha - 1.0) / (x + 1.0);
  if (f.beta > 0.0) {
    d += f.zeta * f.beta * std::pow(x, f.beta - 1.0) * std::pow(l, f.alpha);
  }
  return d;
}

// Upper bound of the MonomialLog derivative on [lo, hi]. Every factor is
// monotone on the cell, so each is bounded at the appropriate end. Singular
// factors at 0 are paired with vanishing ones through ln(1+x) <= x and
// ln(1+x) >= x / (1+x).
double mlog_derivative_upper(const MonomialLog& f, double lo, double hi) {
  const double llo = std::log1p(lo);
  const double lhi = std::log1p(hi);
  double bound = 0.0;
  if (f.beta > 0.0) {
    double t1;
    if (f.beta >= 1.0) {
      t1 = std::pow(hi, f.beta - 1.0) * std::pow(lhi, f.alpha);
    } else {
      const double e = f.beta - 1.0 + f.alpha;
      const double xpow = e >= 0.0 ? std::pow(hi, e) : std::pow(lo, e);
      const double ratio = lo == 0.0 ? 1.0 : llo / lo;
      t1 = xpow * std::pow(ratio, f.alpha);
    }
    bound += f.zeta * f.beta * t1;
  }
  if (f.alpha > 0.0) {
    double t2;
    if (f.alpha >= 1.0) {
      t2 = std::pow(hi, f.beta) * std::pow(lhi, f.alpha - 1.0) / (lo + 1.0);
    } else {
      const double e = f.beta + f.alpha - 1.0;
      const double xpow = e >= 0.0 ? std::pow(hi, e) : std::pow(lo, e);
      t2 = xpow * std::pow(lo + 1.0, -f.alpha);
    }
    bound += f.zeta * f.alpha * t2;
  }
  return bound;
}

double mlog_derivative_lower(const MonomialLog& f, double lo, double hi) {
  const double llo = std::log1p(lo);
  const double lhi = std::log1p(hi);
  double bound = 0.0;
  if (f.beta > 0.0) {
    const double xpow =
        f.beta >= 1.0 ? std::pow(lo, f.beta - 1.0) : std::pow(hi, f.beta - 1.0);
    bound += f.zeta * f.beta * xpow * std::pow(llo, f.alpha);
  }
  if (f.alpha > 0.0) {
    const double lpow = f.alpha >= 1.0 ? std::pow(llo, f.alpha - 1.0)
                                       : std::pow(lhi, f.alpha - 1.0);
    bound += f.zeta * f.alpha * std::pow(lo, f.beta) * lpow / (hi + 1.0);
  }
  return bound;
}

template <class Cell>
double max_over_cells(double t, Cell cell) {
  double best = 0.0;
  for (int i = 0; i < kBoundCells; ++i) {
    const double lo = t * i / kBoundCells;
    const double hi = t * (i + 1) / kBoundCells;
    best = std::max(best, cell(lo, hi));
  }
  return best;
}

template <class Cell>
double min_over_cells(double t, Cell cell) {
  double best = kInf;
  for (int i = 0; i < kBoundCells; ++i) {
    const double lo = t * i / kBoundCells;
    const double hi = t * (i + 1) / kBoundCells;
    best = std::min(best, cell(lo, hi));
  }
  return best;
}

std::vector<double> trim(std::vector<double> c) {
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  return c;
}

// Kinks of f in (0, t): points where the derivative may jump.
void collect_kinks(const CostFunction& f, double t, std::vector<double>& out) {
  std::visit(
      Overloaded{
          [&](const PiecewiseLinear& p) {
            for (std::size_t i = 1; i < p.breakpoints.size(); ++i) {
              if (p.breakpoints[i] < t) out.push_back(p.breakpoints[i]);
            }
          },
          [&](const Transformed& w) {
            std::vector<double> inner;
            collect_kinks(*w.inner, w.in_scale * t, inner);
            for (double k : inner) out.push_back(k / w.in_scale);
          },
          [&](const Extended& e) {
            collect_kinks(*e.inner, std::min(t, e.at), out);
            if (e.at > 0.0 && e.at < t) out.push_back(e.at);
          },
          [](const auto&) {},
      },
      f.form());
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kBadStructure: return "bad_structure";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kInfeasibleFlow: return "infeasible_flow";
    case ErrorCode::kStructureMismatch: return "structure_mismatch";
    case ErrorCode::kUnknownPath: return "unknown_path";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kUnconverged: return "unconverged";
    case ErrorCode::kInvariant: return "invariant";
  }
  return "unknown";
}

CostFunction CostFunction::constant(double c) {
  require(finite_nonneg(c), "constant cost must be finite and >= 0");
  return CostFunction(Constant{c});
}

CostFunction CostFunction::affine(double slope, double intercept) {
  require(finite_nonneg(slope) && finite_nonneg(intercept),
          "affine cost needs slope >= 0 and intercept >= 0");
  return CostFunction(Affine{slope, intercept});
}

CostFunction CostFunction::polynomial(std::vector<double> coefficients) {
  require(!coefficients.empty(), "polynomial cost needs coefficients");
  for (double c : coefficients) {
    require(finite_nonneg(c), "polynomial coefficients must be >= 0");
  }
  return CostFunction(Polynomial{std::move(coefficients)});
}

CostFunction CostFunction::bpr(double q, double beta, double p) {
  require(finite_nonneg(q) && finite_nonneg(beta) && finite_nonneg(p),
          "bpr cost needs q, beta, p >= 0");
  return CostFunction(Bpr{q, beta, p});
}

CostFunction CostFunction::monomial_log(double zeta, double beta, double alpha) {
  require(finite_nonneg(zeta) && finite_nonneg(beta) && finite_nonneg(alpha),
          "monomial-log cost needs zeta, beta, alpha >= 0");
  return CostFunction(MonomialLog{zeta, beta, alpha});
}

CostFunction CostFunction::piecewise_linear(std::vector<double> breakpoints,
                                            std::vector<double> values) {
  require(!breakpoints.empty() && breakpoints.size() == values.size(),
          "piecewise-linear cost needs matching breakpoints and values");
  require(breakpoints.front() == 0.0, "first breakpoint must be 0");
  for (std::size_t i = 0; i < values.size(); ++i) {
    require(std::isfinite(breakpoints[i]) && finite_nonneg(values[i]),
            "piecewise-linear values must be finite and >= 0");
    if (i > 0) {
      require(breakpoints[i] > breakpoints[i - 1],
              "breakpoints must be strictly increasing");
      require(values[i] >= values[i - 1],
              "piecewise-linear values must be non-decreasing");
    }
  }
  return CostFunction(PiecewiseLinear{std::move(breakpoints), std::move(values)});
}

CostFunction CostFunction::transformed(CostFunction inner, double out_scale,
                                       double in_scale, double offset,
                                       double slope) {
  require(std::isfinite(out_scale) && out_scale > 0.0 &&
              std::isfinite(in_scale) && in_scale > 0.0,
          "transform scales must be positive");
  require(finite_nonneg(slope) && std::isfinite(offset),
          "transform slope must be >= 0");
  const double at0 = out_scale * inner.eval(0.0) + offset;
  require(at0 >= -1e-15 * (1.0 + std::abs(offset)),
          "transformed cost would be negative at 0");
  if (at0 < 0.0) offset -= at0;
  return CostFunction(Transformed{
      std::make_shared<const CostFunction>(std::move(inner)), out_scale,
      in_scale, offset, slope});
}

CostFunction CostFunction::extended(CostFunction inner, double at,
                                    ExtensionMode mode) {
  require(finite_nonneg(at), "extension point must be >= 0");
  if (mode == ExtensionMode::kTangent &&
      (!inner.smooth_on(at) || !std::isfinite(inner.derivative(at)))) {
    throw Error(ErrorCode::kPrecondition,
                "tangent extension requires a differentiable cost");
  }
  return CostFunction(
      Extended{std::make_shared<const CostFunction>(std::move(inner)), at, mode});
}

std::string CostFunction::family() const {
  return std::visit(
      Overloaded{
          [](const Constant&) { return std::string("constant"); },
          [](const Affine&) { return std::string("affine"); },
          [](const Polynomial&) { return std::string("polynomial"); },
          [](const Bpr&) { return std::string("bpr"); },
          [](const MonomialLog&) { return std::string("monomial_log"); },
          [](const PiecewiseLinear&) { return std::string("piecewise_linear"); },
          [](const Transformed&) { return std::string("transformed"); },
          [](const Extended&) { return std::string("extended"); },
      },
      form_);
}

double CostFunction::eval(double x) const {
  require_domain(x);
  return std::visit(
      Overloaded{
          [](const Constant& f) { return f.c; },
          [x](const Affine& f) { return f.slope * x + f.intercept; },
          [x](const Polynomial& f) { return horner(f.coefficients, x); },
          [x](const Bpr& f) { return f.q * std::pow(x, f.beta) + f.p; },
          [x](const MonomialLog& f) { return mlog_value(f, x); },
          [x](const PiecewiseLinear& f) {
            const std::size_t i = segment_of(f, x);
            if (i + 1 >= f.breakpoints.size()) return f.values.back();
            return f.values[i] + segment_slope(f, i) * (x - f.breakpoints[i]);
          },
          [x](const Transformed& f) {
            return f.out_scale * f.inner->eval(f.in_scale * x) + f.offset +
                   f.slope * x;
          },
          [x](const Extended& f) {
            if (x <= f.at) return f.inner->eval(x);
            const double base = f.inner->eval(f.at);
            if (f.mode == ExtensionMode::kConstant) return base;
            return base + f.inner->derivative(f.at) * (x - f.at);
          },
      },
      form_);
}

double CostFunction::derivative(double x) const {
  require_domain(x);
  return std::visit(
      Overloaded{
          [](const Constant&) { return 0.0; },
          [](const Affine& f) { return f.slope; },
          [x](const Polynomial& f) {
            double acc = 0.0;
            for (std::size_t i = f.coefficients.size(); i-- > 1;) {
              acc = acc * x + static_cast<double>(i) * f.coefficients[i];
            }
            return acc;
          },
          [x](const Bpr& f) {
            if (f.q == 0.0 || f.beta == 0.0) return 0.0;
            if (x == 0.0) {
              if (f.beta < 1.0) return kInf;
              return f.beta == 1.0 ? f.q : 0.0;
            }
            return f.q * f.beta * std::pow(x, f.beta - 1.0);
          },
          [x](const MonomialLog& f) { return mlog_derivative(f, x); },
          [x](const PiecewiseLinear& f) {
            return segment_slope(f, segment_of(f, x));
          },
          [x](const Transformed& f) {
            return f.out_scale * f.in_scale * f.inner->derivative(f.in_scale * x) +
                   f.slope;
          },
          [x](const Extended& f) {
            if (x < f.at) return f.inner->derivative(x);
            if (f.mode == ExtensionMode::kConstant) return 0.0;
            return f.inner->derivative(f.at);
          },
      },
      form_);
}

double CostFunction::integral(double x) const {
  require_domain(x);
  return std::visit(
      Overloaded{
          [x](const Constant& f) { return f.c * x; },
          [x](const Affine& f) { return 0.5 * f.slope * x * x + f.intercept * x; },
          [x](const Polynomial& f) {
            double acc = 0.0;
            for (std::size_t i = f.coefficients.size(); i-- > 0;) {
              acc = acc * x + f.coefficients[i] / static_cast<double>(i + 1);
            }
            return acc * x;
          },
          [x](const Bpr& f) {
            return f.q * std::pow(x, f.beta + 1.0) / (f.beta + 1.0) + f.p * x;
          },
          [x](const MonomialLog& f) {
            if (x == 0.0 || f.zeta == 0.0) return 0.0;
            if (f.alpha == 0.0) {
              return f.zeta * std::pow(x, f.beta + 1.0) / (f.beta + 1.0);
            }
            thread_local boost::math::quadrature::tanh_sinh<double> quad;
            return quad.integrate([&f](double s) { return mlog_value(f, s); }, 0.0, x, 1e-14);
          },
          [x](const PiecewiseLinear& f) {
            double acc = 0.0;
            const auto& b = f.breakpoints;
            for (std::size_t i = 0; i + 1 < b.size() && b[i] < x; ++i) {
              const double hi = std::min(x, b[i + 1]);
              const double v_hi = f.values[i] + segment_slope(f, i) * (hi - b[i]);
              acc += 0.5 * (f.values[i] + v_hi) * (hi - b[i]);
            }
            if (x > b.back()) acc += f.values.back() * (x - b.back());
            return acc;
          },
          [x](const Transformed& f) {
            return f.out_scale / f.in_scale * f.inner->integral(f.in_scale * x) +
                   f.offset * x + 0.5 * f.slope * x * x;
          },
          [x](const Extended& f) {
            if (x <= f.at) return f.inner->integral(x);
            const double h = x - f.at;
            double acc = f.inner->integral(f.at) + f.inner->eval(f.at) * h;
            if (f.mode == ExtensionMode::kTangent) {
              acc += 0.5 * f.inner->derivative(f.at) * h * h;
            }
            return acc;
          },
      },
      form_);
}

double CostFunction::marginal(double x) const {
  if (x == 0.0) return eval(0.0);
  return x * derivative(x) + eval(x);
}

double CostFunction::lipschitz_on(double t) const {
  require_domain(t);
  return std::visit(
      Overloaded{
          [](const Constant&) { return 0.0; },
          [](const Affine& f) { return f.slope; },
          [this, t](const Polynomial&) { return derivative(t); },
          [this, t](const Bpr& f) {
            if (f.q == 0.0 || f.beta == 0.0) return 0.0;
            if (f.beta < 1.0) return kInf;
            return derivative(t);
          },
          [this, t](const MonomialLog& f) {
            if (f.zeta == 0.0) return 0.0;
            if (f.alpha == 0.0) {
              if (f.beta == 0.0) return 0.0;
              if (f.beta < 1.0) return kInf;
              return derivative(t);
            }
            if (t == 0.0) return derivative(0.0);
            return max_over_cells(t, [&f](double lo, double hi) {
              return mlog_derivative_upper(f, lo, hi);
            });
          },
          [t](const PiecewiseLinear& f) {
            double best = 0.0;
            for (std::size_t i = 0; i + 1 < f.breakpoints.size(); ++i) {
              if (f.breakpoints[i] <= t) best = std::max(best, segment_slope(f, i));
            }
            return best;
          },
          [t](const Transformed& f) {
            return f.out_scale * f.in_scale * f.inner->lipschitz_on(f.in_scale * t) +
                   f.slope;
          },
          [t](const Extended& f) {
            if (t <= f.at) return f.inner->lipschitz_on(t);
            const double inner = f.inner->lipschitz_on(f.at);
            if (f.mode == ExtensionMode::kConstant) return inner;
            return std::max(inner, f.inner->derivative(f.at));
          },
      },
      form_);
}

double CostFunction::derivative_lower_bound(double t) const {
  require_domain(t);
  return std::visit(
      Overloaded{
          [](const Constant&) { return 0.0; },
          [](const Affine& f) { return f.slope; },
          [](const Polynomial& f) {
            return f.coefficients.size() > 1 ? f.coefficients[1] : 0.0;
          },
          [this, t](const Bpr& f) {
            if (f.q == 0.0 || f.beta == 0.0) return 0.0;
            if (f.beta < 1.0) return derivative(t);
            return f.beta == 1.0 ? f.q : 0.0;
          },
          [this, t](const MonomialLog& f) {
            if (f.zeta == 0.0) return 0.0;
            if (t == 0.0) return derivative(0.0);
            return min_over_cells(t, [&f](double lo, double hi) {
              return mlog_derivative_lower(f, lo, hi);
            });
          },
          [t](const PiecewiseLinear& f) {
            double best = kInf;
            const auto& b = f.breakpoints;
            for (std::size_t i = 0; i + 1 < b.size(); ++i) {
              if (b[i] <= t) best = std::min(best, segment_slope(f, i));
            }
            if (t > b.back() || b.size() == 1) best = std::min(best, 0.0);
            return best;
          },
          [t](const Transformed& f) {
            return f.out_scale * f.in_scale *
                       f.inner->derivative_lower_bound(f.in_scale * t) +
                   f.slope;
          },
          [t](const Extended& f) {
            if (t <= f.at) return f.inner->derivative_lower_bound(t);
            if (f.mode == ExtensionMode::kConstant) return 0.0;
            return std::min(f.inner->derivative_lower_bound(f.at),
                            f.inner->derivative(f.at));
          },
      },
      form_);
}

bool CostFunction::smooth_on(double t) const {
  require_domain(t);
  return std::visit(
      Overloaded{
          [](const Constant&) { return true; },
          [](const Affine&) { return true; },
          [](const Polynomial&) { return true; },
          [](const Bpr& f) {
            return f.q == 0.0 || f.beta == 0.0 || f.beta >= 1.0;
          },
          [](const MonomialLog& f) {
            return f.zeta == 0.0 || (f.alpha == 0.0 && f.beta == 0.0) ||
                   f.alpha + f.beta >= 1.0;
          },
          [t](const PiecewiseLinear& f) {
            for (std::size_t i = 1; i < f.breakpoints.size(); ++i) {
              if (f.breakpoints[i] < t &&
                  segment_slope(f, i) != segment_slope(f, i - 1)) {
                return false;
              }
            }
            return true;
          },
          [t](const Transformed& f) { return f.inner->smooth_on(f.in_scale * t); },
          [t](const Extended& f) {
            if (t <= f.at) return f.inner->smooth_on(t);
            if (!f.inner->smooth_on(f.at)) return false;
            return f.mode == ExtensionMode::kTangent ||
                   f.inner->derivative(f.at) == 0.0;
          },
      },
      form_);
}

std::optional<std::vector<double>> CostFunction::polynomial_on(double t) const {
  using Result = std::optional<std::vector<double>>;
  return std::visit(
      Overloaded{
          [](const Constant& f) -> Result { return std::vector<double>{f.c}; },
          [](const Affine& f) -> Result {
            return std::vector<double>{f.intercept, f.slope};
          },
          [](const Polynomial& f) -> Result { return f.coefficients; },
          [](const Bpr& f) -> Result {
            if (!is_integer(f.beta)) return std::nullopt;
            std::vector<double> c(static_cast<std::size_t>(f.beta) + 1, 0.0);
            c[0] = f.p;
            c.back() += f.q;
            return c;
          },
          [](const MonomialLog& f) -> Result {
            if (f.alpha != 0.0 || !is_integer(f.beta)) return std::nullopt;
            std::vector<double> c(static_cast<std::size_t>(f.beta) + 1, 0.0);
            c.back() = f.zeta;
            return c;
          },
          [t](const PiecewiseLinear& f) -> Result {
            if (f.breakpoints.size() == 1) return std::vector<double>{f.values[0]};
            if (t <= f.breakpoints[1]) {
              return std::vector<double>{f.values[0], segment_slope(f, 0)};
            }
            return std::nullopt;
          },
          [t](const Transformed& f) -> Result {
            auto inner = f.inner->polynomial_on(f.in_scale * t);
            if (!inner) return std::nullopt;
            std::vector<double> c = *inner;
            double power = 1.0;
            for (double& ci : c) {
              ci *= f.out_scale * power;
              power *= f.in_scale;
            }
            if (c.size() < 2) c.resize(2, 0.0);
            c[0] += f.offset;
            c[1] += f.slope;
            return c;
          },
          [t](const Extended& f) -> Result {
            if (t <= f.at) return f.inner->polynomial_on(t);
            return std::nullopt;
          },
      },
      form_);
}

bool CostFunction::marginal_nondecreasing_on(double t, std::size_t samples) const {
  require_domain(t);
  if (samples < 2) samples = 2;
  auto slack = [](double v) { return 1e-12 * (1.0 + std::abs(v)); };
  double prev = marginal(0.0);
  for (std::size_t i = 1; i < samples; ++i) {
    const double x = t * static_cast<double>(i) / static_cast<double>(samples - 1);
    const double c = marginal(x);
    if (c < prev - slack(prev)) return false;
    prev = c;
  }
  std::vector<double> kinks;
  collect_kinks(*this, t, kinks);
  for (double k : kinks) {
    const double h = 1e-9 * std::max(1.0, k);
    if (k - h <= 0.0) continue;
    const double left = (k - h) * derivative(k - h) + eval(k);
    if (left > marginal(k) + slack(left)) return false;
  }
  return true;
}

CostFunction CostFunction::scaled(double c) const {
  require(std::isfinite(c) && c > 0.0, "cost scale must be positive");
  if (c == 1.0) return *this;
  return std::visit(
      Overloaded{
          [c](const Constant& f) { return constant(f.c * c); },
          [c](const Affine& f) { return affine(f.slope * c, f.intercept * c); },
          [c](const Polynomial& f) {
            std::vector<double> k = f.coefficients;
            for (double& v : k) v *= c;
            return polynomial(std::move(k));
          },
          [c](const Bpr& f) { return bpr(f.q * c, f.beta, f.p * c); },
          [c](const MonomialLog& f) {
            return monomial_log(f.zeta * c, f.beta, f.alpha);
          },
          [c](const PiecewiseLinear& f) {
            std::vector<double> v = f.values;
            for (double& y : v) y *= c;
            return piecewise_linear(f.breakpoints, std::move(v));
          },
          [c](const Transformed& f) {
            return transformed(*f.inner, f.out_scale * c, f.in_scale,
                               f.offset * c, f.slope * c);
          },
          [c](const Extended& f) {
            return extended(f.inner->scaled(c), f.at, f.mode);
          },
      },
      form_);
}

CostFunction CostFunction::argument_scaled(double u) const {
  require(std::isfinite(u) && u > 0.0, "argument scale must be positive");
  if (u == 1.0) return *this;
  return std::visit(
      Overloaded{
          [](const Constant& f) { return constant(f.c); },
          [u](const Affine& f) { return affine(f.slope * u, f.intercept); },
          [u](const Polynomial& f) {
            std::vector<double> k = f.coefficients;
            double power = 1.0;
            for (double& v : k) {
              v *= power;
              power *= u;
            }
            return polynomial(std::move(k));
          },
          [u](const Bpr& f) { return bpr(f.q * std::pow(u, f.beta), f.beta, f.p); },
          [this, u](const MonomialLog&) { return transformed(*this, 1.0, u); },
          [u](const PiecewiseLinear& f) {
            std::vector<double> b = f.breakpoints;
            for (double& x : b) x /= u;
            return piecewise_linear(std::move(b), f.values);
          },
          [u](const Transformed& f) {
            return transformed(*f.inner, f.out_scale, f.in_scale * u, f.offset,
                               f.slope * u);
          },
          [u](const Extended& f) {
            return extended(f.inner->argument_scaled(u), f.at / u, f.mode);
          },
      },
      form_);
}

CostFunction CostFunction::shifted(double offset, double slope) const {
  require(finite_nonneg(slope) && std::isfinite(offset),
          "shift slope must be >= 0");
  const double at0 = eval(0.0);
  require(at0 + offset >= -1e-15 * (1.0 + at0), "shift would make cost negative");
  offset = std::max(offset, -at0);
  if (offset == 0.0 && slope == 0.0) return *this;
  return std::visit(
      Overloaded{
          [=](const Constant& f) {
            return slope == 0.0 ? constant(f.c + offset)
                                : affine(slope, f.c + offset);
          },
          [=](const Affine& f) {
            return affine(f.slope + slope, std::max(0.0, f.intercept + offset));
          },
          [=](const Polynomial& f) {
            std::vector<double> k = f.coefficients;
            if (k.size() < 2) k.resize(2, 0.0);
            k[0] = std::max(0.0, k[0] + offset);
            k[1] += slope;
            return polynomial(std::move(k));
          },
          [=, this](const Bpr& f) {
            if (slope == 0.0) return bpr(f.q, f.beta, std::max(0.0, f.p + offset));
            if (f.beta == 1.0) {
              return bpr(f.q + slope, 1.0, std::max(0.0, f.p + offset));
            }
            if (auto poly = polynomial_on(0.0)) {
              std::vector<double> k = *poly;
              if (k.size() < 2) k.resize(2, 0.0);
              k[0] = std::max(0.0, k[0] + offset);
              k[1] += slope;
              return polynomial(std::move(k));
            }
            return transformed(*this, 1.0, 1.0, offset, slope);
          },
          [=, this](const MonomialLog&) {
            return transformed(*this, 1.0, 1.0, offset, slope);
          },
          [=, this](const PiecewiseLinear& f) {
            if (slope != 0.0) return transformed(*this, 1.0, 1.0, offset, slope);
            std::vector<double> v = f.values;
            for (double& y : v) y = std::max(0.0, y + offset);
            return piecewise_linear(f.breakpoints, std::move(v));
          },
          [=](const Transformed& f) {
            return transformed(*f.inner, f.out_scale, f.in_scale,
                               f.offset + offset, f.slope + slope);
          },
          [=, this](const Extended&) {
            return transformed(*this, 1.0, 1.0, offset, slope);
          },
      },
      form_);
}

IntervalBound interval_bound(const CostFunction& f, double t) {
  IntervalBound b;
  b.lo = 0.0;
  b.hi = t;
  b.lipschitz = f.lipschitz_on(t);
  b.deriv_min = std::min(f.derivative_lower_bound(t), b.lipschitz);
  return b;
}

SupDistance sup_distance(const CostFunction& f, const CostFunction& g, double t,
                         std::size_t grid_n) {
  if (!(t > 0.0)) {
    if (t == 0.0) return {std::abs(f.eval(0.0) - g.eval(0.0)), 0.0, true};
    throw Error(ErrorCode::kDomain, "sup_distance needs t >= 0");
  }
  if (grid_n < 2) throw Error(ErrorCode::kDomain, "sup_distance needs grid_n >= 2");

  const auto pf = f.polynomial_on(t);
  const auto pg = g.polynomial_on(t);
  if (pf && pg) {
    std::vector<double> d(std::max(pf->size(), pg->size()), 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double a = i < pf->size() ? (*pf)[i] : 0.0;
      const double b = i < pg->size() ? (*pg)[i] : 0.0;
      d[i] = a - b;
    }
    d = trim(std::move(d));
    if (d.size() <= 4) {
      std::vector<double> candidates{0.0, t};
      // Critical points: roots of d'(x) = d1 + 2 d2 x + 3 d3 x^2.
      const double c0 = d.size() > 1 ? d[1] : 0.0;
      const double c1 = d.size() > 2 ? 2.0 * d[2] : 0.0;
      const double c2 = d.size() > 3 ? 3.0 * d[3] : 0.0;
      if (c2 != 0.0) {
        const double disc = c1 * c1 - 4.0 * c2 * c0;
        if (disc >= 0.0) {
          const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
          if (q != 0.0) {
            candidates.push_back(q / c2);
            candidates.push_back(c0 / q);
          } else {
            candidates.push_back(0.0);
          }
        }
      } else if (c1 != 0.0) {
        candidates.push_back(-c0 / c1);
      }
      double best = 0.0;
      for (double x : candidates) {
        if (x >= 0.0 && x <= t) best = std::max(best, std::abs(horner(d, x)));
      }
      return {best, 0.0, true};
    }
  }

  double best = 0.0;
  const double n1 = static_cast<double>(grid_n - 1);
  for (std::size_t i = 0; i < grid_n; ++i) {
    const double x = i + 1 == grid_n ? t : t * static_cast<double>(i) / n1;
    best = std::max(best, std::abs(f.eval(x) - g.eval(x)));
  }
  const double lip = f.lipschitz_on(t) + g.lipschitz_on(t);
  return {best, lip * t / (2.0 * n1), false};
}

}  // namespace congestion
