#include "congestion/sensitivity.hpp"

#include <algorithm>
#include <cmath>

#include "congestion/equilibrium.hpp"
#include "congestion/error.hpp"
#include "congestion/regression.hpp"
#include "parallel.hpp"

namespace congestion {

std::string to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::kCostSqrt: return "cost_sqrt";
    case CertificateKind::kDemandSqrt: return "demand_sqrt";
    case CertificateKind::kConstantLinear: return "constant_linear";
    case CertificateKind::kSlopeLinear: return "slope_linear";
  }
  return "unknown";
}

double HoelderCertificate::bound(double d) const {
  if (exponent == 1.0) return h * d;
  return h * std::max(std::pow(d, exponent), linear_factor * d);
}

BaseQuantities base_quantities(const Game& g, double tol) {
  const PoaReport rep = poa_report(g, tol);
  BaseQuantities q;
  q.poa = rep.poa;
  q.c_star = rep.so.total_cost;
  q.total = g.total_demand();
  q.arcs = static_cast<double>(g.structure().num_arcs());
  q.ods = static_cast<double>(g.structure().num_od());
  q.deriv_min = INFINITY;
  q.constant = true;
  q.smooth = true;
  for (const auto& c : g.costs()) {
    const double lip = c.lipschitz_on(q.total);
    q.lipschitz = std::max(q.lipschitz, lip);
    q.deriv_min = std::min(q.deriv_min, c.derivative_lower_bound(q.total));
    q.tau_max = std::max(q.tau_max, c(q.total));
    q.constant = q.constant && lip == 0.0;
    q.smooth = q.smooth && c.smooth_on(q.total);
  }
  return q;
}

std::optional<HoelderCertificate> certificate_cost(const BaseQuantities& q) {
  if (!std::isfinite(q.lipschitz) || !(q.c_star > 0.0)) return std::nullopt;
  const double at = q.arcs * q.total;
  HoelderCertificate c{CertificateKind::kCostSqrt};
  c.h = 2.0 * (q.poa + std::sqrt(q.lipschitz * at) + 2.0) / q.c_star * at;
  c.exponent = 0.5;
  c.radius = q.c_star / (2.0 * at);
  return c;
}

std::optional<HoelderCertificate> certificate_demand(const BaseQuantities& q) {
  if (!std::isfinite(q.lipschitz) || !(q.c_star > 0.0)) return std::nullopt;
  const double m = std::max(1.0, q.lipschitz);
  const double at = q.arcs * q.total;
  const double pi = q.arcs * q.ods * q.tau_max;
  const double m_tilde = 2.0 * ((std::sqrt(m * at) + 2.0) * at + pi) * std::sqrt(m);
  const double m_star = 2.0 * (pi + at * m);
  HoelderCertificate c{CertificateKind::kDemandSqrt};
  c.h = (2.0 * q.poa * m_star + 2.0 * m_tilde) / q.c_star;
  c.exponent = 0.5;
  c.radius = std::min(q.total / q.ods, q.c_star / (2.0 * m_star));
  c.linear_factor = std::sqrt(m);
  return c;
}

std::optional<HoelderCertificate> certificate_linear(const BaseQuantities& q) {
  if (!(q.c_star > 0.0)) return std::nullopt;
  const double at = q.arcs * q.total;
  if (q.constant) {
    const double k = 8.0 * at * (q.ods + 1.0);
    HoelderCertificate c{CertificateKind::kConstantLinear};
    c.h = k / q.c_star;
    c.exponent = 1.0;
    c.radius = std::min(q.total / (2.0 * q.ods), q.c_star / k);
    return c;
  }
  if (!q.smooth || !(q.deriv_min > 0.0) || !std::isfinite(q.lipschitz)) {
    return std::nullopt;
  }
  const double m = q.lipschitz;
  const double ratio = 2.0 + m / q.deriv_min;
  const double spread = 1.0 + q.ods * m;
  const double k1 = (4.0 + 4.0 * ratio * q.poa) / q.c_star * at * spread;
  const double we = 2.0 * ratio * at * spread + 2.0 * q.arcs * q.tau_max * q.ods * spread;
  const double so = 4.0 * (q.arcs * q.ods * q.tau_max + at * m) * spread;
  const double k2 = 2.0 * (q.poa * so + we) / q.c_star;
  HoelderCertificate c{CertificateKind::kSlopeLinear};
  c.h = k1 + k2;
  c.exponent = 1.0;
  c.radius = std::min({q.total / (2.0 * q.ods), q.c_star / (2.0 * so),
                       q.c_star / (8.0 * at * spread)});
  return c;
}

std::optional<HoelderCertificate> certificate_cost(const Game& g, double tol) {
  return certificate_cost(base_quantities(g, tol));
}

std::optional<HoelderCertificate> certificate_demand(const Game& g, double tol) {
  return certificate_demand(base_quantities(g, tol));
}

std::optional<HoelderCertificate> certificate_linear(const Game& g, double tol) {
  return certificate_linear(base_quantities(g, tol));
}

std::string slice_name(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::kDemand: return "cost-slice";
    case PerturbationKind::kCost: return "demand-slice";
    case PerturbationKind::kJoint: return "full";
  }
  return "unknown";
}

double sweep_tolerance(double radius) {
  return std::min(1e-10, radius * radius / 100.0);
}

std::vector<SweepRecord> sweep(const Game& base, const SweepOptions& opts) {
  if (opts.radii.empty() || opts.samples_per_radius <= 0) {
    throw Error(ErrorCode::kPrecondition, "sweep needs radii and samples");
  }
  double tightest = 1e-10;
  for (double r : opts.radii) tightest = std::min(tightest, sweep_tolerance(r));
  const BaseQuantities q = base_quantities(base, tightest);
  const auto cost_cert = certificate_cost(q);
  const auto demand_cert = certificate_demand(q);
  const auto linear_cert = certificate_linear(q);

  const std::size_t per = static_cast<std::size_t>(opts.samples_per_radius);
  const std::size_t n = opts.radii.size() * per;
  std::vector<SweepRecord> out(n);
  detail::parallel_for(n, opts.threads, [&](std::size_t i) {
    SweepRecord& r = out[i];
    r.seed = opts.seed + i;
    r.kind = opts.kind;
    r.radius = opts.radii[i / per];
    r.base_poa = q.poa;
    r.tol = sweep_tolerance(r.radius);
    try {
      Perturbation p = sample_ball(base, r.radius, opts.kind, r.seed);
      r.dist = p.distance;
      r.shrunk = p.shrunk;
      r.pert_poa = poa(p.game, r.tol);
      r.delta = std::abs(r.pert_poa - r.base_poa);

      const double d = r.dist.value + r.dist.error_bound;
      auto consider = [&](const std::optional<HoelderCertificate>& c) {
        if (!c || d > c->radius || r.dist.value <= 0.0) return;
        const double b = c->bound(d);
        if (!r.cert_bound || b < *r.cert_bound) {
          r.cert_bound = b;
          r.cert_kind = c->kind;
        }
      };
      if (opts.kind == PerturbationKind::kCost) consider(cost_cert);
      if (opts.kind == PerturbationKind::kDemand &&
          p.game.total_demand() <= base.total_demand()) {
        consider(demand_cert);
      }
      consider(linear_cert);
    } catch (const Error& e) {
      r.solved = false;
      r.error = e.what();
    }
  });
  std::stable_sort(out.begin(), out.end(), [](const SweepRecord& a, const SweepRecord& b) {
    if (a.seed != b.seed) return a.seed < b.seed;
    return a.radius < b.radius;
  });
  return out;
}

bool certificate_respected(const SweepRecord& r) {
  if (!r.solved || !r.cert_bound) return true;
  return r.delta <= *r.cert_bound + 20.0 * r.tol;
}

HoelderFit fit_hoelder(const std::vector<SweepRecord>& records) {
  std::vector<double> x, y;
  for (const auto& r : records) {
    if (!r.solved) continue;
    if (!(r.delta > std::max(1e-12, 10.0 * r.tol))) continue;
    if (!(r.dist.value > r.dist.error_bound)) continue;
    x.push_back(r.dist.value);
    y.push_back(r.delta);
  }
  if (x.size() < 8) {
    throw Error(ErrorCode::kPrecondition, "Hoelder fit needs at least 8 usable records");
  }
  const LineFit f = fit_loglog(x, y);
  return {f.slope, std::exp(f.intercept), f.r2, f.n};
}

}  // namespace congestion
