#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "congestion/game.hpp"
#include "congestion/metric.hpp"

namespace congestion {

enum class CertificateKind { kCostSqrt, kDemandSqrt, kConstantLinear, kSlopeLinear };

std::string to_string(CertificateKind kind);

// |rho(G) - rho(G')| <= bound(Dist(G, G')) whenever Dist(G, G') <= radius.
struct HoelderCertificate {
  CertificateKind kind;
  double h = 0.0;
  double exponent = 0.5;
  double radius = 0.0;
  // Exponent 1/2 certificates bound by h * max(sqrt(d), linear_factor * d).
  double linear_factor = 1.0;

  double bound(double d) const;
};

// Solver outputs and cost constants of a base game on [0, T].
struct BaseQuantities {
  double poa = 1.0;
  double c_star = 0.0;
  double total = 0.0;
  double arcs = 0.0;
  double ods = 0.0;
  double lipschitz = 0.0;   // max_a Lipschitz constant on [0, T]
  double deriv_min = 0.0;   // min_a lower bound of tau_a' on [0, T]
  double tau_max = 0.0;     // max_a tau_a(T)
  bool constant = false;    // every cost constant on [0, T]
  bool smooth = false;      // every cost C^1 on [0, T]
};

BaseQuantities base_quantities(const Game& g, double tol = 1e-10);

// Same-demand comparisons (costs vary).
std::optional<HoelderCertificate> certificate_cost(const BaseQuantities& q);
// Same-cost comparisons with T(d') <= T(d) (demands vary).
std::optional<HoelderCertificate> certificate_demand(const BaseQuantities& q);
// Exponent-1 certificates for constant costs or costs with tau' >= m > 0.
std::optional<HoelderCertificate> certificate_linear(const BaseQuantities& q);

std::optional<HoelderCertificate> certificate_cost(const Game& g, double tol = 1e-10);
std::optional<HoelderCertificate> certificate_demand(const Game& g, double tol = 1e-10);
std::optional<HoelderCertificate> certificate_linear(const Game& g, double tol = 1e-10);

struct SweepRecord {
  std::uint64_t seed = 0;
  PerturbationKind kind = PerturbationKind::kJoint;
  double radius = 0.0;
  MetricValue dist;
  double base_poa = 1.0;
  double pert_poa = 1.0;
  double delta = 0.0;
  double tol = 0.0;  // solver tolerance used for this record
  std::optional<double> cert_bound;
  std::optional<CertificateKind> cert_kind;
  bool solved = true;
  bool shrunk = false;
  std::string error;
};

// Name of the subspace swept, in the convention where a cost slice fixes the
// costs and a demand slice fixes the demands.
std::string slice_name(PerturbationKind kind);

struct SweepOptions {
  PerturbationKind kind = PerturbationKind::kJoint;
  std::vector<double> radii{1e-1, 1e-2, 1e-3, 1e-4};
  int samples_per_radius = 32;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency
};

// Sample tolerance min(1e-10, r^2 / 100) for radius r.
double sweep_tolerance(double radius);

// Records ordered by seed, then radius. Solver failures are recorded in
// `error` with solved = false.
std::vector<SweepRecord> sweep(const Game& base, const SweepOptions& opts);

// Whether a record with a certificate satisfies delta <= bound + 20 tol.
bool certificate_respected(const SweepRecord& r);

struct HoelderFit {
  double gamma = 0.0;
  double h = 0.0;
  double r2 = 0.0;
  std::size_t used = 0;
};

// Log-log least squares of delta against dist over usable records: solved,
// delta above max(1e-12, 10 tol), and dist above its grid error. Throws
// Error(kPrecondition) with fewer than 8 usable records.
HoelderFit fit_hoelder(const std::vector<SweepRecord>& records);

}  // namespace congestion
