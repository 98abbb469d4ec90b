#pragma once

// q-Laplace transform of order k along the ray L_d = [0, inf) e^{id}:
//
//   L^d_{q;1/k}(f)(T) = k / log(q) * int_{L_d} f(u) / Theta_k(u / T) du / u.
//
// With u = e^{s + id}, du/u = ds and the integral runs over the real line in s.

#include <complex>
#include <functional>
#include <vector>

#include "qgevrey/quadrature.hpp"

namespace qgevrey {

/// |f(u)| <= K exp(k log^2|u| / (2 log q) + alpha log|u|) for |u| >= rho on the
/// ray, and |f(u)| <= K on the closed disc of radius rho.
struct GrowthCertificate {
  double K = 1.0;
  double alpha = 0.0;
  double k = 1.0;
  double rho = 1.0;

  double bound(double abs_u, double q) const;
};

struct QLaplaceSpec {
  double q = 2.0;
  double k = 1.0;
  double direction = 0.0;
  double delta_t = 0.3;  // required spiral margin of u/T along the ray
  double Cqk = 0.0;      // calibrated theta growth constant for (q, k, delta_t)
  double tol = 1e-12;    // absolute target, quadrature plus tails
  double rel_tol = 1e-12;
  double node_floor = 0.1;
};

/// Calibrates C_{q,k} at delta_t (cached per (q, k, delta_t)) and fills a spec.
QLaplaceSpec make_qlaplace_spec(double q, double k, double direction, double delta_t,
                                double tol = 1e-12);

struct QLaplaceResult {
  cplx value;
  double error;      // quadrature estimate plus both tail bounds
  double tail_bound;
  int nodes_used;
  double s_lo;
  double s_hi;
  double direction_used;
  bool rerouted;
};

using RayFunction = std::function<cplx(cplx)>;

/// Throws DomainViolation when |T| >= q^{(1/2 - alpha)/k} (the certificate
/// no longer forces decay) or when u/T comes within delta_t of the theta zero
/// spiral, and CertificationFailure when f exceeds its certificate on the
/// sampled ray.
QLaplaceResult qlaplace(const QLaplaceSpec& spec, const RayFunction& f,
                        const GrowthCertificate& cert, cplx T);

/// r_1 = q^{(1/2 - alpha)/k} / 2.
double domain_radius(const GrowthCertificate& cert, double q, double k);

/// c_{n,k} with L^d_{q;1/k}(u^n)(T) = c_{n,k} T^n for T on the ray, measured
/// by quadrature and cached per (n, k, q).
double monomial_constant(double q, double k, int n);

using KernelFn = std::function<cplx(cplx u, double m, cplx eps)>;

struct LinkProbe {
  cplx tau;
  double m;
  cplx eps;
};

struct LinkReport {
  std::vector<double> discrepancy;  // relative, per probe
  double max_discrepancy = 0.0;
};

/// Compares L^d_{q;1/kappa}(w1(., m, eps))(tau) with w2(tau, m, eps).
LinkReport verify_laplace_link(const KernelFn& w1, const GrowthCertificate& cert1,
                               const KernelFn& w2, const QLaplaceSpec& spec,
                               const std::vector<LinkProbe>& probes);

}  // namespace qgevrey
