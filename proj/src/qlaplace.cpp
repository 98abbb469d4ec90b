#include "qgevrey/qlaplace.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "qgevrey/errors.hpp"
#include "qgevrey/geometry.hpp"
#include "qgevrey/special.hpp"

namespace qgevrey {

double GrowthCertificate::bound(double abs_u, double q) const {
  if (abs_u <= rho) return K;
  const double lu = std::log(abs_u);
  return K * std::exp(k * lu * lu / (2.0 * std::log(q)) + alpha * lu);
}

namespace {

double cached_growth_constant(double q, double k, double delta_t) {
  static std::mutex mu;
  static std::map<std::tuple<double, double, double>, double> cache;
  const auto key = std::make_tuple(q, k, delta_t);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double c = calibrate_growth_constant(q, k, delta_t).Cqk;
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, c);
  return c;
}

}  // namespace

QLaplaceSpec make_qlaplace_spec(double q, double k, double direction, double delta_t, double tol) {
  if (!(q > 1.0) || !(k > 0.0)) throw InvalidArgument("q-Laplace needs q > 1 and k > 0");
  QLaplaceSpec s;
  s.q = q;
  s.k = k;
  s.direction = direction;
  s.delta_t = delta_t;
  s.Cqk = cached_growth_constant(q, k, delta_t);
  s.tol = tol;
  return s;
}

double domain_radius(const GrowthCertificate& cert, double q, double k) {
  return std::pow(q, (0.5 - cert.alpha) / k) / 2.0;
}

QLaplaceResult qlaplace(const QLaplaceSpec& spec, const RayFunction& f,
                        const GrowthCertificate& cert, cplx T) {
  if (T == cplx{0.0, 0.0}) throw DomainViolation("the q-Laplace transform is taken at T != 0");
  if (!(spec.Cqk > 0.0)) throw InvalidArgument("q-Laplace spec carries no calibrated C_{q,k}");
  if (cert.k > spec.k) {
    throw InvalidArgument("certificate grows faster than the theta kernel of the transform");
  }
  const double L = std::log(spec.q);
  const double lT = std::log(std::abs(T));
  if (cert.k == spec.k && !(lT < (0.5 - cert.alpha) * L / spec.k)) {
    std::ostringstream os;
    os << "|T| = " << std::abs(T) << " outside the domain |T| < q^{(1/2-alpha)/k} = "
       << std::pow(spec.q, (0.5 - cert.alpha) / spec.k);
    throw DomainViolation(os.str());
  }

  // Keep u/T away from the zero spiral; a perturbation of the ray by at most
  // 1e-3 rad is tried before giving up.
  const double need = std::max(spec.delta_t, spec.node_floor);
  double d = spec.direction;
  bool rerouted = false;
  if (!(qspiral_infimum(d, T) > need)) {
    bool found = false;
    for (double shift : {1e-3, -1e-3}) {
      if (qspiral_infimum(d + shift, T) > need) {
        d += shift;
        found = rerouted = true;
        break;
      }
    }
    if (!found) {
      std::ostringstream os;
      os << "u/T approaches the theta zero spiral along direction " << spec.direction
         << ": inf_r |1 + r e^{id}/T| = " << qspiral_infimum(spec.direction, T) << " <= " << need;
      throw DomainViolation(os.str());
    }
  }

  // log of the integrand bound in s, from the certificate and the theta lower bound
  const double pref = std::log(spec.k / L) - std::log(spec.Cqk * spec.delta_t);
  const double lrho = std::log(cert.rho);
  auto g = [&](double s, bool disc) {
    const double growth = disc ? 0.0 : cert.k * s * s / (2.0 * L) + cert.alpha * s;
    return pref + std::log(cert.K) + growth - spec.k * (s - lT) * (s - lT) / (2.0 * L) - 0.5 * (s - lT);
  };
  auto dg = [&](double s, bool disc) {
    const double growth = disc ? 0.0 : cert.k * s / L + cert.alpha;
    return growth - spec.k * (s - lT) / L - 0.5;
  };
  const double quarter = 0.25 * spec.tol;
  double s_hi = std::max(lrho, lT) + 1.0, upper_tail = 0.0;
  for (int it = 0;; ++it) {
    if (it > 20000) throw CertificationFailure("no finite upper cutoff meets the tail tolerance");
    const double slope = dg(s_hi, false);
    if (slope < 0.0) {
      upper_tail = std::exp(g(s_hi, false)) / -slope;
      if (upper_tail <= quarter) break;
    }
    s_hi += 0.25;
  }
  double s_lo = std::min(lrho, lT) - 1.0, lower_tail = 0.0;
  for (int it = 0;; ++it) {
    if (it > 20000) throw CertificationFailure("no finite lower cutoff meets the tail tolerance");
    const double slope = dg(s_lo, true);
    if (slope > 0.0) {
      lower_tail = std::exp(g(s_lo, true)) / slope;
      if (lower_tail <= quarter) break;
    }
    s_lo -= 0.25;
  }

  const cplx dir = std::polar(1.0, d);
  for (double s = s_lo; s <= s_hi + 10.0; s += 0.1) {
    const double au = std::exp(s);
    const double v = std::abs(f(au * dir));
    if (!(v <= cert.bound(au, spec.q) * (1.0 + 1e-9))) {
      std::ostringstream os;
      os << "growth certificate violated at |u| = " << au << ": |f| = " << v << " > "
         << cert.bound(au, spec.q) << "; the tail bound is void";
      throw CertificationFailure(os.str());
    }
  }

  const cplx invT = 1.0 / T;
  const double scale = spec.k / L;
  auto integrand = [&](double s) {
    const cplx u = std::exp(s) * dir;
    return scale * f(u) * theta_scaled(spec.q, spec.k, u * invT).reciprocal();
  };
  std::vector<double> bp{s_lo};
  for (double b : {lT - 3.0, lT, lT + 3.0, lrho, 0.0}) {
    if (b > s_lo && b < s_hi) bp.push_back(b);
  }
  bp.push_back(s_hi);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end(), [](double a, double b) { return b - a < 1e-9; }), bp.end());
  QuadOptions opt;
  opt.abs_tol = 0.5 * spec.tol;
  opt.rel_tol = spec.rel_tol;
  opt.max_intervals = 20000;
  const QuadResult r = integrate(integrand, bp, opt);
  if (!r.converged) {
    std::ostringstream os;
    os << "q-Laplace quadrature did not converge (error estimate " << r.error << ")";
    throw CertificationFailure(os.str());
  }
  QLaplaceResult out;
  out.value = r.value;
  out.tail_bound = upper_tail + lower_tail;
  out.error = r.error + out.tail_bound;
  out.nodes_used = r.evaluations;
  out.s_lo = s_lo;
  out.s_hi = s_hi;
  out.direction_used = d;
  out.rerouted = rerouted;
  return out;
}

double monomial_constant(double q, double k, int n) {
  if (n < 0) throw InvalidArgument("monomial degree must be non-negative");
  static std::mutex mu;
  static std::map<std::tuple<double, double, int>, double> cache;
  const auto key = std::make_tuple(q, k, n);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  // |u|^n <= exp(n^2 log q / k) exp((k/2) log^2|u| / (2 log q)): a certificate of
  // half the order, so T = 1 is inside the domain.
  const double L = std::log(q);
  GrowthCertificate cert{std::exp(n * double(n) * L / k) * (1.0 + 1e-12), 0.0, 0.5 * k, 1.0};
  QLaplaceSpec spec = make_qlaplace_spec(q, k, 0.0, 0.3);
  const double scale = std::exp(n * (n - 1.0) * L / (2.0 * k));  // expected size of c_n / c_0
  spec.tol = 1e-13 * scale;
  spec.rel_tol = 1e-14;
  const double c =
      qlaplace(spec, [n](cplx u) { return std::pow(u, n); }, cert, cplx{1.0, 0.0}).value.real();
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, c);
  return c;
}

LinkReport verify_laplace_link(const KernelFn& w1, const GrowthCertificate& cert1,
                               const KernelFn& w2, const QLaplaceSpec& spec,
                               const std::vector<LinkProbe>& probes) {
  LinkReport rep;
  for (const LinkProbe& p : probes) {
    const cplx lhs = qlaplace(spec, [&](cplx u) { return w1(u, p.m, p.eps); }, cert1, p.tau).value;
    const cplx rhs = w2(p.tau, p.m, p.eps);
    const double d = std::abs(lhs - rhs) / (std::abs(rhs) > 0.0 ? std::abs(rhs) : 1.0);
    rep.discrepancy.push_back(d);
    rep.max_discrepancy = std::max(rep.max_discrepancy, d);
  }
  return rep;
}

}  // namespace qgevrey
