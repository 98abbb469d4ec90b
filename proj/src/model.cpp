#include "qgevrey/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "qgevrey/errors.hpp"

namespace qgevrey {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Counterclockwise angle from a to b, in (0, 2 pi].
double ccw_from(double a, double b) {
  double d = std::fmod(b - a, kTwoPi);
  if (d <= 0.0) d += kTwoPi;
  return d;
}

bool same_regular(const Kernel& a, const Kernel& b) {
  if (a.scale != b.scale || a.poles.size() != b.poles.size() || a.polynomial != b.polynomial) return false;
  for (std::size_t i = 0; i < a.poles.size(); ++i) {
    if (a.poles[i].at != b.poles[i].at || a.poles[i].weight != b.poles[i].weight) return false;
  }
  return true;
}

bool same_discrepancy(const Kernel& a, const Kernel& b) {
  if (a.discrepancy.has_value() != b.discrepancy.has_value()) return false;
  if (!a.discrepancy) return true;
  return a.scale == b.scale && a.discrepancy->amplitude == b.discrepancy->amplitude &&
         a.discrepancy->lambda == b.discrepancy->lambda && a.discrepancy->kappa == b.discrepancy->kappa;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

// log-spaced radii and evenly spaced angles over a closed sector
std::vector<cplx> polar_grid(double r_lo, double r_hi, int radial, double a_lo, double a_hi, int angular) {
  std::vector<cplx> out;
  for (int i = 0; i < radial; ++i) {
    const double r = r_lo * std::pow(r_hi / r_lo, radial == 1 ? 0.0 : double(i) / (radial - 1));
    for (int j = 0; j < angular; ++j) {
      const double a = angular == 1 ? 0.5 * (a_lo + a_hi) : a_lo + (a_hi - a_lo) * j / (angular - 1);
      out.push_back(std::polar(r, a));
    }
  }
  return out;
}

double growth_log_bound(const Scenario& sc, double abs_u) {
  const double l = std::log(abs_u);
  return sc.frame.k2() * l * l / (2.0 * sc.frame.log_q()) + sc.nu * l;
}

double discrepancy_log_envelope(const Scenario& sc, const Kernel& k, double abs_u) {
  const double l = std::log(abs_u);
  return std::log(k.growth.K31) - k.discrepancy->kappa * l * l / (2.0 * sc.frame.log_q()) + k.growth.K41 * l;
}

// Angular window where the discrepancy of kernel p is used: between the
// bisectors towards the previous and next directions.
std::pair<double, double> discrepancy_window(const Scenario& sc, int p) {
  const int n = sc.size();
  const double d = sc.directions[std::size_t(p)];
  const double prev = sc.directions[std::size_t((p + n - 1) % n)];
  const double next = sc.directions[std::size_t((p + 1) % n)];
  return {d - 0.5 * ccw_from(prev, d), d + 0.5 * ccw_from(d, next)};
}

double discrepancy_radius(const Scenario& sc) {
  return std::max(sc.rho_tilde, sc.frame.epsilon0() * sc.frame.rT());
}

// Certificate of W_p along the ray d_p for the q-Laplace quadrature (its disc
// part is |W| <= K on |u| <= 1, which e218 does not give).
GrowthCertificate ray_certificate(const Scenario& sc, int p) {
  const Kernel& k = sc.kernels[std::size_t(p)];
  const double q = sc.frame.q();
  const cplx dir = std::polar(1.0, sc.directions[std::size_t(p)]);
  double K = 0.0;
  for (double s = -40.0; s <= 20.0; s += 0.05) {
    const double au = std::exp(s);
    const double v = std::abs(k.borel(q, au * dir));
    K = std::max(K, s <= 0.0 ? v : v / std::exp(growth_log_bound(sc, au)));
  }
  GrowthCertificate c;
  c.K = std::max(1.25 * K, 1e-300);
  c.alpha = sc.nu;
  c.k = sc.frame.k2();
  c.rho = 1.0;
  return c;
}

Symbol decay_symbol(const Scenario& sc) { return builtin_symbol("exp_decay", sc.beta, sc.mu); }

void check_point_impl(const Scenario& sc, int p, cplx t, cplx eps) {
  const int n = sc.size();
  if (p < 0 || p >= n) throw InvalidArgument("sector index out of range");
  if (!sc.covering[std::size_t(p)].contains(eps)) {
    throw DomainViolation("eps = (" + fmt(eps.real()) + ", " + fmt(eps.imag()) + ") outside E_" + std::to_string(p));
  }
  if (!sc.T.contains(t)) throw DomainViolation("t outside the sector T");
  if (!qspiral_membership(sc.domain(p), eps * t)) {
    throw DomainViolation("eps t outside R^b_" + std::to_string(p));
  }
}

}  // namespace

cplx Discrepancy::operator()(double q, cplx u) const {
  return amplitude * theta_scaled(q, kappa, lambda / u).reciprocal();
}

cplx Kernel::regular(cplx u) const {
  cplx v{0.0, 0.0};
  for (const Pole& pl : poles) v += pl.weight * u / (u - pl.at);
  cplx pw{1.0, 0.0};
  for (const cplx& a : polynomial) {
    v += a * pw;
    pw *= u;
  }
  return v;
}

cplx Kernel::borel(double q, cplx u) const {
  cplx v = regular(u);
  if (discrepancy) v += (*discrepancy)(q, u);
  return scale * v;
}

bool Kernel::is_zero() const {
  if (scale == 0.0) return true;
  for (const Pole& pl : poles) if (pl.weight != 0.0) return false;
  for (const cplx& a : polynomial) if (a != 0.0) return false;
  return !discrepancy || discrepancy->amplitude == 0.0;
}

cplx kernel_difference(const Kernel& a, const Kernel& b, double q, cplx u) {
  cplx v{0.0, 0.0};
  if (!same_regular(a, b)) v += a.scale * a.regular(u) - b.scale * b.regular(u);
  if (!same_discrepancy(a, b)) {
    if (a.discrepancy) v += a.scale * (*a.discrepancy)(q, u);
    if (b.discrepancy) v -= b.scale * (*b.discrepancy)(q, u);
  }
  return v;
}

std::vector<bool> Scenario::u_intersections() const {
  const int n = size();
  std::vector<bool> out(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) {
    out[std::size_t(p)] = sectors_intersect(make_sector(directions[std::size_t(p)], u_half_opening),
                                            make_sector(directions[std::size_t((p + 1) % n)], u_half_opening));
  }
  return out;
}

LevelPartition Scenario::levels() const { return classify_levels(u_intersections()); }

QSpiralDomain Scenario::domain(int p) const {
  QSpiralDomain d;
  d.direction = directions[std::size_t(p)];
  d.delta_t = delta_t;
  d.bounded_radius = frame.epsilon0() * frame.rT();
  return d;
}

Scenario default_scenario() {
  Scenario sc;
  sc.frame = make_qframe(2.0, 1.0, 2.0, 0.4, 0.4);
  sc.directions = {0.0, 1.0, kPi, kPi + 1.0};
  for (double d : sc.directions) sc.covering.sectors.push_back(make_sector(d, 1.4, 0.4));
  sc.T = make_sector(0.0, 0.05, sc.frame.rT());
  Kernel g;
  g.poles = {{std::polar(0.6, 0.5), 1.0}, {std::polar(0.6, kPi + 0.5), 1.0}};
  Kernel ge = g;
  ge.discrepancy = Discrepancy{1.0, -std::polar(1.0, 0.5), sc.frame.kappa()};
  sc.kernels = {g, g, ge, ge};
  for (int p = 0; p < 4; ++p) calibrate_kernel_growth(sc, p, sc.kernels[std::size_t(p)]);
  return sc;
}

ScenarioCheck check_scenario(const Scenario& sc) {
  ScenarioCheck out;
  auto fail = [&](std::string s) { out.failures.push_back(std::move(s)); };
  const double L = sc.frame.log_q(), k2 = sc.frame.k2();
  const double rT = sc.frame.rT(), e0r = sc.frame.epsilon0() * rT;
  const int n = sc.size();
  if (n < 2) fail("at least two directions are needed");
  if (sc.covering.size() != std::size_t(n) || sc.kernels.size() != std::size_t(n)) {
    fail("covering, directions and kernels differ in size");
    return out;
  }
  if (!(sc.nu < 0.5)) fail("nu = " + fmt(sc.nu) + " is not below 1/2");
  if (!(sc.nu + k2 / L * std::log(rT) < 0.0)) fail("nu + k2 log(rT)/log q is not negative");
  if (!(sc.alpha + sc.frame.kappa() / L * std::log(e0r) < 0.0)) {
    fail("alpha + kappa log(eps0 rT)/log q is not negative");
  }
  if (!(e0r <= std::pow(sc.frame.q(), (0.5 - sc.nu) / k2) / 2.0)) fail("eps0 rT exceeds q^{(1/2-nu)/k2}/2");
  if (!(sc.beta_prime > 0.0 && sc.beta_prime < sc.beta)) fail("beta' must lie in (0, beta)");
  if (!(sc.delta_t > 0.0 && sc.delta_t < 1.0)) fail("delta_t must lie in (0, 1)");
  if (!(sc.rho_tilde > 0.0)) fail("rho_tilde must be positive");
  if (!(sc.s_half_opening > 0.0 && sc.u_half_opening > 0.0)) fail("sector openings must be positive");
  const CoveringReport cr = validate_good_covering(sc.covering);
  for (const auto& v : cr.adjacency_violations) fail(v);
  if (!cr.valid() && cr.adjacency_violations.empty()) fail("covering does not cover a punctured disc");
  std::vector<QSpiralDomain> doms;
  for (int p = 0; p < n; ++p) doms.push_back(sc.domain(p));
  if (cr.valid()) {
    const AssociationReport ar = associate_family(sc.covering, doms, sc.T, sc.frame);
    for (const auto& f : ar.failures) fail(f);
  }
  const std::vector<bool> meet = sc.u_intersections();
  for (int p = 0; p < n; ++p) {
    const Kernel &a = sc.kernels[std::size_t(p)], &b = sc.kernels[std::size_t((p + 1) % n)];
    if (meet[std::size_t(p)] && !(same_regular(a, b) && same_discrepancy(a, b))) {
      fail("kernels " + std::to_string(p) + " and " + std::to_string((p + 1) % n) +
           " differ although their U-sectors meet");
    }
    for (const Pole& pl : sc.kernels[std::size_t(p)].poles) {
      if (!(std::abs(pl.at) > sc.rho_tilde)) {
        fail("pole of kernel " + std::to_string(p) + " inside the disc of radius rho_tilde");
      }
      if (std::abs(std::remainder(std::arg(pl.at) - sc.directions[std::size_t(p)], kTwoPi)) <= sc.s_half_opening) {
        fail("pole of kernel " + std::to_string(p) + " inside S_d");
      }
    }
  }
  return out;
}

void calibrate_kernel_growth(const Scenario& sc, int p, Kernel& k, double safety) {
  const double q = sc.frame.q();
  const double d = sc.directions[std::size_t(p)];
  double worst = -1e300;
  for (const cplx& u : polar_grid(1e-4, 1e4, 81, d - sc.s_half_opening, d + sc.s_half_opening, 17)) {
    const double v = std::abs(k.borel(q, u));
    if (v > 0.0) worst = std::max(worst, std::log(v) - growth_log_bound(sc, std::abs(u)));
  }
  k.growth.nu = sc.nu;
  k.growth.C_w = worst > -1e299 ? safety * std::exp(worst) : 0.0;
  if (k.discrepancy) {
    const double kap = k.discrepancy->kappa;
    const double L = sc.frame.log_q();
    k.growth.K41 = kap * std::log(std::abs(k.discrepancy->lambda)) / L + 0.5;
    k.growth.K31 = 1.0;
    const auto [lo, hi] = discrepancy_window(sc, p);
    double w = -1e300;
    for (const cplx& u : polar_grid(1e-8, discrepancy_radius(sc), 81, lo, hi, 17)) {
      const double v = std::abs(k.scale * (*k.discrepancy)(q, u));
      if (v > 0.0) w = std::max(w, std::log(v) - discrepancy_log_envelope(sc, k, std::abs(u)));
    }
    k.growth.K31 = w > -1e299 ? safety * std::exp(w) : 0.0;
  }
}

KernelCertification certify_kernel(const Scenario& sc, int p, int radial, int angular) {
  const Kernel& k = sc.kernels[std::size_t(p)];
  const double q = sc.frame.q();
  const double d = sc.directions[std::size_t(p)];
  KernelCertification out;
  const double lC = std::log(k.growth.C_w);
  // offset grid: radii and angles interleave with the calibration grid
  for (const cplx& u : polar_grid(1.3e-4, 0.77e4, radial, d - 0.97 * sc.s_half_opening,
                                  d + 0.97 * sc.s_half_opening, angular)) {
    ++out.points;
    const double v = std::abs(k.borel(q, u));
    if (v == 0.0) continue;
    const double r = std::log(v) - lC - growth_log_bound(sc, std::abs(u));
    out.worst_growth = std::max(out.worst_growth, r);
    if (r > 1e-12) ++out.growth_violations;
  }
  if (k.discrepancy) {
    const auto [lo, hi] = discrepancy_window(sc, p);
    for (const cplx& u : polar_grid(1.7e-8, 0.98 * discrepancy_radius(sc), radial, lo + 0.01, hi - 0.01, angular)) {
      ++out.points;
      const double v = std::abs(k.scale * (*k.discrepancy)(q, u));
      if (v == 0.0) continue;
      const double r = std::log(v) - discrepancy_log_envelope(sc, k, std::abs(u));
      out.worst_discrepancy = std::max(out.worst_discrepancy, r);
      if (r > 1e-12) ++out.discrepancy_violations;
    }
  }
  return out;
}

SolutionValue assemble_solution(const Scenario& sc, int p, cplx t, cplx z, cplx eps, double tol) {
  check_point_impl(sc, p, t, eps);
  const Kernel& k = sc.kernels[std::size_t(p)];
  SolutionValue out{};
  if (k.is_zero()) {
    if (std::abs(z.imag()) > sc.beta_prime) throw DomainViolation("z outside the strip H_beta'");
    return out;
  }
  const QLaplaceSpec spec = make_qlaplace_spec(sc.frame.q(), sc.frame.k2(), sc.directions[std::size_t(p)],
                                               sc.delta_t, tol);
  const double q = sc.frame.q();
  const QLaplaceResult r =
      qlaplace(spec, [&](cplx u) { return k.borel(q, u); }, ray_certificate(sc, p), eps * t);
  const FourierResult f = inverse_fourier(decay_symbol(sc), z, sc.beta_prime, tol);
  out.ray = r.value;
  out.fourier = f.value;
  out.value = r.value * f.value;
  out.error = r.error * std::abs(f.value) + std::abs(r.value) * f.error + r.error * f.error;
  return out;
}

// --- Model ------------------------------------------------------------------

Model::Model(Scenario sc, std::vector<cplx> z_grid) : sc_(std::move(sc)), z_(std::move(z_grid)) {
  const ScenarioCheck chk = check_scenario(sc_);
  if (!chk.ok()) {
    std::string msg = "invalid scenario:";
    for (const auto& f : chk.failures) msg += " " + f + ";";
    throw InvalidArgument(msg);
  }
  if (z_.empty()) z_ = default_z_grid(sc_.beta_prime);
  const Symbol h = decay_symbol(sc_);
  for (const cplx& z : z_) {
    const FourierResult f = inverse_fourier(h, z, sc_.beta_prime, 1e-13);
    F_.push_back(f.value);
    F_err_ = std::max(F_err_, f.error);
  }
  for (int p = 0; p < sc_.size(); ++p) {
    specs_.push_back(make_qlaplace_spec(sc_.frame.q(), sc_.frame.k2(), sc_.directions[std::size_t(p)], sc_.delta_t));
    certs_.push_back(ray_certificate(sc_, p));
  }
  Cqk_ = specs_.front().Cqk;
  u_meet_ = sc_.u_intersections();
}

void Model::check_point(int p, cplx t, cplx eps) const { check_point_impl(sc_, p, t, eps); }

void Model::check_overlap_point(int p, cplx t, cplx eps) const {
  const int n = sc_.size();
  if (p < 0 || p >= n) throw InvalidArgument("overlap index out of range");
  const int p1 = (p + 1) % n;
  if (!sc_.covering[std::size_t(p)].contains(eps) || !sc_.covering[std::size_t(p1)].contains(eps)) {
    throw DomainViolation("eps outside the overlap E_" + std::to_string(p) + " n E_" + std::to_string(p1));
  }
  check_point_impl(sc_, p, t, eps);
  check_point_impl(sc_, p1, t, eps);
}

QLaplaceResult Model::ray(int p, cplx T) const {
  const Kernel& k = sc_.kernels[std::size_t(p)];
  if (k.is_zero()) return QLaplaceResult{cplx{0.0, 0.0}, 0.0, 0.0, 0, 0.0, 0.0, sc_.directions[std::size_t(p)], false};
  const double q = sc_.frame.q();
  return qlaplace(specs_[std::size_t(p)], [&](cplx u) { return k.borel(q, u); }, certs_[std::size_t(p)], T);
}

DifferencePieces Model::pieces(int p, cplx T) const {
  const int n = sc_.size();
  const int p1 = (p + 1) % n;
  const Kernel &W0 = sc_.kernels[std::size_t(p)], &W1 = sc_.kernels[std::size_t(p1)];
  const double q = sc_.frame.q(), k = sc_.frame.k2(), L = sc_.frame.log_q();
  const double c = k / L;
  const double d0 = sc_.directions[std::size_t(p)];
  const double d1 = d0 + ccw_from(d0, sc_.directions[std::size_t(p1)]);
  for (int i = 0; i <= 64; ++i) {
    const double phi = d0 + (d1 - d0) * i / 64.0;
    if (!(qspiral_infimum(phi, T) > sc_.delta_t)) {
      throw DomainViolation("theta zero spiral of u/(eps t) enters the sector between d_" + std::to_string(p) +
                            " and d_" + std::to_string(p1));
    }
  }
  DifferencePieces out;
  out.empty_case = !u_meet_[std::size_t(p)];
  const double lT = std::log(std::abs(T));
  const double s0 = std::log(sc_.rho_tilde);
  const double lbase = std::log(c) - std::log(Cqk_ * sc_.delta_t);
  auto theta_part = [&](double s) { return -k * (s - lT) * (s - lT) / (2.0 * L) - 0.5 * (s - lT); };
  auto frac = [&](cplx u) { return theta_scaled(q, k, u / T).reciprocal(); };
  QuadOptions opt;
  opt.abs_tol = 1e-300;
  opt.rel_tol = 1e-9;
  opt.max_intervals = 20000;
  auto run = [&](const ComplexIntegrand& f, std::vector<double> bp) {
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end(), [](double a, double b) { return b - a < 1e-12; }), bp.end());
    const QuadResult r = integrate(f, bp, opt);
    if (!r.converged) throw CertificationFailure("difference piece quadrature did not converge");
    out.error += r.error;
    return r.value;
  };

  // int_{rho~}^{inf} along direction d
  auto ray_tail = [&](const Kernel& W, int idx, double d) -> cplx {
    if (W.is_zero()) return 0.0;
    const GrowthCertificate& cert = certs_[std::size_t(idx)];
    auto b = [&](double s) {
      const double g = s > 0.0 ? k * s * s / (2.0 * L) + cert.alpha * s : 0.0;
      return lbase + std::log(cert.K) + g + theta_part(s);
    };
    const double b0 = b(s0);
    double s_hi = s0 + 1.0, tail = 0.0;
    for (int it = 0;; ++it) {
      if (it > 20000) throw CertificationFailure("no cutoff for the ray tail");
      const double slope = (b(s_hi + 1e-3) - b(s_hi)) / 1e-3;
      if (slope < 0.0) {
        tail = std::exp(b(s_hi)) / -slope;
        if (b(s_hi) - std::log(-slope) < b0 - 42.0) break;
      }
      s_hi += 0.25;
    }
    out.error += tail;
    const cplx dir = std::polar(1.0, d);
    std::vector<double> bp{s0, s_hi};
    for (double o : {0.1, 1.0}) {
      if (s0 + o < s_hi) bp.push_back(s0 + o);
    }
    if (lT > s0 && lT < s_hi) bp.push_back(lT);
    return run([&](double s) {
      const cplx u = std::exp(s) * dir;
      return c * W.borel(q, u) * frac(u);
    }, bp);
  };
  // arc |u| = rho~ from angle a to angle b
  auto arc = [&](const Kernel& W, double a, double b) -> cplx {
    if (W.is_zero()) return 0.0;
    const double lo = std::min(a, b), hi = std::max(a, b);
    const cplx v = run([&](double phi) {
      const cplx u = std::polar(sc_.rho_tilde, phi);
      return cplx{0.0, c} * W.borel(q, u) * frac(u);
    }, {lo, 0.5 * (lo + hi), hi});
    return a <= b ? v : -v;
  };

  if (!out.empty_case) {
    out.I1 = ray_tail(W1, p1, d1);
    out.I2 = ray_tail(W0, p, d0);
    out.I3 = arc(W0, d0, d1);
    return out;
  }
  const double bis = 0.5 * (d0 + d1);
  out.I1 = ray_tail(W1, p1, d1);
  out.I2 = ray_tail(W0, p, d0);
  out.I4 = arc(W1, d1, bis);
  out.I5 = arc(W0, d0, bis);
  // segment [0, rho~] on the bisector, carrying W_{p+1} - W_p
  const bool regular_differs = !same_regular(W0, W1);
  const bool discrepancy_differs = !same_discrepancy(W0, W1);
  if (regular_differs || discrepancy_differs) {
    auto dbound = [&](double s) {
      double v = 0.0;
      if (regular_differs) v += certs_[std::size_t(p)].K + certs_[std::size_t(p1)].K;
      for (const Kernel* W : {&W0, &W1}) {
        if (discrepancy_differs && W->discrepancy) {
          v += std::exp(discrepancy_log_envelope(sc_, *W, std::exp(s)));
        }
      }
      return v;
    };
    auto b = [&](double s) { return lbase + std::log(dbound(s)) + theta_part(s); };
    double s_peak = s0, b_peak = b(s0), s_lo = s0;
    for (int it = 0;; ++it) {
      if (it > 40000) throw CertificationFailure("no cutoff for the bisector segment");
      s_lo -= 0.25;
      const double v = b(s_lo);
      if (v > b_peak) {
        b_peak = v;
        s_peak = s_lo;
      }
      const double slope = (b(s_lo) - b(s_lo - 1e-3)) / 1e-3;
      if (slope > 0.0 && v - std::log(slope) < b_peak - 42.0) {
        out.error += std::exp(v) / slope;
        break;
      }
    }
    std::vector<double> bp{s_lo, s0};
    for (double o : {-2.0, 0.0, 2.0}) {
      if (s_peak + o > s_lo && s_peak + o < s0) bp.push_back(s_peak + o);
    }
    const cplx dir = std::polar(1.0, bis);
    out.I6 = run([&](double s) {
      const cplx u = std::exp(s) * dir;
      return c * kernel_difference(W1, W0, q, u) * frac(u);
    }, bp);
  }
  return out;
}

Values Model::section(int p, cplx t, cplx eps) const {
  check_point(p, t, eps);
  const cplx R = ray(p, eps * t).value;
  Values v(Eigen::Index(z_.size()));
  for (std::size_t j = 0; j < z_.size(); ++j) v(Eigen::Index(j)) = R * F_[j];
  return v;
}

Values Model::difference(int p, cplx t, cplx eps) const {
  check_overlap_point(p, t, eps);
  const cplx D = pieces(p, eps * t).total();
  Values v(Eigen::Index(z_.size()));
  for (std::size_t j = 0; j < z_.size(); ++j) v(Eigen::Index(j)) = D * F_[j];
  return v;
}

Cocycle Model::cocycle() const {
  auto self = std::make_shared<const Model>(*this);
  Cocycle c;
  c.covering = sc_.covering;
  c.G = [self](int p, cplx t, cplx eps) { return self->section(p, t, eps); };
  c.Delta = [self](int p, cplx t, cplx eps) { return self->difference(p, t, eps); };
  c.levels = sc_.levels();
  c.active.assign(std::size_t(sc_.size()), true);
  c.dim = int(z_.size());
  return c;
}

// --- differences ------------------------------------------------------------

double DifferenceTable::worst_agreement() const {
  double w = 0.0;
  for (const DiffRow& r : rows) {
    const double tol = r.direct_error + r.decomposed_error;
    const double gap = std::abs(r.direct - r.decomposed);
    if (gap > 0.0) w = std::max(w, tol > 0.0 ? gap / tol : std::numeric_limits<double>::infinity());
  }
  return w;
}

void DifferenceTable::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw InvalidArgument("cannot write " + path);
  os.precision(17);
  os << "re_t,im_t,re_z,im_z,re_eps,im_eps,re_direct,im_direct,direct_error,re_decomposed,im_decomposed,"
        "decomposed_error,abs_I1,abs_I2,abs_I3,abs_I4,abs_I5,abs_I6\n";
  for (const DiffRow& r : rows) {
    const DifferencePieces& pc = r.pieces;
    os << r.probe.t.real() << ',' << r.probe.t.imag() << ',' << r.probe.z.real() << ',' << r.probe.z.imag() << ','
       << r.probe.eps.real() << ',' << r.probe.eps.imag() << ',' << r.direct.real() << ',' << r.direct.imag() << ','
       << r.direct_error << ',' << r.decomposed.real() << ',' << r.decomposed.imag() << ',' << r.decomposed_error
       << ',' << std::abs(pc.I1) << ',' << std::abs(pc.I2) << ',' << std::abs(pc.I3) << ',' << std::abs(pc.I4)
       << ',' << std::abs(pc.I5) << ',' << std::abs(pc.I6) << '\n';
  }
}

DifferenceTable consecutive_difference(const Model& m, int p, const std::vector<DiffProbe>& probes, bool decompose) {
  const Scenario& sc = m.scenario();
  DifferenceTable out;
  out.p = p;
  out.empty_case = !sc.u_intersections()[std::size_t(p)];
  const Symbol h = decay_symbol(sc);
  const int p1 = (p + 1) % sc.size();
  for (const DiffProbe& pr : probes) {
    m.check_overlap_point(p, pr.t, pr.eps);
    const cplx T = pr.eps * pr.t;
    const FourierResult F = inverse_fourier(h, pr.z, sc.beta_prime, 1e-13);
    const QLaplaceResult a = m.ray(p1, T), b = m.ray(p, T);
    DiffRow row{};
    row.probe = pr;
    const cplx dR = a.value - b.value;
    row.direct = dR * F.value;
    row.direct_error = (a.error + b.error) * std::abs(F.value) + std::abs(dR) * F.error;
    if (decompose) {
      row.pieces = m.pieces(p, T);
      const cplx D = row.pieces.total();
      row.decomposed = D * F.value;
      row.decomposed_error = row.pieces.error * std::abs(F.value) + std::abs(D) * F.error;
    } else {
      row.decomposed = row.direct;
    }
    out.rows.push_back(row);
  }
  return out;
}

DifferenceTable consecutive_difference(const Scenario& sc, int p, const std::vector<DiffProbe>& probes,
                                       bool decompose) {
  return consecutive_difference(Model(sc, {cplx{0.0, 0.0}}), p, probes, decompose);
}

std::vector<DiffProbe> overlap_grid(const Scenario& sc, int p) {
  const Overlap ov = overlaps(sc.covering)[std::size_t(p)];
  const double r_t = sc.T.radius;
  std::vector<DiffProbe> out;
  for (double f : {0.25, 0.5, 0.75}) {
    for (double r : {0.25, 0.875}) {
      const cplx eps = std::polar(r * ov.radius, ov.lower + f * (ov.upper - ov.lower));
      for (const cplx& t : {std::polar(0.75 * r_t, 0.4 * sc.T.half_opening),
                            std::polar(0.125 * r_t, -0.6 * sc.T.half_opening)}) {
        for (const cplx& z : {cplx{0.0, 0.0}, cplx{0.7, 0.8 * sc.beta_prime}}) out.push_back({t, z, eps});
      }
    }
  }
  return out;
}

void RateCascade::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw InvalidArgument("cannot write " + path);
  os.precision(17);
  os << "j,abs_eps_t,norm\n";
  for (std::size_t i = 0; i < j.size(); ++i) os << j[i] << ',' << abs_eps_t[i] << ',' << norm[i] << '\n';
}

RateCascade rate_cascade(const Model& m, int p, int j_lo, int j_hi) {
  const Scenario& sc = m.scenario();
  const Overlap ov = overlaps(sc.covering)[std::size_t(p)];
  RateCascade out;
  out.p = p;
  out.expected = sc.levels().level_of(p);
  const double t = 0.875 * sc.T.radius;
  for (int j = j_lo; j <= j_hi; ++j) {
    const double x = std::ldexp(1.0, -j);
    if (!(x / t < ov.radius)) throw DomainViolation("cascade point 2^-" + std::to_string(j) + " needs |eps| beyond the overlap");
    const Values d = m.difference(p, t, std::polar(x / t, ov.ray));
    out.j.push_back(j);
    out.abs_eps_t.push_back(x);
    out.norm.push_back(norm(d));
  }
  out.fit = fit_log_gaussian_rate(out.abs_eps_t, out.norm, sc.frame.q());
  return out;
}

// --- two-level pipeline -----------------------------------------------------

namespace {

// Largest ladder radius strictly inside 0.95 r_N; 0 when none fits.
double ladder_pick(const std::vector<double>& ladder, double r) {
  double best = 0.0;
  for (double v : ladder) {
    if (v < 0.95 * r) best = std::max(best, v);
  }
  return best;
}

// |Delta| <= K exp(-k log^2 x / 2L) x^gamma with gamma by least squares over
// a calibration grid of the overlaps and K the worst ratio times 1.5.
FunctionalBound calibrate_functional(const Model& m, const std::vector<int>& ps, double k) {
  const Scenario& sc = m.scenario();
  const double L = sc.frame.log_q();
  const auto ov = overlaps(sc.covering);
  double maxF = 0.0;
  for (const cplx& f : m.fourier()) maxF = std::max(maxF, std::abs(f));
  std::vector<double> ls, rs;
  for (int p : ps) {
    const Overlap& o = ov[std::size_t(p)];
    for (double f : {0.05, 0.25, 0.5, 0.75, 0.95}) {
      for (int j = 0; j <= 40; ++j) {
        const double x = sc.frame.epsilon0() * sc.frame.rT() * std::pow(2.0, -0.5 * j);
        const double y = std::abs(m.pieces(p, std::polar(x, o.lower + f * (o.upper - o.lower))).total()) * maxF;
        if (!(y > 0.0)) continue;
        const double l = std::log(x);
        ls.push_back(l);
        rs.push_back(std::log(y) + k * l * l / (2.0 * L));
      }
    }
  }
  FunctionalBound fb;
  fb.k = k;
  fb.q = sc.frame.q();
  if (ls.size() < 2) {
    fb.K = 0.0;
    return fb;
  }
  double ml = 0.0, mr = 0.0;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    ml += ls[i];
    mr += rs[i];
  }
  ml /= double(ls.size());
  mr /= double(ls.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    sxy += (ls[i] - ml) * (rs[i] - mr);
    sxx += (ls[i] - ml) * (ls[i] - ml);
  }
  fb.gamma = sxy / sxx;
  double worst = -1e300;
  for (std::size_t i = 0; i < ls.size(); ++i) worst = std::max(worst, rs[i] - fb.gamma * ls[i]);
  fb.K = 1.5 * std::exp(worst);
  return fb;
}

// eps in the middle region of E_p: halfway between the neighbouring cuts.
double middle_angle(const std::vector<Overlap>& ov, int p) {
  const int n = int(ov.size());
  const double a = ov[std::size_t((p + n - 1) % n)].ray, b = ov[std::size_t(p)].ray;
  return a + 0.5 * ccw_from(a, b);
}

}  // namespace

TheoremReport verify_two_level_theorem(const Model& m, const TheoremOptions& opt) {
  const Scenario& sc = m.scenario();
  const int n = sc.size();
  TheoremReport rep;
  rep.levels = sc.levels();
  rep.single_level = rep.levels.degenerate();
  for (const auto& w : rep.levels.warnings) rep.warnings.push_back(w);
  if (rep.single_level) rep.warnings.push_back("single-level fallback: only one decay level carries differences");

  const Cocycle c = m.cocycle();
  const GevreyScale s1 = make_scale(sc.frame, Level::one), s2 = make_scale(sc.frame, Level::two);
  const auto ov = overlaps(sc.covering);
  bool ok = true;

  // functional -> sequential bounds per level, certified on the overlaps
  for (Level lv : {Level::one, Level::two}) {
    const std::vector<int>& ps = lv == Level::two ? rep.levels.I1 : rep.levels.I2;
    if (ps.empty()) continue;
    LevelReport lr;
    lr.level = lv;
    lr.overlaps = ps;
    const GevreyScale& s = lv == Level::one ? s1 : s2;
    lr.functional = calibrate_functional(m, ps, sc.frame.k(lv));
    const SequentialRow row = functional_to_sequential(lr.functional, 0).front();
    lr.sequential = {row.C, row.H};
    std::vector<BoundProbe> probes;
    for (int p : ps) {
      const Overlap& o = ov[std::size_t(p)];
      for (int N = 0; N <= opt.n_max + 3; ++N) {
        const double tr = ladder_pick(opt.t_ladder, s.radius(N));
        if (tr == 0.0) continue;
        for (double f : {0.3, 0.7}) {
          for (double r : {0.75, 0.125, 2.5e-3}) {
            probes.push_back({p, N, std::polar(tr, 0.02), std::polar(r * o.radius, o.lower + f * (o.upper - o.lower))});
          }
        }
      }
    }
    try {
      lr.sequential_margin = certify_sequential_bound(level_filter(c, lv), lr.sequential, s, probes);
    } catch (const CertificationFailure& e) {
      ok = false;
      lr.sequential_margin = std::numeric_limits<double>::infinity();
      rep.warnings.push_back(std::string("level ") + to_string(lv) + " sequential bound: " + e.what());
    }
    rep.level_reports.push_back(std::move(lr));
  }

  auto split = std::make_shared<SplitResult>(multilevel_split(c, s1, s2, opt.split_ts, opt.split));
  rep.split = split->report();
  rep.result = split;
  ok = ok && rep.split.passed;
  for (const auto& w : rep.split.warnings) rep.warnings.push_back(w);

  auto probes_for = [&](const std::vector<const GevreyScale*>& scales) {
    std::vector<BoundProbe> pr;
    for (int p = 0; p < n; ++p) {
      const double ang = middle_angle(ov, p);
      for (int N = 0; N <= opt.n_max; ++N) {
        std::vector<double> trs;
        for (const GevreyScale* s : scales) {
          const double tr = ladder_pick(opt.t_ladder, s->radius(N));
          if (tr > 0.0 && std::find(trs.begin(), trs.end(), tr) == trs.end()) trs.push_back(tr);
        }
        for (double tr : trs) {
          for (double r : opt.eps_radii) pr.push_back({p, N, std::polar(tr, 0.02), std::polar(r, ang)});
        }
      }
    }
    return pr;
  };

  auto fit_or_warn = [&](const RemainderTable& tab, const GevreyScale& s, const std::string& what) {
    try {
      GevreyFit f = fit_zero_gevrey_relative(tab, s);
      if (!f.certified()) {
        ok = false;
        rep.warnings.push_back(what + ": fit not certified");
      }
      return f;
    } catch (const std::exception& e) {
      ok = false;
      rep.warnings.push_back(what + ": " + e.what());
      return GevreyFit{};
    }
  };

  for (LevelReport& lr : rep.level_reports) {
    const GevreyScale& s = lr.level == Level::one ? s1 : s2;
    const auto pr = lr.level == Level::two ? probes_for({&s2, &s1}) : probes_for({&s1});
    lr.table = split_remainders(*split, lr.level, pr);
    lr.fit = fit_or_warn(lr.table, s, std::string("level ") + to_string(lr.level));
    if (lr.level == Level::two && !rep.single_level) {
      rep.corollary = fit_or_warn(restrict_to_scale(lr.table, s1), s1, "corollary restriction");
    }
  }

  if (!rep.single_level) {
    RemainderTable merged;
    for (const BoundProbe& b : probes_for({&s1})) {
      const Values v = split->expansion_remainder(Level::one, b.p, b.N, b.t, b.eps) +
                       split->expansion_remainder(Level::two, b.p, b.N, b.t, b.eps);
      merged.rows.push_back({b.N, b.eps, b.t, norm(v)});
    }
    rep.merged = fit_or_warn(merged, s1, "merged expansion");
  }
  rep.passed = ok;
  return rep;
}

}  // namespace qgevrey
