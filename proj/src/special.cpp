#include "qgevrey/special.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "qgevrey/errors.hpp"

namespace qgevrey {

namespace {

constexpr double kMaxLogTerm = 690.0;  // keep plain theta_eval values finite

// log of |q^{-p(p-1)/(2k)} z^p| for log|z| = lr.
double log_term(int p, double L, double k, double lr) {
  return -double(p) * (p - 1) * L / (2.0 * k) + p * lr;
}

double max_log_term(int P, double L, double k, double lr) {
  double m = -std::numeric_limits<double>::infinity();
  for (int p = -P; p <= P; ++p) m = std::max(m, log_term(p, L, k, lr));
  return m;
}

double tail_relative(int P, double L, double k, double lr) {
  const double lmax = max_log_term(P, L, k, lr);
  double tail = 0.0;
  for (int p = P + 1; p <= P + 80; ++p) {
    tail += std::exp(log_term(p, L, k, lr) - lmax);
    tail += std::exp(log_term(-p, L, k, lr) - lmax);
  }
  return tail;
}

// Sum over [lo, hi] with the largest term factored out. Terms and the running
// sum are carried in long double: theta cancels heavily between zeros, and the
// extra bits keep the result at double accuracy relative to the largest term.
// Summed in 113-bit binary floating point: for q^{1/k} near 1 theta is tiny
// next to its O(1) terms around the negative axis, and long double loses
// about ten digits there.
ScaledComplex partial_sum(int lo, int hi, double L, double k, cplx z) {
  using mp = boost::multiprecision::cpp_bin_float_quad;
  const mp x = z.real(), y = z.imag();
  const mp lr = log(sqrt(x * x + y * y));
  const mp th = atan2(y, x);
  const mp Lm = L, km = k;
  auto lt = [&](int p) { return -mp(p) * (p - 1) * Lm / (2 * km) + p * lr; };
  mp lmax = lt(lo);
  for (int p = lo + 1; p <= hi; ++p) {
    const mp v = lt(p);
    if (v > lmax) lmax = v;
  }
  mp re = 0, im = 0;
  for (int p = lo; p <= hi; ++p) {
    const mp mag = exp(lt(p) - lmax);
    re += mag * cos(p * th);
    im += mag * sin(p * th);
  }
  return {cplx{re.convert_to<double>(), im.convert_to<double>()}, lmax.convert_to<double>()};
}

// Same sum for |z| inside the reduced annulus, where all terms stay O(1):
// consecutive terms differ by the factor q^{-(p-1)/k} z, so the series is
// built by multiplication instead of one exp/cos/sin per term.
ScaledComplex reduced_sum(int P, double L, double k, cplx z) {
  using ld = long double;
  using lc = std::complex<ld>;
  const lc w{z.real(), z.imag()};
  const lc winv = ld(1) / w;
  const ld step = std::exp(-ld(L) / ld(k));
  lc sum{1.0L, 0.0L};
  lc term{1.0L, 0.0L};
  ld f = 1.0L;  // q^{-(p-1)/k} for the step to p
  for (int p = 1; p <= P; ++p) {
    term *= w * f;
    f *= step;
    sum += term;
  }
  term = {1.0L, 0.0L};
  f = step;  // t_p / t_{p+1} = q^{p/k} / z, starting at p = -1
  for (int p = -1; p >= -P; --p) {
    term *= winv * f;
    f *= step;
    sum += term;
  }
  return {cplx{double(sum.real()), double(sum.imag())}, 0.0};
}

}  // namespace

cplx ScaledComplex::value() const { return mantissa * std::exp(log_scale); }

cplx ScaledComplex::reciprocal() const {
  if (mantissa == cplx{0.0, 0.0}) return {std::numeric_limits<double>::infinity(), 0.0};
  return std::exp(-log_scale) / mantissa;
}

double ScaledComplex::log_abs() const { return std::log(std::abs(mantissa)) + log_scale; }

ThetaSpec make_theta_spec(double q, double k, int P, double tail_tol) {
  if (!(q > 1.0) || !(k > 0.0) || P < 1 || !(tail_tol > 0.0)) {
    throw InvalidArgument("theta spec needs q > 1, k > 0, P >= 1, tail_tol > 0");
  }
  ThetaSpec s;
  s.q = q;
  s.k = k;
  s.P = P;
  s.tail_tol = tail_tol;
  const double L = std::log(q);
  auto ok = [&](double lr) {
    return tail_relative(P, L, k, lr) <= tail_tol && max_log_term(P, L, k, lr) < kMaxLogTerm;
  };
  if (!ok(0.0)) throw InvalidArgument("truncation P too small to certify |z| = 1");
  const double step = 1e-3;
  double hi = 0.0, lo = 0.0;
  while (ok(hi + step) && hi < 1e4) hi += step;
  while (ok(lo - step) && lo > -1e4) lo -= step;
  s.annulus_min = std::exp(lo);
  s.annulus_max = std::exp(hi);
  return s;
}

cplx theta_eval(const ThetaSpec& spec, cplx z) {
  const double r = std::abs(z);
  if (r == 0.0) throw DomainViolation("theta has an essential singularity at z = 0");
  if (r < spec.annulus_min || r > spec.annulus_max) {
    std::ostringstream os;
    os << "|z| = " << r << " outside certified truncation annulus [" << spec.annulus_min
       << ", " << spec.annulus_max << "]";
    throw DomainViolation(os.str());
  }
  return partial_sum(-spec.P, spec.P, std::log(spec.q), spec.k, z).value();
}

ScaledComplex theta_scaled(double q, double k, cplx z) {
  const double r = std::abs(z);
  if (r == 0.0) throw DomainViolation("theta has an essential singularity at z = 0");
  const double L = std::log(q);
  const double m = std::floor(k * std::log(r) / L + 0.5);
  const cplx z0 = z * std::exp(-m * L / k);
  // On the reduced annulus the terms fall below e^{-45} of the largest by |p| = P0.
  const int P0 = static_cast<int>(std::ceil(std::sqrt(2.0 * k * 45.0 / L))) + 3;
  ScaledComplex base = reduced_sum(P0, L, k, z0);
  ScaledComplex out;
  out.mantissa = base.mantissa * std::polar(1.0, m * std::arg(z0));
  out.log_scale = base.log_scale + m * (m + 1.0) * L / (2.0 * k) + m * std::log(std::abs(z0));
  return out;
}

QDiffResidual theta_qdiff_residual(const ThetaSpec& spec, cplx z, int m) {
  if (z == cplx{0.0, 0.0}) throw DomainViolation("z = 0");
  if (m == 0) return {0.0, true};
  const double L = std::log(spec.q);
  const cplx shifted = z * std::exp(m * L / spec.k);
  const cplx lhs = theta_eval(spec, shifted);
  const cplx rhs = std::exp(m * (m + 1.0) * L / (2.0 * spec.k)) * std::pow(z, m) * theta_eval(spec, z);
  const double diff = std::abs(lhs - rhs);
  if (std::abs(lhs) == 0.0) return {diff, false};
  return {diff / std::abs(lhs), true};
}

double zero_spiral_margin(double q, double k, cplx z) {
  const double r = std::abs(z);
  if (r == 0.0) throw DomainViolation("z = 0");
  const double L = std::log(q);
  const double th = std::arg(z);
  const long m0 = std::lround(-k * std::log(r) / L);
  double best = std::numeric_limits<double>::infinity();
  for (long m = m0 - 64; m <= m0 + 64; ++m) {
    const double rho = r * std::exp(m * L / k);
    best = std::min(best, std::abs(cplx{1.0, 0.0} + std::polar(rho, th)));
  }
  return best;
}

namespace {

double log_envelope(double q, double k, double r) {
  const double lr = std::log(r);
  return 0.5 * k * lr * lr / std::log(q) + 0.5 * lr;
}

}  // namespace

ThetaLowerBound theta_lower_bound(const ThetaSpec& spec, cplx z, double delta_t) {
  if (!spec.Cqk) throw InvalidArgument("theta spec carries no calibrated C_{q,k}");
  if (!(delta_t > 0.0 && delta_t < 1.0)) throw InvalidArgument("delta must lie in (0,1)");
  const double margin = zero_spiral_margin(spec.q, spec.k, z);
  if (!(margin > delta_t)) {
    std::ostringstream os;
    os << "z too close to the zero spiral of theta: inf_m |1 + z q^{m/k}| = " << margin
       << " <= " << delta_t;
    throw DomainViolation(os.str());
  }
  ThetaLowerBound out;
  out.log_lhs = theta_scaled(spec.q, spec.k, z).log_abs();
  out.log_rhs = std::log(*spec.Cqk * delta_t) + log_envelope(spec.q, spec.k, std::abs(z));
  out.lhs = std::exp(out.log_lhs);
  out.rhs = std::exp(out.log_rhs);
  out.margin_ok = out.log_lhs >= out.log_rhs;
  return out;
}

GrowthCalibration calibrate_growth_constant(double q, double k, double delta_t, int radial,
                                            int angular, double safety) {
  if (!(delta_t > 0.0 && delta_t < 1.0)) throw InvalidArgument("delta must lie in (0,1)");
  const double L = std::log(q);
  double best = std::numeric_limits<double>::infinity();
  int count = 0;
  for (int i = 0; i < radial; ++i) {
    const double lr = (L / k) * i / radial;
    for (int j = 0; j < angular; ++j) {
      const double th = -std::numbers::pi + 2.0 * std::numbers::pi * (j + 0.5) / angular;
      const cplx z = std::polar(std::exp(lr), th);
      const double margin = zero_spiral_margin(q, k, z);
      if (!(margin > delta_t)) continue;
      ++count;
      // Normalising by the margin instead of delta gives |theta| >= C margin env
      // >= C delta env, so the constant serves every delta below the margin.
      const double ratio = theta_scaled(q, k, z).log_abs() - std::log(margin) -
                           log_envelope(q, k, std::exp(lr));
      best = std::min(best, ratio);
    }
  }
  if (count == 0) throw CertificationFailure("no admissible calibration points");
  return {safety * std::exp(best), std::exp(best), count};
}

ThetaSpec with_growth_constant(ThetaSpec spec, const GrowthCalibration& cal, double delta_t) {
  spec.Cqk = cal.Cqk;
  spec.calibration_delta = delta_t;
  return spec;
}

// --- inverse Fourier -------------------------------------------------------

double DecayProfile::bound(double m) const {
  const double a = std::abs(m);
  return C * std::pow(1.0 + a, -mu) * std::exp(-beta * a);
}

double DecayProfile::tail(double M, double b) const {
  const double c = beta - b;
  if (!(c > 0.0)) return std::numeric_limits<double>::infinity();
  const double head = C * std::pow(1.0 + M, -mu) * std::exp(-c * M);
  if (mu >= 0.0) return head / c;
  const double rate = c + mu / (1.0 + M);  // mu < 0 slows the decay
  if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
  return head / rate;
}

std::vector<double> default_symbol_samples() {
  std::vector<double> s;
  for (int i = -200; i <= 200; ++i) s.push_back(0.25 * i);
  return s;
}

Symbol make_symbol(std::function<cplx(double)> f, DecayProfile profile, std::string name,
                   std::span<const double> samples) {
  if (!(profile.C > 0.0) || !(profile.beta > 0.0) || !std::isfinite(profile.mu)) {
    throw InvalidArgument("decay profile needs C > 0, finite mu and beta > 0");
  }
  for (double m : samples) {
    const double v = std::abs(f(m));
    const double b = profile.bound(m);
    if (!(v <= b * (1.0 + 1e-12))) {
      std::ostringstream os;
      os << "symbol '" << name << "' violates its decay profile at m = " << m << ": |f| = " << v
         << " > " << b;
      throw CertificationFailure(os.str());
    }
  }
  return Symbol(std::move(f), profile, std::move(name));
}

Symbol make_symbol(std::function<cplx(double)> f, DecayProfile profile, std::string name) {
  const auto s = default_symbol_samples();
  return make_symbol(std::move(f), profile, std::move(name), s);
}

Symbol builtin_symbol(const std::string& name, double beta, double mu) {
  if (name == "exp_decay") {
    return make_symbol([=](double m) { return cplx{std::exp(-beta * std::abs(m)) * std::pow(1.0 + std::abs(m), -mu), 0.0}; },
                       {1.0, mu, beta}, name);
  }
  if (name == "gaussian") {
    // e^{-m^2} (1+|m|)^mu e^{beta|m|} peaks where 2|m| = mu/(1+|m|) + beta.
    double a = 0.0;
    for (int it = 0; it < 200; ++it) a = 0.5 * (mu / (1.0 + a) + beta);
    const double C = std::exp(-a * a + beta * a) * std::pow(1.0 + a, mu) * (1.0 + 1e-9);
    return make_symbol([](double m) { return cplx{std::exp(-m * m), 0.0}; }, {C, mu, beta}, name);
  }
  if (name == "odd") {
    return make_symbol([=](double m) {
      const double a = std::abs(m);
      return cplx{m * std::exp(-beta * a) * std::pow(1.0 + a, -mu - 1.0), 0.0};
    }, {1.0, mu, beta}, name);
  }
  throw InvalidArgument("unknown built-in symbol '" + name + "'");
}

Symbol symbol_from_csv(const std::string& path, DecayProfile profile) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open symbol samples '" + path + "'");
  std::vector<double> ms;
  std::vector<cplx> vs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double m, re, im = 0.0;
    if (!(row >> m >> re)) continue;  // header
    row >> im;
    if (!ms.empty() && m <= ms.back()) throw InvalidArgument("symbol samples must be sorted by m");
    ms.push_back(m);
    vs.emplace_back(re, im);
  }
  if (ms.size() < 2) throw InvalidArgument("symbol CSV needs at least two rows");
  auto f = [ms, vs](double m) -> cplx {
    if (m < ms.front() || m > ms.back()) return {0.0, 0.0};
    const auto it = std::upper_bound(ms.begin(), ms.end(), m);
    if (it == ms.end()) return vs.back();
    const std::size_t i = static_cast<std::size_t>(it - ms.begin());
    const double w = (m - ms[i - 1]) / (ms[i] - ms[i - 1]);
    return (1.0 - w) * vs[i - 1] + w * vs[i];
  };
  return make_symbol(f, profile, path, ms);
}

FourierResult inverse_fourier(const Symbol& f, cplx z, double beta_prime, double tol) {
  const DecayProfile& p = f.profile();
  if (!(beta_prime < p.beta)) throw DomainViolation("strip half-width beta' must be below beta");
  if (std::abs(z.imag()) > beta_prime) {
    throw DomainViolation("|Im z| exceeds the strip half-width beta'");
  }
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  auto two_sided_tail = [&](double M) { return 2.0 * norm * p.tail(M, beta_prime); };
  double M = 1.0;
  while (two_sided_tail(M) > 0.5 * tol && M < 1e6) M *= 2.0;
  double lo = M / 2.0, hi = M;
  for (int it = 0; it < 40 && lo >= 1.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    (two_sided_tail(mid) > 0.5 * tol ? lo : hi) = mid;
  }
  M = hi;
  QuadOptions opt;
  opt.abs_tol = 0.5 * tol / norm;
  opt.rel_tol = 1e-14;
  const QuadResult r = integrate([&](double m) { return f(m) * std::exp(cplx{0.0, 1.0} * z * m); },
                                 std::vector<double>{-M, -1.0, 0.0, 1.0, M}, opt);
  return {norm * r.value, norm * r.error + two_sided_tail(M), M, r.evaluations};
}

}  // namespace qgevrey
