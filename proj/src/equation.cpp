#include "qgevrey/equation.hpp"

#include <boost/rational.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qgevrey/errors.hpp"

namespace qgevrey {

namespace {

using Rational = boost::rational<long long>;

// p/q with q <= 10^6 reproducing x exactly in double, via continued fractions.
std::optional<Rational> small_rational(double x) {
  if (!std::isfinite(x)) return std::nullopt;
  long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int it = 0; it < 40; ++it) {
    const double a = std::floor(r);
    if (std::abs(a) > 1e12) break;
    const long long ai = static_cast<long long>(a);
    const long long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > 1000000) break;
    h0 = h1, h1 = h2, k0 = k1, k1 = k2;
    if (static_cast<double>(h1) / static_cast<double>(k1) == x) return Rational(h1, k1);
    const double frac = r - a;
    if (frac == 0.0) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

template <class T>
T to_num(long long v) {
  return T(v);
}

std::string fmt(const Rational& r) {
  std::ostringstream os;
  os << r.numerator();
  if (r.denominator() != 1) os << "/" << r.denominator();
  return os.str();
}
std::string fmt(double d) {
  std::ostringstream os;
  os << d;
  return os.str();
}

template <class T>
void check_h1(const EquationSpec& s, T k1, T k2, HypothesisReport& rep) {
  const T kappa = k1 * k2 / (k2 - k1);
  auto add = [&](std::string clause, std::string witness) {
    rep.violations.push_back({std::move(clause), std::move(witness)});
  };
  const T dD1 = to_num<T>(s.dD1), dD2 = to_num<T>(s.dD2);
  for (std::size_t i = 0; i < s.terms.size(); ++i) {
    const EquationTerm& e = s.terms[i];
    const std::string l = "l=" + std::to_string(i + 1);
    const T d = to_num<T>(e.d), delta = to_num<T>(e.delta);
    if (e.Delta < e.d) add("H1: Delta_l >= d_l", l + ": " + std::to_string(e.Delta) + " < " + std::to_string(e.d));
    const T a = (dD1 - T(1)) / kappa + d / k2 + T(1);
    if (a < delta) add("H1: (dD1-1)/kappa + d_l/k2 + 1 >= delta_l", l + ": " + fmt(a) + " < " + std::to_string(e.delta));
    const T b = d / k1 + T(1);
    if (b < delta) add("H1: d_l/k1 + 1 >= delta_l", l + ": " + fmt(b) + " < " + std::to_string(e.delta));
    const T c = (dD2 - T(1)) / k2;
    if (c < delta - T(1)) add("H1: (dD2-1)/k2 >= delta_l - 1", l + ": " + fmt(c) + " < " + std::to_string(e.delta - 1));
  }
  const T lhs = k1 * (dD2 - T(1)), rhs = k2 * dD1;
  if (!(lhs > rhs)) add("H1: k1 (dD2-1) > k2 dD1", fmt(lhs) + " <= " + fmt(rhs));
}

void check_imaginary_zeros(const Polynomial& P, const std::string& name,
                           const std::vector<double>& m_grid, HypothesisReport& rep) {
  if (P.degree() < 0) {
    rep.violations.push_back({"H2: " + name + "(im) != 0", name + " is the zero polynomial"});
    return;
  }
  for (double m : m_grid) {
    const double scale = P.coefficient_scale() * std::pow(1.0 + std::abs(m), P.degree());
    if (std::abs(P(cplx{0.0, m})) <= 1e-13 * scale) {
      rep.violations.push_back({"H2: " + name + "(im) != 0", "grid point m = " + fmt(m)});
      return;
    }
  }
  for (const cplx& r : P.roots()) {
    if (std::abs(r.real()) <= 1e-9 * std::max(1.0, std::abs(r))) {
      rep.violations.push_back({"H2: " + name + "(im) != 0", "root at m = " + fmt(r.imag())});
      return;
    }
  }
}

}  // namespace

HypothesisReport validate_hypotheses(const EquationSpec& s, const std::vector<double>& m_grid) {
  HypothesisReport rep;
  auto add = [&](std::string clause, std::string witness) {
    rep.violations.push_back({std::move(clause), std::move(witness)});
  };
  if (s.D < 3) add("D >= 3", "D = " + std::to_string(s.D));
  if (static_cast<int>(s.terms.size()) != s.D - 1) {
    add("one term per l = 1..D-1", std::to_string(s.terms.size()) + " terms for D = " + std::to_string(s.D));
  }
  if (s.dD1 < 1 || s.dD2 < 1) add("dD1, dD2 >= 1", std::to_string(s.dD1) + ", " + std::to_string(s.dD2));
  for (std::size_t i = 0; i < s.terms.size(); ++i) {
    const EquationTerm& e = s.terms[i];
    const std::string l = "l=" + std::to_string(i + 1);
    if (e.Delta < 0 || e.d < 1 || e.delta < 1) add("Delta_l >= 0, d_l >= 1, delta_l >= 1", l);
    if (i == 0 && e.delta != 1) add("delta_1 = 1", "delta_1 = " + std::to_string(e.delta));
    if (i > 0 && !(s.terms[i - 1].delta < e.delta)) {
      add("delta_l < delta_{l+1}", l + ": " + std::to_string(s.terms[i - 1].delta) + " >= " + std::to_string(e.delta));
    }
  }
  const auto k1 = small_rational(s.frame.k1()), k2 = small_rational(s.frame.k2());
  if (k1 && k2) {
    check_h1<Rational>(s, *k1, *k2, rep);
  } else {
    rep.exact = false;
    check_h1<double>(s, s.frame.k1(), s.frame.k2(), rep);
  }
  check_imaginary_zeros(s.Q, "Q", m_grid, rep);
  check_imaginary_zeros(s.RD1, "R_D1", m_grid, rep);
  check_imaginary_zeros(s.RD2, "R_D2", m_grid, rep);
  int max_rl = -1;
  for (const auto& e : s.terms) max_rl = std::max(max_rl, e.R.degree());
  const int dq = s.Q.degree(), d1 = s.RD1.degree(), d2 = s.RD2.degree();
  if (!(dq >= d1 && d1 == d2 && d2 >= max_rl)) {
    add("H2: deg Q >= deg R_D1 = deg R_D2 >= max deg R_l",
        std::to_string(dq) + ", " + std::to_string(d1) + ", " + std::to_string(d2) + ", " + std::to_string(max_rl));
  }
  for (int j = 1; j <= 2; ++j) {
    const int dj = j == 1 ? d1 : d2;
    if (!(s.mu > dj + 1)) add("mu > deg R_Dj + 1", "j=" + std::to_string(j) + ": mu = " + fmt(s.mu));
  }
  return rep;
}

namespace {

double series_weight(const QFrame& f, int p) {
  return std::exp(-double(p) * p * f.kappa() * f.log_q() / (2.0 * f.k1() * f.k2()));
}

double profile_factor(double mu, double beta, double m) {
  return std::pow(1.0 + std::abs(m), -mu) * std::exp(-beta * std::abs(m));
}

}  // namespace

void certify_coefficients(const CoefficientSeries& cs, const QFrame& frame, int p_max,
                          const std::vector<double>& m_grid, const std::vector<cplx>& eps_grid) {
  if (cs.C.size() != cs.DeltaC.size()) throw InvalidArgument("one Delta_C per coefficient family");
  auto fail = [](const std::string& what, int p, double m, cplx e, double v, double b) {
    std::ostringstream os;
    os << what << " exceeds its bound at p = " << p << ", m = " << m << ", eps = " << e << ": " << v
       << " > " << b;
    throw CertificationFailure(os.str());
  };
  for (int p = 0; p <= p_max; ++p) {
    const double geo = std::pow(cs.T0, -p);
    for (double m : m_grid) {
      const double prof = profile_factor(cs.mu, cs.beta, m);
      for (const cplx& e : eps_grid) {
        for (std::size_t l = 0; l < cs.C.size(); ++l) {
          const double b = cs.DeltaC[l] * geo * series_weight(frame, p) * prof;
          const double v = std::abs(cs.C[l](p, m, e));
          if (!(v <= b * (1.0 + 1e-12))) fail("C_{" + std::to_string(l + 1) + ",p}", p, m, e, v, b);
        }
        if (cs.F) {
          const double b = cs.DeltaF * geo * prof;
          const double v = std::abs(cs.F(p, m, e));
          if (!(v <= b * (1.0 + 1e-12))) fail("F_p", p, m, e, v, b);
        }
      }
    }
  }
}

AssembledCoefficients assemble_coefficients(const CoefficientSeries& cs, const QFrame& frame,
                                            cplx t, cplx z, cplx eps, double beta_prime,
                                            double tol) {
  const cplx x = eps * t;
  const double ax = std::abs(x) / cs.T0;
  if (!(ax < 1.0)) {
    std::ostringstream os;
    os << "|eps t| = " << std::abs(x) << " must stay below T0 = " << cs.T0;
    throw DomainViolation(os.str());
  }
  if (!(beta_prime < cs.beta) || std::abs(z.imag()) > beta_prime) {
    throw DomainViolation("z must lie in the strip |Im z| <= beta' < beta");
  }
  // (2 pi)^{-1/2} int (1+|m|)^{-mu} e^{-(beta-beta')|m|} dm
  const double fourier_mass =
      2.0 / std::sqrt(2.0 * std::numbers::pi) * DecayProfile{1.0, cs.mu, cs.beta}.tail(0.0, beta_prime);
  AssembledCoefficients out;
  auto synth = [&](const SeriesTerm& term, double Delta, bool q_factor, int& P_used) {
    int P = 0;
    auto tail = [&](int P) {
      const double w = q_factor ? series_weight(frame, P + 1) : 1.0;
      return Delta * std::pow(ax, P + 1) * w / (1.0 - ax) * fourier_mass;
    };
    while (tail(P) > 0.5 * tol) {
      if (++P > 100000) throw CertificationFailure("coefficient series tail does not reach tolerance");
    }
    P_used = P;
    double C = 0.0;
    for (int p = 0; p <= P; ++p) C += Delta * std::pow(ax, p) * (q_factor ? series_weight(frame, p) : 1.0);
    const Symbol sym = make_symbol(
        [&term, P, x, eps](double m) {
          cplx s{0.0, 0.0}, xp{1.0, 0.0};
          for (int p = 0; p <= P; ++p, xp *= x) s += term(p, m, eps) * xp;
          return s;
        },
        {C * (1.0 + 1e-12), cs.mu, cs.beta}, "series");
    const FourierResult r = inverse_fourier(sym, z, beta_prime, 0.5 * tol);
    out.error += r.error + tail(P);
    return r.value;
  };
  for (std::size_t l = 0; l < cs.C.size(); ++l) {
    int P = 0;
    out.c.push_back(synth(cs.C[l], cs.DeltaC[l], true, P));
    out.truncation.push_back(P);
  }
  if (cs.f_direct) {
    out.f = cs.f_direct(t, z, eps);
  } else if (cs.F) {
    out.f = synth(cs.F, cs.DeltaF, false, out.f_truncation);
  } else {
    out.f = 0.0;
  }
  return out;
}

FourierCandidate dilate(const FourierCandidate& u, double q, double delta) {
  const double s = std::pow(q, delta);
  FourierCandidate out;
  out.U = [U = u.U, s](cplx t, double m, cplx e) { return U(s * t, m, e); };
  out.profile = u.profile;
  if (u.in_domain) out.in_domain = [D = u.in_domain, s](cplx t) { return D(s * t); };
  return out;
}

namespace {

cplx synthesize(const FourierCandidate& u, const Polynomial* mult, cplx t, cplx z, cplx eps,
                double beta_prime, double tol) {
  if (u.in_domain && !u.in_domain(t)) {
    std::ostringstream os;
    os << "dilated argument t = " << t << " leaves the candidate's domain";
    throw DomainViolation(os.str());
  }
  DecayProfile prof = u.profile;
  double cm = 0.0;
  if (mult) {
    for (const cplx& c : mult->coeffs()) cm += std::abs(c);
    prof.C *= std::max(cm, 1e-300);
    prof.mu -= std::max(mult->degree(), 0);
  }
  auto f = [&](double m) {
    const cplx v = u.U(t, m, eps);
    return mult ? (*mult)(cplx{0.0, m}) * v : v;
  };
  if (mult && mult->degree() < 0) return 0.0;
  return inverse_fourier(make_symbol(f, prof, "candidate"), z, beta_prime, tol).value;
}

}  // namespace

cplx evaluate_candidate(const FourierCandidate& u, cplx t, cplx z, cplx eps, double beta_prime,
                        double tol) {
  return synthesize(u, nullptr, t, z, eps, beta_prime, tol);
}

double leading_dilation(const EquationSpec& spec, int j) {
  if (j != 1 && j != 2) throw InvalidArgument("leading terms are indexed j = 1, 2");
  return (j == 1 ? spec.dD1 / spec.frame.k1() : spec.dD2 / spec.frame.k2()) + 1.0;
}

cplx apply_equation_operator(const EquationSpec& spec, const CoefficientSeries& cs,
                             const FourierCandidate& u, cplx t, cplx z, cplx eps,
                             double beta_prime, double tol) {
  const double q = spec.frame.q();
  const cplx lhs = synthesize(u, &spec.Q, q * t, z, eps, beta_prime, tol);
  cplx rhs{0.0, 0.0};
  for (int j = 1; j <= 2; ++j) {
    const int dD = j == 1 ? spec.dD1 : spec.dD2;
    const Polynomial& R = j == 1 ? spec.RD1 : spec.RD2;
    const cplx ts = std::pow(q, leading_dilation(spec, j)) * t;
    rhs += std::pow(eps * t, dD) * synthesize(u, &R, ts, z, eps, beta_prime, tol);
  }
  for (std::size_t l = 0; l < spec.terms.size(); ++l) {
    const EquationTerm& e = spec.terms[l];
    const cplx ts = std::pow(q, double(e.delta)) * t;
    const cplx ul = synthesize(u, &e.R, ts, z, eps, beta_prime, tol);
    if (ul == cplx{0.0, 0.0}) continue;
    const AssembledCoefficients c = assemble_coefficients(cs, spec.frame, ts, z, eps, beta_prime);
    rhs += std::pow(eps, e.Delta) * std::pow(t, e.d) * c.c.at(l) * ul;
  }
  if (cs.f_direct) {
    rhs += cs.f_direct(q * t, z, eps);
  } else if (cs.F) {
    rhs += assemble_coefficients(cs, spec.frame, q * t, z, eps, beta_prime).f;
  }
  return lhs - rhs;
}

}  // namespace qgevrey
