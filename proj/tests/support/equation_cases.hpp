#pragma once

// Shared fixtures for the equation tests and the acceptance run: a pass/fail
// suite for (H1)/(H2) and a manufactured solution of the equation.

#include <cmath>
#include <array>
#include <numbers>
#include <string>
#include <vector>

#include "qgevrey/equation.hpp"

namespace qgevrey::testing {

struct HypothesisCase {
  std::string name;
  EquationSpec spec;
  bool should_pass;
  std::string clause;  // substring of the expected violated clause
};

inline EquationSpec base_equation() {
  EquationSpec s;
  s.frame = make_qframe(2.0, 1.0, 2.0, 0.4, 0.4);
  s.D = 3;
  s.dD1 = 1;
  s.dD2 = 4;
  s.Q = Polynomial({-2.0, 0.0, 1.0});  // Q(im) = -(m^2 + 2)
  s.RD1 = Polynomial({3.0, 1.0});
  s.RD2 = Polynomial({-1.0, 2.0});
  s.terms = {{1, 1, 1, Polynomial::constant(1.0)}, {2, 2, 2, Polynomial({1.0, 1.0})}};
  s.mu = 3.0;
  s.beta = 1.0;
  return s;
}

inline std::vector<HypothesisCase> hypothesis_suite() {
  std::vector<HypothesisCase> cases;
  cases.push_back({"base", base_equation(), true, ""});
  {
    EquationSpec s = base_equation();
    s.D = 4;
    s.dD2 = 5;
    s.terms.push_back({4, 4, 3, Polynomial::constant(0.5)});
    cases.push_back({"four terms", s, true, ""});
  }
  {
    EquationSpec s = base_equation();
    s.frame = make_qframe(2.0, 1.5, 3.0, 0.4, 0.4);
    s.terms[1].d = 3;
    s.terms[1].Delta = 3;
    cases.push_back({"rational orders 3/2, 3", s, true, ""});
  }
  {
    EquationSpec s = base_equation();
    s.dD1 = 2;
    s.dD2 = 6;
    cases.push_back({"dD1 = 2", s, true, ""});
  }
  {
    EquationSpec s = base_equation();
    s.dD2 = 2;
    cases.push_back({"leading gap", s, false, "k1 (dD2-1) > k2 dD1"});
  }
  {
    EquationSpec s = base_equation();
    s.Q = Polynomial({1.0, 0.0, 1.0});
    cases.push_back({"Q(i) = 0", s, false, "H2: Q(im)"});
  }
  {
    EquationSpec s = base_equation();
    s.terms[0].Delta = 0;
    cases.push_back({"Delta below d", s, false, "Delta_l >= d_l"});
  }
  {
    EquationSpec s = base_equation();
    s.terms[1].delta = 1;
    cases.push_back({"delta not increasing", s, false, "delta_l < delta_{l+1}"});
  }
  {
    EquationSpec s = base_equation();
    s.mu = 2.0;
    cases.push_back({"mu too small", s, false, "mu > deg R_Dj + 1"});
  }
  {
    EquationSpec s = base_equation();
    s.RD2 = Polynomial({1.0, 3.0, 1.0});
    cases.push_back({"degree chain", s, false, "deg Q >= deg R_D1 = deg R_D2"});
  }
  {
    EquationSpec s = base_equation();
    s.frame = make_qframe(2.0, 4.0, 8.0, 0.4, 0.4);
    s.dD2 = 9;
    cases.push_back({"high order k1", s, false, "d_l/k1 + 1 >= delta_l"});
  }
  {
    EquationSpec s = base_equation();
    s.RD1 = Polynomial({{0.0, -2.0}, {1.0, 0.0}});  // R_D1(im) = i(m - 2), off the grid
    cases.push_back({"R_D1 root at m = 2", s, false, "H2: R_D1(im)"});
  }
  return cases;
}

/// m-grid avoiding m = 2 so that the root-based (H2) check is exercised.
inline std::vector<double> hypothesis_m_grid() {
  std::vector<double> g;
  for (int i = -50; i <= 50; ++i) g.push_back(0.37 * i + 0.011);
  return g;
}

// --- manufactured solution -------------------------------------------------
//
// U(t, m, eps) = a(t eps) e^{-m^2}, so u = a(t eps) e^{-z^2/4}/sqrt(2) and
// P(dz) u = a(t eps) sum_j p_j H_j(z) e^{-z^2/4}/sqrt(2), H_0 = 1,
// H_{j+1} = H_j' - (z/2) H_j. C_{l,p} = g_l T0^{-p} q^{-p^2 kappa/(2 k1 k2)} e^{-m^2}.

inline cplx manufactured_a(cplx x) { return 1.0 / (1.0 - x); }

inline cplx hermite_like(int j, cplx z) {
  // coefficients of H_j as a polynomial in z
  std::vector<cplx> h{1.0};
  for (int n = 0; n < j; ++n) {
    std::vector<cplx> next(h.size() + 1, 0.0);
    for (std::size_t i = 1; i < h.size(); ++i) next[i - 1] += double(i) * h[i];
    for (std::size_t i = 0; i < h.size(); ++i) next[i + 1] -= 0.5 * h[i];
    h = next;
  }
  cplx v{0.0, 0.0};
  for (auto it = h.rbegin(); it != h.rend(); ++it) v = v * z + *it;
  return v;
}

inline cplx gaussian_mode(cplx z) { return std::exp(-z * z / 4.0) / std::sqrt(2.0); }

inline cplx apply_poly_to_mode(const Polynomial& P, cplx z) {
  cplx s{0.0, 0.0};
  for (std::size_t j = 0; j < P.coeffs().size(); ++j) s += P.coeffs()[j] * hermite_like(int(j), z);
  return s * gaussian_mode(z);
}

inline double manufactured_gain(std::size_t l) { return 0.5 / double(l + 1); }

inline cplx series_S(const QFrame& f, cplx x, double T0) {
  cplx s{0.0, 0.0}, xp{1.0, 0.0};
  for (int p = 0; p < 400; ++p, xp *= x / T0) {
    s += xp * std::exp(-double(p) * p * f.kappa() * f.log_q() / (2.0 * f.k1() * f.k2()));
  }
  return s;
}

struct Manufactured {
  EquationSpec spec;
  CoefficientSeries cs;
  FourierCandidate u;
};

inline Manufactured manufactured_problem() {
  Manufactured mp;
  mp.spec = base_equation();
  const EquationSpec spec = mp.spec;
  const QFrame fr = spec.frame;
  CoefficientSeries& cs = mp.cs;
  cs.T0 = 1.0;
  cs.mu = spec.mu;
  cs.beta = spec.beta;
  for (std::size_t l = 0; l < spec.terms.size(); ++l) {
    const double g = manufactured_gain(l);
    cs.C.push_back([g, fr, T0 = cs.T0](int p, double m, cplx) {
      return cplx{g * std::pow(T0, -p) *
                      std::exp(-double(p) * p * fr.kappa() * fr.log_q() / (2.0 * fr.k1() * fr.k2())) *
                      std::exp(-m * m),
                  0.0};
    });
    cs.DeltaC.push_back(9.0 * g);  // e^{-m^2} <= 9 (1+|m|)^{-3} e^{-|m|}
  }
  mp.u.U = [](cplx t, double m, cplx eps) { return manufactured_a(eps * t) * std::exp(-m * m); };
  mp.u.profile = {30.0, 3.0, 1.0};
  mp.u.in_domain = [](cplx t) { return std::abs(t) < 4.0; };
  // f is defined so that the equation holds identically; the right side is
  // evaluated at q t, hence the t = s/q below.
  cs.f_direct = [spec, fr, T0 = cs.T0](cplx s, cplx z, cplx eps) {
    const double q = fr.q();
    const cplx t = s / q;
    const cplx lhs = manufactured_a(eps * q * t) * apply_poly_to_mode(spec.Q, z);
    cplx rhs{0.0, 0.0};
    for (int j = 1; j <= 2; ++j) {
      const int dD = j == 1 ? spec.dD1 : spec.dD2;
      const double k = j == 1 ? fr.k1() : fr.k2();
      const Polynomial& R = j == 1 ? spec.RD1 : spec.RD2;
      const cplx tj = std::pow(q, dD / k + 1.0) * t;
      rhs += std::pow(eps * t, dD) * manufactured_a(eps * tj) * apply_poly_to_mode(R, z);
    }
    for (std::size_t l = 0; l < spec.terms.size(); ++l) {
      const EquationTerm& e = spec.terms[l];
      const cplx tl = std::pow(q, double(e.delta)) * t;
      const cplx c = manufactured_gain(l) * series_S(fr, eps * tl, T0) * gaussian_mode(z);
      rhs += std::pow(eps, e.Delta) * std::pow(t, e.d) * c * manufactured_a(eps * tl) *
             apply_poly_to_mode(e.R, z);
    }
    return lhs - rhs;
  };
  return mp;
}

inline std::vector<std::array<cplx, 3>> manufactured_grid() {
  std::vector<std::array<cplx, 3>> g;
  for (int i = 0; i < 5; ++i) {
    const cplx t = std::polar(0.1 + 0.05 * i, 0.1 * i - 0.2);
    for (int j = 0; j < 5; ++j) {
      const cplx z{-1.0 + 0.5 * j, 0.4 - 0.2 * j};
      for (int k = 0; k < 5; ++k) {
        const cplx eps = std::polar(0.05 + 0.05 * k, 0.3 * k);
        g.push_back({t, z, eps});
      }
    }
  }
  return g;
}

}  // namespace qgevrey::testing
