#pragma once

// The singularly perturbed q-difference equation
//
//   Q(dz) s u = sum_j (eps t)^{dDj} s^{dDj/kj + 1} R_Dj(dz) u
//             + sum_l eps^{Delta_l} t^{d_l} s^{delta_l}(c_l R_l(dz) u) + s f,
//
// with s = sigma_{q,t} the dilation t -> q t, its structural hypotheses
// (H1)/(H2), the coefficient series c_l, f and a residual operator for
// candidate solutions given on the Fourier side.

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qgevrey/polynomial.hpp"
#include "qgevrey/qcore.hpp"
#include "qgevrey/special.hpp"

namespace qgevrey {

struct EquationTerm {
  int Delta = 0;  // power of eps
  int d = 1;      // power of t
  int delta = 1;  // dilation exponent
  Polynomial R;
};

struct EquationSpec {
  QFrame frame = make_qframe(2.0, 1.0, 2.0, 0.4, 0.4);
  int D = 3;
  int dD1 = 1;
  int dD2 = 1;
  std::vector<EquationTerm> terms;  // l = 1 .. D-1
  Polynomial Q;
  Polynomial RD1;
  Polynomial RD2;
  double mu = 3.0;
  double beta = 1.0;
};

struct HypothesisViolation {
  std::string clause;
  std::string witness;
};

struct HypothesisReport {
  std::vector<HypothesisViolation> violations;
  bool exact = true;  // false when k1, k2 have no small rational form
  bool ok() const { return violations.empty(); }
};

/// Checks the index conditions, every (H1) inequality (in exact rational
/// arithmetic when k1, k2 are rationals with denominator <= 10^6) and (H2):
/// Q(im), R_Dj(im) != 0 on the m-grid and for every real m via the roots,
/// the degree chain and mu > deg R_Dj + 1.
HypothesisReport validate_hypotheses(const EquationSpec& spec, const std::vector<double>& m_grid);

using SeriesTerm = std::function<cplx(int p, double m, cplx eps)>;

/// Coefficients C_{l,p}(m, eps) and F_p(m, eps) of c_l and f, with the
/// constants of their bounds
///   |C_{l,p}| <= Delta_C,l T0^{-p} q^{-p^2 kappa/(2 k1 k2)} (1+|m|)^{-mu} e^{-beta|m|},
///   |F_p|     <= Delta_F T0^{-p} (1+|m|)^{-mu} e^{-beta|m|}.
/// f_direct, when set, replaces the synthesis of f from F_p (used for
/// manufactured right-hand sides given in closed form).
struct CoefficientSeries {
  std::vector<SeriesTerm> C;
  std::vector<double> DeltaC;
  SeriesTerm F;
  double DeltaF = 1.0;
  double T0 = 1.0;
  double mu = 3.0;
  double beta = 1.0;
  std::function<cplx(cplx t, cplx z, cplx eps)> f_direct;
};

/// Checks both bounds on an (l, p, m, eps) grid; throws CertificationFailure
/// naming the first violation.
void certify_coefficients(const CoefficientSeries& cs, const QFrame& frame, int p_max,
                          const std::vector<double>& m_grid, const std::vector<cplx>& eps_grid);

struct AssembledCoefficients {
  std::vector<cplx> c;
  cplx f;
  std::vector<int> truncation;  // P used for each c_l
  int f_truncation = 0;
  double error = 0.0;           // tail bounds plus Fourier errors
};

/// c_l(t, z, eps) and f(t, z, eps). The p-series is cut at the smallest P
/// whose certified tail is below tol. Throws DomainViolation when
/// |eps t| >= T0 or |Im z| > beta_prime.
AssembledCoefficients assemble_coefficients(const CoefficientSeries& cs, const QFrame& frame,
                                            cplx t, cplx z, cplx eps, double beta_prime,
                                            double tol = 1e-12);

/// Candidate u(t, z, eps) = F^{-1}(m -> U(t, m, eps))(z). The profile bounds
/// |U| uniformly on the t-domain; in_domain rejects dilated arguments that
/// leave it.
struct FourierCandidate {
  std::function<cplx(cplx t, double m, cplx eps)> U;
  DecayProfile profile;
  std::function<bool(cplx t)> in_domain;
};

/// u(q^delta t, ., eps): sigma_{q,t}^delta on the kernel.
FourierCandidate dilate(const FourierCandidate& u, double q, double delta);

/// u(t, z, eps) by inverse Fourier transform.
cplx evaluate_candidate(const FourierCandidate& u, cplx t, cplx z, cplx eps, double beta_prime,
                        double tol = 1e-13);

/// LHS - RHS of the equation at (t, z, eps), with Q(dz), R(dz) applied as the
/// multipliers Q(im), R(im) before synthesis.
cplx apply_equation_operator(const EquationSpec& spec, const CoefficientSeries& cs,
                             const FourierCandidate& u, cplx t, cplx z, cplx eps,
                             double beta_prime, double tol = 1e-13);

/// Exponent d_Dj / k_j + 1 of the leading dilations.
double leading_dilation(const EquationSpec& spec, int j);

}  // namespace qgevrey
