#include <gtest/gtest.h>

#include <cmath>

#include "qgevrey/errors.hpp"
#include "qgevrey/geometry.hpp"
#include "support/equation_cases.hpp"

using namespace qgevrey;
using namespace qgevrey::testing;

namespace {

const HypothesisViolation* find_clause(const HypothesisReport& r, const std::string& s) {
  for (const auto& v : r.violations) {
    if (v.clause.find(s) != std::string::npos) return &v;
  }
  return nullptr;
}

bool has_clause(const HypothesisReport& r, const std::string& s) { return find_clause(r, s) != nullptr; }

}  // namespace

TEST(Hypotheses, WorkedExampleH1ClausesPass) {
  EquationSpec s = base_equation();
  s.Q = Polynomial({2.0, 0.0, 1.0});  // X^2 + 2
  s.RD1 = s.RD2 = Polynomial::constant(1.0);
  s.terms[0].R = s.terms[1].R = Polynomial::constant(1.0);
  const HypothesisReport r = validate_hypotheses(s, default_m_grid());
  EXPECT_TRUE(r.exact);
  for (const auto& v : r.violations) EXPECT_EQ(v.clause.find("H1"), std::string::npos) << v.clause;
  // Q(im) = 2 - m^2 vanishes at m = sqrt(2), which (H2) forbids
  ASSERT_TRUE(has_clause(r, "H2: Q(im)"));
  EXPECT_NE(r.violations.back().witness.find("1.414"), std::string::npos);
}

TEST(Hypotheses, LeadingGapViolation) {
  EquationSpec s = base_equation();
  s.dD2 = 2;
  const HypothesisReport r = validate_hypotheses(s, default_m_grid());
  const HypothesisViolation* v = find_clause(r, "k1 (dD2-1) > k2 dD1");
  ASSERT_NE(v, nullptr);
  EXPECT_EQ(v->witness, "1 <= 2");
}

TEST(Hypotheses, QVanishesOnGrid) {
  EquationSpec s = base_equation();
  s.Q = Polynomial({1.0, 0.0, 1.0});
  const HypothesisReport r = validate_hypotheses(s, {0.0, 0.5, 1.0});
  ASSERT_TRUE(has_clause(r, "H2: Q(im)"));
  EXPECT_NE(r.violations.front().witness.find("grid point m = 1"), std::string::npos);
}

TEST(Hypotheses, SuiteHasNoMisclassification) {
  const auto cases = hypothesis_suite();
  ASSERT_EQ(cases.size(), 12u);
  for (const auto& c : cases) {
    const HypothesisReport r = validate_hypotheses(c.spec, hypothesis_m_grid());
    EXPECT_EQ(r.ok(), c.should_pass) << c.name;
    if (!c.should_pass) {
      EXPECT_TRUE(has_clause(r, c.clause)) << c.name;
    }
  }
}

TEST(Hypotheses, IrrationalOrdersFallBackToFloatingPoint) {
  EquationSpec s = base_equation();
  s.frame = make_qframe(2.0, 1.0, 2.0 - std::sqrt(2.0) * 1e-9, 0.4, 0.4);
  const HypothesisReport r = validate_hypotheses(s, hypothesis_m_grid());
  EXPECT_FALSE(r.exact);
  EXPECT_TRUE(r.ok());
}

class Manufacture : public ::testing::Test {
 protected:
  Manufactured mp = manufactured_problem();
  double beta_prime = 0.5;
};

TEST_F(Manufacture, ResidualVanishesOnGrid) {
  double worst = 0.0;
  for (const auto& [t, z, eps] : manufactured_grid()) {
    worst = std::max(worst, std::abs(apply_equation_operator(mp.spec, mp.cs, mp.u, t, z, eps, beta_prime)));
  }
  EXPECT_LE(worst, 1e-8);
}

TEST_F(Manufacture, ResidualScalesWithPlantedPerturbation) {
  const cplx t{0.2, 0.05}, z{0.3, -0.1}, eps{0.1, 0.1};
  auto base_f = mp.cs.f_direct;
  auto bump = [](cplx s, cplx z, cplx e) { return (1.0 + s) * std::exp(-z * z) * (1.0 + e); };
  for (double eta : {1e-6, 1e-5, 1e-4, 1e-3}) {
    CoefficientSeries cs = mp.cs;
    cs.f_direct = [=](cplx s, cplx z, cplx e) { return base_f(s, z, e) + eta * bump(s, z, e); };
    const cplx r = apply_equation_operator(mp.spec, cs, mp.u, t, z, eps, beta_prime);
    EXPECT_NEAR(std::abs(r) / eta, std::abs(bump(2.0 * t, z, eps)), 1e-8 / eta + 1e-6);
  }
}

TEST_F(Manufacture, ZeroSolutionAndForcing) {
  FourierCandidate zero{[](cplx, double, cplx) { return cplx{0.0, 0.0}; }, {1.0, 3.0, 1.0}, {}};
  CoefficientSeries none = mp.cs;
  none.f_direct = [](cplx, cplx, cplx) { return cplx{0.0, 0.0}; };
  const cplx t{0.2, 0.0}, z{0.1, 0.2}, eps{0.1, 0.0};
  EXPECT_EQ(apply_equation_operator(mp.spec, none, zero, t, z, eps, beta_prime), cplx(0.0, 0.0));
  const cplx r = apply_equation_operator(mp.spec, mp.cs, zero, t, z, eps, beta_prime);
  EXPECT_LT(std::abs(r + mp.cs.f_direct(2.0 * t, z, eps)), 1e-15);
}

TEST_F(Manufacture, LinearInCandidateAndForcing) {
  const cplx t{0.15, 0.02}, z{-0.4, 0.3}, eps{0.12, -0.03};
  FourierCandidate v{[](cplx t, double m, cplx e) { return (1.0 + e * t) * std::exp(-std::abs(m)) / std::pow(1.0 + std::abs(m), 4.0); },
                     {2.0, 4.0, 1.0}, {}};
  CoefficientSeries zero_f = mp.cs;
  zero_f.f_direct = [](cplx, cplx, cplx) { return cplx{0.0, 0.0}; };
  const cplx a{2.0, 1.0};
  FourierCandidate combo{[&](cplx t, double m, cplx e) { return mp.u.U(t, m, e) + a * v.U(t, m, e); },
                         {30.0 + 2.0 * std::abs(a), 3.0, 1.0}, {}};
  const cplx lhs = apply_equation_operator(mp.spec, zero_f, combo, t, z, eps, beta_prime);
  const cplx rhs = apply_equation_operator(mp.spec, zero_f, mp.u, t, z, eps, beta_prime) +
                   a * apply_equation_operator(mp.spec, zero_f, v, t, z, eps, beta_prime);
  EXPECT_LT(std::abs(lhs - rhs), 1e-11);
}

TEST_F(Manufacture, DilationsCompose) {
  const double q = mp.spec.frame.q();
  const FourierCandidate a = dilate(dilate(mp.u, q, 0.5), q, 1.25);
  const FourierCandidate b = dilate(mp.u, q, 1.75);
  const cplx t{0.1, 0.07}, eps{0.2, 0.0};
  for (double m : {-3.0, 0.0, 0.7, 4.0}) {
    EXPECT_LT(std::abs(a.U(t, m, eps) - b.U(t, m, eps)), 1e-15);
  }
  EXPECT_EQ(a.in_domain(t), b.in_domain(t));
  EXPECT_FALSE(dilate(mp.u, q, 5.0).in_domain(t * 2.0));
  EXPECT_THROW(evaluate_candidate(dilate(mp.u, q, 5.0), 1.0, 0.0, 0.1, 0.5), DomainViolation);
  EXPECT_NEAR(std::abs(evaluate_candidate(mp.u, t, 0.2, eps, 0.5) -
                       manufactured_a(eps * t) * gaussian_mode(0.2)),
              0.0, 1e-12);
}

TEST_F(Manufacture, LeadingDilations) {
  EXPECT_DOUBLE_EQ(leading_dilation(mp.spec, 1), 2.0);
  EXPECT_DOUBLE_EQ(leading_dilation(mp.spec, 2), 3.0);
  EXPECT_THROW(leading_dilation(mp.spec, 3), InvalidArgument);
}

TEST(Coefficients, SingleTermIsIndependentOfTAndEps) {
  CoefficientSeries cs;
  cs.T0 = 1.0;
  cs.C = {[](int p, double m, cplx) {
    return p == 0 ? cplx{std::exp(-std::abs(m)) / std::pow(1.0 + std::abs(m), 3.0), 0.0} : cplx{0.0, 0.0};
  }};
  cs.DeltaC = {1.0};
  const QFrame f = make_qframe(2.0, 1.0, 2.0, 0.4, 0.4);
  const cplx z{0.3, 0.1};
  const cplx a = assemble_coefficients(cs, f, {0.1, 0.0}, z, {0.2, 0.1}, 0.5).c[0];
  const cplx b = assemble_coefficients(cs, f, {0.3, 0.3}, z, {0.05, -0.1}, 0.5).c[0];
  EXPECT_LT(std::abs(a - b), 1e-12);
  EXPECT_LT(std::abs(a - inverse_fourier(builtin_symbol("exp_decay", 1.0, 3.0), z, 0.5).value), 1e-12);
}

TEST(Coefficients, TruncationSelfConvergence) {
  Manufactured mp = manufactured_problem();
  CoefficientSeries cs = mp.cs;
  cs.f_direct = nullptr;
  cs.F = [](int p, double m, cplx) { return cplx{std::pow(0.5, p) * std::exp(-m * m), 0.0}; };
  cs.DeltaF = 9.0;
  cs.T0 = 2.0;
  const cplx t{0.5, 0.2}, z{0.2, 0.1}, eps{0.3, 0.1};
  const auto coarse = assemble_coefficients(cs, mp.spec.frame, t, z, eps, 0.5, 1e-8);
  const auto fine = assemble_coefficients(cs, mp.spec.frame, t, z, eps, 0.5, 1e-13);
  EXPECT_GT(fine.f_truncation, coarse.f_truncation);
  EXPECT_LT(std::abs(coarse.f - fine.f), 1e-8);
  EXPECT_LT(std::abs(coarse.c[0] - fine.c[0]), 1e-8);
  // closed forms: with T0 = 2 the F series sums to e^{-m^2}/(1 - x/2), x = eps t
  const cplx x = eps * t;
  EXPECT_LT(std::abs(fine.f - gaussian_mode(z) / (1.0 - 0.5 * x)), 1e-12);
  EXPECT_LT(std::abs(fine.c[0] - manufactured_gain(0) * series_S(mp.spec.frame, x, 1.0) * gaussian_mode(z)), 1e-12);
}

TEST(Coefficients, PlantedBoundViolation) {
  Manufactured mp = manufactured_problem();
  CoefficientSeries cs = mp.cs;
  cs.F = [](int p, double m, cplx) {
    return cplx{(p == 3 ? 10.0 : 1.0) * std::exp(-std::abs(m)) / std::pow(1.0 + std::abs(m), 3.0), 0.0};
  };
  cs.DeltaF = 2.0;
  std::vector<cplx> eps{{0.0, 0.0}, {0.1, 0.1}};
  EXPECT_NO_THROW(certify_coefficients(mp.cs, mp.spec.frame, 10, default_m_grid(), eps));
  try {
    certify_coefficients(cs, mp.spec.frame, 10, default_m_grid(), eps);
    FAIL() << "planted factor not detected";
  } catch (const CertificationFailure& e) {
    EXPECT_NE(std::string(e.what()).find("F_p exceeds its bound at p = 3"), std::string::npos) << e.what();
  }
}

TEST(Coefficients, DomainErrors) {
  Manufactured mp = manufactured_problem();
  EXPECT_THROW(assemble_coefficients(mp.cs, mp.spec.frame, 2.0, 0.0, 0.6, 0.5), DomainViolation);
  EXPECT_THROW(assemble_coefficients(mp.cs, mp.spec.frame, 0.2, {0.0, 0.6}, 0.1, 0.5), DomainViolation);
  EXPECT_THROW(assemble_coefficients(mp.cs, mp.spec.frame, 0.2, 0.0, 0.1, 1.0), DomainViolation);
}
