#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qgevrey/errors.hpp"
#include "qgevrey/qlaplace.hpp"

using namespace qgevrey;
using std::numbers::pi;

namespace {

// Jacobi triple product, independent of the library's theta summation.
cplx theta_product(double q, double k, cplx z) {
  const double x = std::pow(q, -1.0 / k);
  cplx prod{1.0, 0.0};
  double xn = x;
  for (int n = 1; n < 4000 && xn > 1e-300; ++n) {
    prod *= (1.0 - xn) * (1.0 + (xn / x) * z) * (1.0 + xn / z);
    xn *= x;
  }
  return prod;
}

// (k / log q) int_R e^{ns} / Theta(e^s) ds by the trapezoid rule, which is
// spectrally accurate for this smooth, doubly decaying integrand.
double monomial_oracle(double q, double k, int n) {
  const double h = 0.01;
  double s = 0.0;
  for (int i = -4000; i <= 4000; ++i) {
    const double x = i * h;
    const cplx th = theta_product(q, k, std::exp(x));
    if (std::abs(th) > 1e250) continue;
    s += (std::exp(n * x) / th).real();
  }
  return k / std::log(q) * h * s;
}

const GrowthCertificate kBounded{1.0, 0.0, 1.0, 1.0};

}  // namespace

TEST(QLaplace, ConstantIsMappedToConstant) {
  const QLaplaceSpec spec = make_qlaplace_spec(2.0, 1.0, 0.3, 0.3);
  auto one = [](cplx) { return cplx{1.0, 0.0}; };
  const cplx a = qlaplace(spec, one, kBounded, std::polar(0.2, 0.3)).value;
  const cplx b = qlaplace(spec, one, kBounded, std::polar(1.1, 0.3)).value;
  EXPECT_LT(std::abs(a - b), 1e-10);
  QLaplaceSpec fine = spec;
  fine.tol = 1e-14;
  const QLaplaceResult c = qlaplace(fine, one, kBounded, std::polar(0.2, 0.3));
  EXPECT_LT(std::abs(a - c.value), 1e-8);
  EXPECT_NEAR(a.real(), monomial_oracle(2.0, 1.0, 0), 1e-10);
}

TEST(QLaplace, PowerLawCovariance) {
  const double q = 2.0, k = 2.0, d = -0.4;
  const QLaplaceSpec spec = make_qlaplace_spec(q, k, d, 0.3, 1e-14);
  for (int n = 0; n <= 5; ++n) {
    const GrowthCertificate cert{1.0, double(n), k, 1.0};
    const double r1 = domain_radius(cert, q, k);
    const cplx T = std::polar(0.9 * r1, d), Tp = std::polar(0.3 * r1, d);
    auto f = [n](cplx u) { return std::pow(u, n); };
    const cplx a = qlaplace(spec, f, cert, T).value;
    const cplx b = qlaplace(spec, f, cert, Tp).value;
    EXPECT_LT(std::abs(a / b - std::pow(T / Tp, n)) / std::pow(3.0, n), 1e-8) << n;
  }
}

TEST(QLaplace, MonomialConstantsFollowQShift) {
  for (auto [q, k] : {std::pair{2.0, 1.0}, {1.5, 2.0}, {3.0, 0.5}}) {
    double prev = monomial_constant(q, k, 0);
    EXPECT_NEAR(prev, monomial_oracle(q, k, 0), 1e-9 * prev);
    for (int n = 1; n <= 5; ++n) {
      const double c = monomial_constant(q, k, n);
      EXPECT_NEAR(c / prev, std::pow(q, (n - 1.0) / k), 1e-9 * c / prev) << q << " " << k << " " << n;
      EXPECT_NEAR(c, monomial_oracle(q, k, n), 1e-8 * c);
      prev = c;
    }
  }
}

TEST(QLaplace, Linearity) {
  const QLaplaceSpec spec = make_qlaplace_spec(2.0, 2.0, 0.0, 0.3);
  auto f = [](cplx u) { return 1.0 / (1.0 + u * u); };
  auto g = [](cplx u) { return std::exp(-u); };
  const cplx a{2.0, -1.0}, b{0.5, 0.25};
  const GrowthCertificate cert{3.0, 0.0, 2.0, 1.0};
  const cplx T = std::polar(0.7, 0.1);
  const cplx lhs = qlaplace(spec, [&](cplx u) { return a * f(u) + b * g(u); }, cert, T).value;
  const cplx rhs = a * qlaplace(spec, f, cert, T).value + b * qlaplace(spec, g, cert, T).value;
  EXPECT_LT(std::abs(lhs - rhs), 1e-11);
}

TEST(QLaplace, HalvingToleranceStaysWithinEstimate) {
  QLaplaceSpec spec = make_qlaplace_spec(2.0, 1.0, 0.5, 0.3, 1e-8);
  auto f = [](cplx u) { return u / (u - cplx{0.0, 2.0}); };
  const GrowthCertificate cert{2.0, 0.0, 1.0, 1.0};
  const cplx T = std::polar(0.5, 0.4);
  const QLaplaceResult coarse = qlaplace(spec, f, cert, T);
  spec.tol *= 0.5;
  const QLaplaceResult fine = qlaplace(spec, f, cert, T);
  EXPECT_LE(std::abs(coarse.value - fine.value), coarse.error);
  EXPECT_GT(coarse.nodes_used, 0);
  EXPECT_LT(coarse.s_lo, std::log(0.5));
  EXPECT_GT(coarse.s_hi, 0.0);
}

TEST(QLaplace, ViolatedCertificateIsReported) {
  const QLaplaceSpec spec = make_qlaplace_spec(2.0, 1.0, 0.0, 0.3);
  // e^{u} on the positive axis outgrows every exp(log^2) certificate
  auto f = [](cplx u) { return std::exp(u); };
  EXPECT_THROW(qlaplace(spec, f, {10.0, 0.0, 1.0, 1.0}, 0.3), CertificationFailure);
}

TEST(QLaplace, DomainErrors) {
  const QLaplaceSpec spec = make_qlaplace_spec(2.0, 1.0, 0.0, 0.3);
  auto one = [](cplx) { return cplx{1.0, 0.0}; };
  const GrowthCertificate cert{1.0, 0.5, 1.0, 1.0};  // |T| < 1 required
  EXPECT_THROW(qlaplace(spec, one, cert, 1.0), DomainViolation);
  EXPECT_THROW(qlaplace(spec, one, cert, 0.0), DomainViolation);
  EXPECT_THROW(qlaplace(spec, one, cert, std::polar(0.5, pi)), DomainViolation);
  EXPECT_THROW(qlaplace(spec, one, {1.0, 0.0, 2.0, 1.0}, 0.5), InvalidArgument);
  EXPECT_NO_THROW(qlaplace(spec, one, cert, 0.9 * 2.0 * domain_radius(cert, 2.0, 1.0)));
}

TEST(QLaplace, SmallPerturbationReroutesTheRay) {
  const QLaplaceSpec spec = make_qlaplace_spec(2.0, 1.0, 0.0, 0.05);
  auto one = [](cplx) { return cplx{1.0, 0.0}; };
  // d - arg T = pi - 0.1 + 5e-4: |sin| just below the 0.1 node floor
  const cplx T = std::polar(0.5, -(pi - std::asin(0.1) + 5e-4));
  const QLaplaceResult r = qlaplace(spec, one, kBounded, T);
  EXPECT_TRUE(r.rerouted);
  EXPECT_NEAR(std::abs(r.direction_used), 1e-3, 1e-15);
  EXPECT_NEAR(r.value.real(), monomial_oracle(2.0, 1.0, 0), 1e-9);
}

TEST(DomainRadius, Examples) {
  EXPECT_DOUBLE_EQ(domain_radius({1.0, 0.5, 1.0, 1.0}, 2.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(domain_radius({1.0, 0.5, 3.0, 1.0}, 5.0, 3.0), 0.5);
  EXPECT_DOUBLE_EQ(domain_radius({1.0, 0.0, 1.0, 1.0}, 4.0, 1.0), 1.0);
  double prev = 1e300;
  for (double a = 0.0; a < 20.0; a += 0.5) {
    const double r = domain_radius({1.0, a, 1.0, 1.0}, 2.0, 1.0);
    EXPECT_LT(r, prev);
    prev = r;
  }
  EXPECT_LT(prev, 1e-5);
}

class Link : public ::testing::Test {
 protected:
  // level-kappa kernel with a pole at u* = 0.6 e^{i 2.2}, off the ray d = 0.5
  static cplx w1(cplx u, double m, cplx eps) {
    const cplx star = std::polar(0.6, 2.2) * (1.0 + 0.1 * eps);
    return std::exp(-std::abs(m)) * u / (u - star);
  }
  static inline const GrowthCertificate cert{8.0, 0.0, 2.0, 1.0};
  QLaplaceSpec spec = make_qlaplace_spec(2.0, 2.0, 0.5, 0.3, 1e-11);
  std::vector<LinkProbe> probes{{std::polar(0.3, 0.5), 0.0, {0.1, 0.0}},
                                {std::polar(0.5, 0.6), 1.5, {0.05, 0.05}},
                                {std::polar(0.2, 0.45), -2.0, {0.0, 0.2}}};
};

TEST_F(Link, DefinitionalPairAgrees) {
  QLaplaceSpec fine = spec;
  fine.tol = 1e-15;
  auto w2 = [&](cplx tau, double m, cplx eps) {
    return qlaplace(fine, [&](cplx u) { return w1(u, m, eps); }, cert, tau).value;
  };
  const LinkReport rep = verify_laplace_link(w1, cert, w2, spec, probes);
  ASSERT_EQ(rep.discrepancy.size(), 3u);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    EXPECT_LE(rep.discrepancy[i] * std::abs(w2(probes[i].tau, probes[i].m, probes[i].eps)),
              2 * spec.tol);
  }
}

TEST_F(Link, PlantedScaleDefect) {
  QLaplaceSpec fine = spec;
  fine.tol = 1e-15;
  auto w2 = [&](cplx tau, double m, cplx eps) {
    return 1.01 * qlaplace(fine, [&](cplx u) { return w1(u, m, eps); }, cert, tau).value;
  };
  const LinkReport rep = verify_laplace_link(w1, cert, w2, spec, probes);
  EXPECT_NEAR(rep.max_discrepancy, 0.01 / 1.01, 1e-8);
}
