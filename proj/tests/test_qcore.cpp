#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qgevrey/errors.hpp"
#include "qgevrey/qcore.hpp"

using namespace qgevrey;

TEST(QFrame, KappaFromReciprocals) {
  const QFrame f = make_qframe(2.0, 1.0, 2.0, 0.5, 0.5);
  EXPECT_DOUBLE_EQ(f.kappa(), 2.0);
  EXPECT_DOUBLE_EQ(f.log_q(), std::log(2.0));
  EXPECT_EQ(f.k(Level::one), 1.0);
  EXPECT_EQ(f.k(Level::two), 2.0);
}

TEST(QFrame, ConvolutionIdentity) {
  const QFrame f = make_qframe(3.0, 2.0, 6.0, 0.3, 0.2);
  EXPECT_NEAR(f.kappa(), 3.0, 1e-15);
  // -6 + 36/(3+6) = -2
  EXPECT_NEAR(-f.k2() + f.k2() * f.k2() / (f.kappa() + f.k2()), -f.k1(), 8 * 2e-16 * 2);
}

TEST(QFrame, IdentitiesOnRandomFrames) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> k1d(1.0, 5.0), gap(0.01, 5.0), qd(1.01, 10.0);
  for (int i = 0; i < 500; ++i) {
    const double k1 = k1d(rng), k2 = k1 + gap(rng);
    const QFrame f = make_qframe(qd(rng), k1, k2, 0.5, 0.5);
    EXPECT_GT(f.kappa(), f.k1());
    EXPECT_NEAR(1.0 / f.kappa(), 1.0 / k1 - 1.0 / k2, 8 * 1.1e-16 / k1);
    EXPECT_NEAR(-k2 + k2 * k2 / (f.kappa() + k2), -k1, 8 * 2.2e-16 * k2 * k2 / k1);
  }
}

TEST(QFrame, RejectsInvalid) {
  EXPECT_THROW(make_qframe(2.0, 1.0, 1.0, 0.5, 0.5), InvalidArgument);
  EXPECT_THROW(make_qframe(2.0, 2.0, 1.0, 0.5, 0.5), InvalidArgument);
  EXPECT_THROW(make_qframe(1.0, 1.0, 2.0, 0.5, 0.5), InvalidArgument);
  EXPECT_THROW(make_qframe(2.0, 0.5, 2.0, 0.5, 0.5), InvalidArgument);
  EXPECT_THROW(make_qframe(2.0, 1.0, 2.0, 1.0, 0.5), InvalidArgument);
  EXPECT_THROW(make_qframe(2.0, 1.0, 2.0, 0.5, 0.0), InvalidArgument);
}

TEST(GevreyScale, RadiiMonotoneAndOrdered) {
  const QFrame f = make_qframe(2.0, 1.0, 2.0, 0.5, 0.5);
  const GevreyScale one = make_scale(f, Level::one), two = make_scale(f, Level::two);
  for (int p = 0; p < 1000; ++p) {
    EXPECT_LT(one.radius(p + 1), one.radius(p));
    EXPECT_LT(two.radius(p + 1), two.radius(p));
    EXPECT_LE(one.radius(p), two.radius(p));
  }
  EXPECT_DOUBLE_EQ(one.radius(2), 0.5);
  EXPECT_DOUBLE_EQ(two.radius(4), 0.5);
}

TEST(SeqBound, TrivialCase) {
  EXPECT_DOUBLE_EQ(seq_bound_from_log_bound(2.0, 1.0, 0.0, 0), 1.0);
  EXPECT_LE(log_gaussian_envelope(2.0, 1.0, 0.0, 0, 0.3), 1.0);
}

TEST(SeqBound, WorkedValue) {
  // 2^{1/4} 2^{-3/2} 2^{9/4} = 2
  EXPECT_NEAR(seq_bound_from_log_bound(2.0, 2.0, 1.0, 3), 2.0, 1e-14);
  EXPECT_LE(log_gaussian_envelope(2.0, 2.0, 1.0, 3, 0.1), 2.0);
}

TEST(SeqBound, DominatesEnvelopeOnRandomGrid) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> kd(0.5, 4.0), gd(-5.0, 5.0), ld(std::log(1e-4), 0.0),
      qd(1.05, 5.0);
  std::uniform_int_distribution<int> nd(0, 20);
  int violations = 0;
  for (int i = 0; i < 20000; ++i) {
    const double q = qd(rng), k = kd(rng), g = gd(rng), t = std::exp(ld(rng));
    const int N = nd(rng);
    const double lhs = std::log(log_gaussian_envelope(q, k, g, N, t));
    const double rhs = std::log(seq_bound_from_log_bound(q, k, g, N));
    if (lhs > rhs + 1e-12 * std::max(1.0, std::abs(rhs))) ++violations;
  }
  EXPECT_EQ(violations, 0);
}

TEST(SeqBound, EqualityAtTangentPoint) {
  const double q = 2.0, k = 1.5, g = 2.5;
  const int N = 4;
  const double t = std::exp(std::log(q) * (g - N) / k);
  EXPECT_NEAR(log_gaussian_envelope(q, k, g, N, t) / seq_bound_from_log_bound(q, k, g, N), 1.0,
              1e-13);
}

TEST(SeqBound, RejectsBadArguments) {
  EXPECT_THROW(seq_bound_from_log_bound(2.0, 0.0, 1.0, 1), InvalidArgument);
  EXPECT_THROW(seq_bound_from_log_bound(2.0, 1.0, 1.0, -1), InvalidArgument);
  EXPECT_THROW(log_gaussian_envelope(2.0, 1.0, 1.0, 1, 0.0), InvalidArgument);
}

double H(double m1, double m2, double x) {
  const double lx = std::log(x);
  return std::exp(m1 * lx - m2 * lx * lx);
}

TEST(LogGaussianMax, ClosedForms) {
  auto s = log_gaussian_max(0.0, 1.0);
  EXPECT_DOUBLE_EQ(s.x0, 1.0);
  EXPECT_DOUBLE_EQ(s.h_max, 1.0);
  s = log_gaussian_max(2.0, 1.0);
  EXPECT_NEAR(s.x0, std::exp(1.0), 1e-15);
  EXPECT_NEAR(s.h_max, std::exp(1.0), 1e-15);
  s = log_gaussian_max(-3.0, 0.5);
  EXPECT_NEAR(s.x0, std::exp(-3.0), 1e-16);
  EXPECT_NEAR(s.h_max, std::exp(4.5), 1e-12);
}

TEST(LogGaussianMax, GridMaximumAgrees) {
  for (auto [m1, m2] : {std::pair{-3.0, 0.5}, {2.0, 1.0}, {0.7, 3.0}, {5.0, 0.2}}) {
    const auto s = log_gaussian_max(m1, m2);
    double best = 0.0;
    for (int i = -40000; i <= 40000; ++i) best = std::max(best, H(m1, m2, std::exp(i * 1e-3)));
    EXPECT_LE(best, s.h_max * (1 + 1e-12));
    EXPECT_NEAR(best / s.h_max, 1.0, 1e-5);
    EXPECT_LE(H(m1, m2, s.x0 * (1 + 1e-3)), s.h_max);
    EXPECT_LE(H(m1, m2, s.x0 * (1 - 1e-3)), s.h_max);
  }
}

TEST(LogGaussianMax, RejectsNonConcave) {
  EXPECT_THROW(log_gaussian_max(1.0, 0.0), InvalidArgument);
  EXPECT_THROW(log_gaussian_max(1.0, -1.0), InvalidArgument);
}
