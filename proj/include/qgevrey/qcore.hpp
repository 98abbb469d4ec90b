#pragma once

// Global q-parameters and the scalar inequalities every estimate leans on.
// All logarithms in this library are natural logarithms; "L" below is log(q).

#include <string>
#include <utility>

namespace qgevrey {

enum class Level { one, two };

std::string to_string(Level level);

/// Immutable parameter frame (q, k1, k2, epsilon0, rT). kappa is derived from
/// 1/kappa = 1/k1 - 1/k2 and is never accepted from outside.
class QFrame {
 public:
  double q() const { return q_; }
  double k1() const { return k1_; }
  double k2() const { return k2_; }
  double kappa() const { return kappa_; }
  double epsilon0() const { return epsilon0_; }
  double rT() const { return rT_; }
  double log_q() const { return log_q_; }

  double k(Level level) const { return level == Level::one ? k1_ : k2_; }

  friend QFrame make_qframe(double q, double k1, double k2, double epsilon0, double rT);

 private:
  QFrame() = default;
  double q_ = 0, k1_ = 0, k2_ = 0, kappa_ = 0, epsilon0_ = 0, rT_ = 0, log_q_ = 0;
};

/// Throws InvalidArgument unless q > 1, 1 <= k1 < k2, 0 < epsilon0 < 1, 0 < rT < 1.
QFrame make_qframe(double q, double k1, double k2, double epsilon0, double rT);

/// Radius sequence r_p = q^{-p/(2k)} attached to a level, plus the (C, A)
/// constants of whatever expansion is certified relative to it.
struct GevreyScale {
  Level level = Level::one;
  double q = 2.0;
  double k = 1.0;
  double C = 1.0;
  double A = 1.0;

  double radius(int p) const;
};

GevreyScale make_scale(const QFrame& frame, Level level);

/// Right-hand side q^{g^2/(2k)} (q^{-g/k})^N q^{N^2/(2k)} of the log-Gaussian to
/// sequential bound conversion. It dominates log_gaussian_envelope(q,k,g,N,|T|)
/// for every |T| > 0; equality holds at log|T| = log(q)(g - N)/k.
double seq_bound_from_log_bound(double q, double k, double gamma, int N);

/// |T|^{-N} |T|^{g} exp(-(k/2) log^2|T| / log q).
double log_gaussian_envelope(double q, double k, double gamma, int N, double abs_t);

struct LogGaussianMax {
  double x0;
  double h_max;
};

/// Maximiser of H(x) = x^{m1} exp(-m2 log^2 x) over x > 0. Requires m2 > 0.
LogGaussianMax log_gaussian_max(double m1, double m2);

}  // namespace qgevrey
