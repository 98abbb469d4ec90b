#include "qgevrey/qcore.hpp"

#include <cmath>

#include "qgevrey/errors.hpp"

namespace qgevrey {

std::string to_string(Level level) { return level == Level::one ? "one" : "two"; }

QFrame make_qframe(double q, double k1, double k2, double epsilon0, double rT) {
  if (!(q > 1.0)) throw InvalidArgument("q must exceed 1");
  if (!(k1 >= 1.0)) throw InvalidArgument("k1 must be at least 1");
  if (!(k2 > k1)) throw InvalidArgument("k2 must exceed k1 (1/kappa would vanish)");
  if (!(epsilon0 > 0.0 && epsilon0 < 1.0)) throw InvalidArgument("epsilon0 must lie in (0,1)");
  if (!(rT > 0.0 && rT < 1.0)) throw InvalidArgument("rT must lie in (0,1)");
  QFrame f;
  f.q_ = q;
  f.k1_ = k1;
  f.k2_ = k2;
  f.kappa_ = k1 * k2 / (k2 - k1);
  f.epsilon0_ = epsilon0;
  f.rT_ = rT;
  f.log_q_ = std::log(q);
  return f;
}

double GevreyScale::radius(int p) const { return std::pow(q, -p / (2.0 * k)); }

GevreyScale make_scale(const QFrame& frame, Level level) {
  GevreyScale s;
  s.level = level;
  s.q = frame.q();
  s.k = frame.k(level);
  return s;
}

double seq_bound_from_log_bound(double q, double k, double gamma, int N) {
  if (!(k > 0.0)) throw InvalidArgument("k must be positive");
  if (N < 0) throw InvalidArgument("N must be non-negative");
  const double L = std::log(q);
  // Exponent assembled in log space; the three factors can individually overflow.
  const double log_rhs = L * (gamma * gamma / (2.0 * k) - gamma * N / k + double(N) * N / (2.0 * k));
  return std::exp(log_rhs);
}

double log_gaussian_envelope(double q, double k, double gamma, int N, double abs_t) {
  if (!(abs_t > 0.0)) throw InvalidArgument("|T| must be positive");
  const double lt = std::log(abs_t);
  return std::exp((gamma - N) * lt - 0.5 * k * lt * lt / std::log(q));
}

LogGaussianMax log_gaussian_max(double m1, double m2) {
  if (!(m2 > 0.0)) throw InvalidArgument("log-Gaussian profile needs m2 > 0");
  return {std::exp(m1 / (2.0 * m2)), std::exp(m1 * m1 / (4.0 * m2))};
}

}  // namespace qgevrey
