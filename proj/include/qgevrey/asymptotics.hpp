#pragma once

// Remainder tables, and fitters that turn them into certified Gevrey-type
// envelopes. Fits are certification-oriented: after least squares the
// constant C is inflated until the envelope holds on every row.

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "qgevrey/qcore.hpp"
#include "qgevrey/quadrature.hpp"

namespace qgevrey {

inline constexpr double kRemainderFloor = 1e-300;

struct RemainderRow {
  int N = 0;
  cplx eps{0.0, 0.0};
  std::optional<cplx> t;
  double norm = 0.0;
};

struct RemainderTable {
  std::vector<RemainderRow> rows;

  int n_max() const;
  void write_csv(std::ostream& os) const;
};

/// 33-point default realization of the sup norm on the strip |Im z| < beta':
/// a diagonal segment with Re z spanning [-1, 1] and Im z strictly inside.
std::vector<cplx> default_z_grid(double beta_prime, int n = 33);

double sup_norm(const std::function<cplx(cplx)>& g, const std::vector<cplx>& z_grid);

using Family = std::function<cplx(cplx t, cplx z, cplx eps)>;
using CoefficientFamily = std::function<cplx(int p, cplx t, cplx z)>;

struct RemainderProbe {
  int N = 0;
  cplx eps{0.0, 0.0};
  std::optional<cplx> t;
};

/// ||f(t,.,eps) - sum_{p<=N} phi_p(t,.) eps^p|| over z_grid. A scale activates
/// the domain-shrink rule |t| < r_N (DomainViolation naming the probe).
RemainderTable remainders(const Family& f, const CoefficientFamily& coeffs,
                          const std::vector<RemainderProbe>& probes,
                          const std::vector<cplx>& z_grid = {cplx{0.0, 0.0}},
                          const std::optional<GevreyScale>& scale = std::nullopt);

enum class FitKind { q_gevrey, zero_gevrey_relative };

struct GevreyFit {
  FitKind kind = FitKind::q_gevrey;
  double q = 2.0;
  double k = 1.0;  // q-Gevrey order; +infinity drops the q-factor
  GevreyScale scale;  // zero_gevrey_relative only
  double C_fit = 0.0, A_fit = 0.0;  // least squares
  double C = 0.0, A = 0.0;          // certified
  double max_violation = 0.0;       // max over rows of log(norm / bound); <= 0 certified
  double residual_rms = 0.0;
  int rows_used = 0;

  bool certified() const { return max_violation <= 0.0; }
  double log_bound(const RemainderRow& row) const;
};

/// log r <= log C + (N+1) log A + N(N+1) log(q)/(2k) + (N+1) log|eps|.
GevreyFit fit_q_gevrey(const RemainderTable& table, double k, double q);

/// log r <= log C + (N+1)(log A + log|eps|) on rows with t in D(0, r_N).
GevreyFit fit_zero_gevrey_relative(const RemainderTable& table, const GevreyScale& scale);

/// Max log-violation of an already fitted envelope on another table.
double max_violation(const GevreyFit& fit, const RemainderTable& table);

/// Rows whose t lies in D(0, r_N) of the scale; rows without t are kept.
RemainderTable restrict_to_scale(const RemainderTable& table, const GevreyScale& scale);

/// Functional bound K exp(-(k/2) log^2 x / log q) x^gamma with x = |eps t|.
struct FunctionalBound {
  double K = 1.0;
  double k = 1.0;
  double gamma = 0.0;
  double q = 2.0;

  double operator()(double x) const;
};

/// Row N of the sequential form C H^N G_N x^N with C = K q^{g^2/2k},
/// H = q^{-g/k} and G_N = q^{N^2/2k}.
struct SequentialRow {
  int N = 0;
  double C = 0.0;
  double H = 0.0;
  double G = 0.0;

  double bound(double x) const;
};

std::vector<SequentialRow> functional_to_sequential(const FunctionalBound& fb, int n_max);

/// Least squares log y = a log^2 x + b log x + c. k_fit = -2 log(q) a is the
/// log-Gaussian decay exponent.
struct RateFit {
  double a = 0.0, b = 0.0, c = 0.0;
  double k_fit = 0.0;
  double residual_rms = 0.0;
  int rows_used = 0;
};

RateFit fit_log_gaussian_rate(const std::vector<double>& x, const std::vector<double>& y, double q);

}  // namespace qgevrey
