#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace qgevrey {

using cplx = std::complex<double>;

struct QuadOptions {
  double abs_tol = 1e-15;
  double rel_tol = 1e-12;
  int max_intervals = 4000;
};

struct QuadResult {
  cplx value{0.0, 0.0};
  double error = 0.0;  // estimated absolute error
  int evaluations = 0;
  bool converged = true;

  // Tolerance the rule was asked to meet for this value.
  double requested(const QuadOptions& opt) const;
};

using ComplexIntegrand = std::function<cplx(double)>;

/// Globally adaptive 7/15-point Gauss-Kronrod on [a, b] (QUADPACK QAG
/// strategy: always bisect the interval with the largest error estimate).
QuadResult integrate(const ComplexIntegrand& f, double a, double b,
                     const QuadOptions& opt = {});

/// Same, but the initial partition is given by `breakpoints` (sorted,
/// including both end points). Used to resolve kinks and known peaks.
QuadResult integrate(const ComplexIntegrand& f, const std::vector<double>& breakpoints,
                     const QuadOptions& opt = {});

// Fixed composite Gauss-Legendre rule, 16 nodes per panel.
struct FixedRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

FixedRule gauss_legendre_panels(const std::vector<double>& panel_edges);

}  // namespace qgevrey
