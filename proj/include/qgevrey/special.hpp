#pragma once

// Jacobi theta function of order k,
//
//   Theta(z) = sum_{p in Z} q^{-p(p-1)/(2k)} z^p,
//
// its q-difference equation Theta(q^{m/k} z) = q^{m(m+1)/(2k)} z^m Theta(z),
// its growth envelope away from the zero spiral {-q^{m/k}}, and the inverse
// Fourier transform (2 pi)^{-1/2} int f(m) e^{izm} dm for symbols with
// exponential decay.

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qgevrey/quadrature.hpp"

namespace qgevrey {

/// mantissa * exp(log_scale). Theta grows like exp(k log^2|z| / (2 log q)),
/// which leaves double range long before the integrals that use it do.
struct ScaledComplex {
  cplx mantissa{0.0, 0.0};
  double log_scale = 0.0;

  cplx value() const;
  cplx reciprocal() const;  // 1 / value(), computed without forming value()
  double log_abs() const;
};

/// Truncated symmetric evaluation rule for theta. The truncation is certified
/// on the annulus [annulus_min, annulus_max]: there, the dropped terms sum to
/// at most tail_tol times the largest retained term.
struct ThetaSpec {
  double q = 2.0;
  double k = 1.0;
  int P = 40;
  double tail_tol = 1e-14;
  double annulus_min = 0.0;
  double annulus_max = 0.0;
  // Growth constant C_{q,k} of the lower bound; empty until calibrated.
  std::optional<double> Cqk;
  std::optional<double> calibration_delta;
};

ThetaSpec make_theta_spec(double q, double k, int P = 40, double tail_tol = 1e-14);

/// Symmetric partial sum over -P..P. Throws DomainViolation for z = 0 or |z|
/// outside the certified annulus.
cplx theta_eval(const ThetaSpec& spec, cplx z);

/// Theta at any z != 0 by reducing z into the annulus |z0| in
/// [q^{-1/(2k)}, q^{1/(2k)}) with the q-difference equation.
ScaledComplex theta_scaled(double q, double k, cplx z);

struct QDiffResidual {
  double value;
  bool relative;  // false when theta(q^{m/k} z) vanished and the residual is absolute
};

QDiffResidual theta_qdiff_residual(const ThetaSpec& spec, cplx z, int m);

/// inf over m in Z of |1 + z q^{m/k}|, scanned over a window of 129 indices
/// centred where |z q^{m/k}| is closest to 1 (outside it the factors only
/// move away from the unit circle).
double zero_spiral_margin(double q, double k, cplx z);

struct ThetaLowerBound {
  double lhs;
  double rhs;
  double log_lhs;
  double log_rhs;
  bool margin_ok;
};

/// Compares |Theta(z)| with C_{q,k} delta exp((k/2) log^2|z| / log q) |z|^{1/2}.
/// The spec must carry a calibrated C_{q,k}; z must satisfy
/// zero_spiral_margin(z) > delta.
ThetaLowerBound theta_lower_bound(const ThetaSpec& spec, cplx z, double delta_t);

struct GrowthCalibration {
  double Cqk;
  double raw_minimum;
  int admissible_points;
};

/// Grid minimum of |Theta(z)| / (m(z) exp(k log^2|z|/(2 log q)) |z|^{1/2}), with
/// m(z) = zero_spiral_margin(z) > delta, over one period annulus
/// 1 <= |z| < q^{1/k}, times `safety`. The ratio is invariant under
/// z -> q^{1/k} z, so one period annulus covers C*. Because |theta| >= C m(z) env
/// and m(z) > delta' on admissible points, the constant serves every delta' >= delta.
GrowthCalibration calibrate_growth_constant(double q, double k, double delta_t,
                                            int radial = 200, int angular = 720,
                                            double safety = 0.9);

ThetaSpec with_growth_constant(ThetaSpec spec, const GrowthCalibration& cal, double delta_t);

// --- inverse Fourier -------------------------------------------------------

/// |f(m)| <= C (1+|m|)^{-mu} exp(-beta |m|).
struct DecayProfile {
  double C = 1.0;
  double mu = 2.0;
  double beta = 1.0;

  double bound(double m) const;
  /// Bound on int_M^inf C (1+m)^{-mu} e^{-(beta - b) m} dm, b = |Im z| < beta.
  double tail(double M, double b) const;
};

struct HorizontalStrip {
  double beta_prime;
  bool contains(cplx z) const { return std::abs(z.imag()) < beta_prime; }
};

/// A sampled or closed-form symbol m -> f(m) whose decay profile has been
/// checked on a sample set. Construct through make_symbol.
class Symbol {
 public:
  cplx operator()(double m) const { return f_(m); }
  const DecayProfile& profile() const { return profile_; }
  const std::string& name() const { return name_; }

  friend Symbol make_symbol(std::function<cplx(double)> f, DecayProfile profile,
                            std::string name, std::span<const double> samples);

 private:
  Symbol(std::function<cplx(double)> f, DecayProfile p, std::string n)
      : f_(std::move(f)), profile_(p), name_(std::move(n)) {}
  std::function<cplx(double)> f_;
  DecayProfile profile_;
  std::string name_;
};

std::vector<double> default_symbol_samples();

/// Throws CertificationFailure if |f(m)| exceeds the profile at any sample.
Symbol make_symbol(std::function<cplx(double)> f, DecayProfile profile, std::string name,
                   std::span<const double> samples);
Symbol make_symbol(std::function<cplx(double)> f, DecayProfile profile, std::string name);

/// Built-ins: "exp_decay" e^{-beta|m|}(1+|m|)^{-mu}; "gaussian" e^{-m^2};
/// "odd" m e^{-beta|m|}(1+|m|)^{-mu-1}.
Symbol builtin_symbol(const std::string& name, double beta, double mu);

/// Piecewise-linear symbol through CSV rows "m,re,im" (sorted by m), zero
/// outside the sampled range. The declared profile is checked on the rows.
Symbol symbol_from_csv(const std::string& path, DecayProfile profile);

struct FourierResult {
  cplx value;
  double error;
  double cutoff;  // truncation M of the m-integral
  int evaluations;
};

/// (2 pi)^{-1/2} int f(m) e^{izm} dm, truncated at the M where the profile tail
/// drops below tol/2 and integrated adaptively on [-M, M].
/// Throws DomainViolation when |Im z| > beta_prime or beta_prime >= beta.
FourierResult inverse_fourier(const Symbol& f, cplx z, double beta_prime, double tol = 1e-13);

}  // namespace qgevrey
