#pragma once

// Desk-scale model problems. Sector solutions
//
//   u_p(t, z, eps) = (2 pi)^{-1/2} (k2 / log q) int_R int_{L_{d_p}}
//                    w_p(u, m, eps) / Theta_{k2}(u / (eps t)) du/u e^{izm} dm
//
// for separable synthetic kernels w_p(u, m, eps) = W_p(u) h(m), their
// consecutive differences (directly and through the deformed contours of the
// two overlap types) and the end-to-end two-level splitting pipeline.
//
// W_p(u) = scale (sum_j c_j u / (u - u_j) + sum_n a_n u^n + E(u)), where the
// optional planted discrepancy E(u) = c / Theta_{kappa}(lambda / u) decays like
// exp(-kappa log^2|u| / (2 log q)) at the origin; it is what separates the
// continuations of neighbouring kernels across an empty U-intersection.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qgevrey/asymptotics.hpp"
#include "qgevrey/cocycle.hpp"
#include "qgevrey/geometry.hpp"
#include "qgevrey/qcore.hpp"
#include "qgevrey/qlaplace.hpp"
#include "qgevrey/special.hpp"

namespace qgevrey {

struct Pole {
  cplx at;
  cplx weight = 1.0;  // term weight * u / (u - at); residue weight * at
};

struct Discrepancy {
  cplx amplitude = 1.0;
  cplx lambda = -1.0;  // poles of E lie on the ray arg(-lambda)
  double kappa = 2.0;

  cplx operator()(double q, cplx u) const;
};

/// |W| <= C_w exp(k2 log^2|u| / (2 log q) + nu log|u|) on S_{d_p} and, for the
/// discrepancy, |E(u)| <= K31 exp(-kappa log^2|u| / (2 log q)) |u|^{K41} on
/// the bounded sector where it is sampled.
struct KernelGrowth {
  double C_w = 1.0;
  double nu = 0.0;
  double K31 = 0.0;
  double K41 = 0.0;
};

struct Kernel {
  std::vector<Pole> poles;
  std::vector<cplx> polynomial;  // entire part sum a_n u^n
  std::optional<Discrepancy> discrepancy;
  double scale = 1.0;
  KernelGrowth growth;

  /// Borel-plane factor W(u); the full kernel is W(u) h(m).
  cplx borel(double q, cplx u) const;
  /// Pole and polynomial part only.
  cplx regular(cplx u) const;
  bool is_zero() const;
};

/// W_a - W_b evaluated term by term, so identical parts cancel exactly.
cplx kernel_difference(const Kernel& a, const Kernel& b, double q, cplx u);

struct Scenario {
  QFrame frame = make_qframe(2.0, 1.0, 2.0, 0.4, 0.4);
  GoodCovering covering;
  std::vector<double> directions;  // d_p
  double u_half_opening = 0.7;     // U_{d_p}
  double s_half_opening = 0.3;     // S_{d_p}, where e218-type bounds are sampled
  Sector T;
  double delta_t = 0.3;
  double rho_tilde = 0.5;  // radius of the deformed contours
  double beta = 1.0;
  double beta_prime = 0.5;
  double mu = 3.0;
  double nu = 0.0;
  double alpha = 0.0;
  std::vector<Kernel> kernels;  // one per direction

  int size() const { return int(directions.size()); }
  std::vector<bool> u_intersections() const;
  LevelPartition levels() const;
  QSpiralDomain domain(int p) const;
};

/// q = 2, k1 = 1, k2 = 2, four sectors with directions 0, 1, pi, pi + 1;
/// poles at 0.6 e^{0.5 i} and 0.6 e^{i(pi + 0.5)} between the directions of the
/// nonempty U-intersections, a discrepancy on directions 2 and 3.
Scenario default_scenario();

struct ScenarioCheck {
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

/// nu < 1/2, the three smallness conditions on r_T, sizes, directions inside
/// their covering sectors, rho_tilde below every pole modulus.
ScenarioCheck check_scenario(const Scenario& sc);

struct KernelCertification {
  int points = 0;
  int growth_violations = 0;
  int discrepancy_violations = 0;
  double worst_growth = -1e300;  // max log(|W| / bound)
  double worst_discrepancy = -1e300;
  bool ok() const { return growth_violations == 0 && discrepancy_violations == 0; }
};

/// Fills C_w (and K31, K41 when a discrepancy is present) from a calibration
/// grid of S_{d_p}, with the given safety factor.
void calibrate_kernel_growth(const Scenario& sc, int p, Kernel& k, double safety = 1.25);

/// Checks the stored growth data on an independent grid (radial x angular);
/// the discrepancy envelope is sampled on |u| <= eps0 r_T.
KernelCertification certify_kernel(const Scenario& sc, int p, int radial = 61, int angular = 13);

struct SolutionValue {
  cplx value;
  double error;
  cplx ray;      // the u-integral R_p(eps t)
  cplx fourier;  // inverse Fourier transform of h at z
};

/// u_p(t, z, eps) as (ray q-Laplace integral) x (inverse Fourier of h).
/// Throws DomainViolation for eps outside E_p, t outside T, |Im z| > beta',
/// eps t outside R^b_p.
SolutionValue assemble_solution(const Scenario& sc, int p, cplx t, cplx z, cplx eps,
                                double tol = 1e-12);

// Per-piece integrals of the deformed-contour representation of
// R_{p+1} - R_p (the u-side of u_{p+1} - u_p), all with the k2/log q factor.
struct DifferencePieces {
  bool empty_case = false;
  cplx I1, I2, I3, I4, I5, I6;  // unused pieces stay 0
  double error = 0.0;

  cplx total() const { return empty_case ? I1 - I2 - I4 + I5 + I6 : I1 - I2 + I3; }
};

class Model {
 public:
  explicit Model(Scenario sc, std::vector<cplx> z_grid = {});

  const Scenario& scenario() const { return sc_; }
  const std::vector<cplx>& z_grid() const { return z_; }
  const std::vector<cplx>& fourier() const { return F_; }
  double fourier_error() const { return F_err_; }

  /// R_p(T) by the certified q-Laplace quadrature along d_p.
  QLaplaceResult ray(int p, cplx T) const;
  /// R_{p+1}(T) - R_p(T) through the deformed contours.
  DifferencePieces pieces(int p, cplx T) const;

  /// u_p on the z-grid.
  Values section(int p, cplx t, cplx eps) const;
  /// u_{p+1} - u_p on the z-grid from the pieces.
  Values difference(int p, cplx t, cplx eps) const;

  Cocycle cocycle() const;

  void check_point(int p, cplx t, cplx eps) const;
  void check_overlap_point(int p, cplx t, cplx eps) const;

 private:
  Scenario sc_;
  std::vector<cplx> z_;
  std::vector<cplx> F_;
  double F_err_ = 0.0;
  std::vector<QLaplaceSpec> specs_;
  std::vector<GrowthCertificate> certs_;
  std::vector<bool> u_meet_;
  double Cqk_ = 0.0;
};

struct DiffProbe {
  cplx t;
  cplx z;
  cplx eps;
};

struct DiffRow {
  DiffProbe probe;
  cplx direct;
  double direct_error;
  cplx decomposed;
  double decomposed_error;
  DifferencePieces pieces;  // u-side pieces, before the Fourier factor
};

struct DifferenceTable {
  int p = 0;
  bool empty_case = false;
  std::vector<DiffRow> rows;

  /// max |direct - decomposed| / (direct_error + decomposed_error)
  double worst_agreement() const;
  void write_csv(const std::string& path) const;
};

/// Rows for probes in E_p n E_{p+1}; the direct route assembles u_{p+1} and
/// u_p separately, the decomposed route integrates the pieces.
DifferenceTable consecutive_difference(const Model& m, int p, const std::vector<DiffProbe>& probes,
                                       bool decompose = true);
DifferenceTable consecutive_difference(const Scenario& sc, int p, const std::vector<DiffProbe>& probes,
                                       bool decompose = true);

/// A few probes per overlap: t in T, eps at three angles and two radii, z on
/// the real axis and near the strip edge.
std::vector<DiffProbe> overlap_grid(const Scenario& sc, int p);

struct RateCascade {
  int p = 0;
  Level expected;
  std::vector<int> j;
  std::vector<double> abs_eps_t;
  std::vector<double> norm;  // sup over the z-grid of |u_{p+1} - u_p|
  RateFit fit;

  void write_csv(const std::string& path) const;
};

/// Differences at |eps t| = 2^{-j}, j = j_lo..j_hi, along the overlap bisector
/// with arg t = 0, and the log-Gaussian rate fit.
RateCascade rate_cascade(const Model& m, int p, int j_lo = 3, int j_hi = 12);

struct TheoremOptions {
  std::vector<cplx> split_ts = {std::polar(0.3, 0.02), std::polar(0.1, 0.02)};
  std::vector<double> t_ladder = {0.3, 0.1, 0.03};  // probes use t = r e^{0.02 i}
  std::vector<double> eps_radii = {0.02, 0.05};
  int n_max = 7;
  SplitOptions split;
  TheoremOptions() {
    split.ch.inner_cut = 1e-6;
    split.throw_on_failure = false;
  }
};

struct LevelReport {
  Level level;
  std::vector<int> overlaps;
  FunctionalBound functional;
  SequentialBound sequential;
  double sequential_margin = 0.0;  // max log(|Delta| / bound) on probes, <= 0
  RemainderTable table;
  GevreyFit fit;
};

struct TheoremReport {
  LevelPartition levels;
  bool single_level = false;
  SplitReport split;
  std::vector<LevelReport> level_reports;
  GevreyFit corollary;       // level-2 table restricted to D(0, r_N^1), fitted at level 1
  GevreyFit merged;          // Psi^1 + Psi^2 remainders on level-1 discs
  std::shared_ptr<const SplitResult> result;
  std::vector<std::string> warnings;
  bool passed = false;
};

/// differences -> functional and sequential bounds -> multilevel split ->
/// 0-Gevrey fits at r_N^j -> corollary check on the smaller discs.
TheoremReport verify_two_level_theorem(const Model& m, const TheoremOptions& opt = {});

}  // namespace qgevrey
