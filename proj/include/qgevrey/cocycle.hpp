#pragma once

// Cocycles on good coverings, the split of overlaps into two decay levels,
// and the constructive multilevel Ramis-Sibuya decomposition
//
//   G_p = a + G_p^1 + G_p^2,   G_{p+1}^j - G_p^j = Delta_p^j,
//
// built from Cauchy-Heine integrals along rays bisecting each overlap.
//
// Orientation. Sectors are ordered counterclockwise; overlap O_p = E_p n E_{p+1}
// lies on the counterclockwise side of E_p and carries the ray gamma_p. Inside
// E_p the "middle" region sits between gamma_{p-1} and gamma_p and uses the
// straight rays. Past gamma_p (still inside O_p) Psi_p is the analytic
// continuation, realised by bending gamma_p: out along a ray near the far edge
// of O_p, then back along the arc |xi| = rho_p. Symmetrically before gamma_{p-1}.

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "qgevrey/asymptotics.hpp"
#include "qgevrey/geometry.hpp"
#include "qgevrey/qcore.hpp"

namespace qgevrey {

// Values of an F-valued function on the sampled norm grid (size 1 when scalar).
using Values = Eigen::VectorXcd;
using SectionFn = std::function<Values(int p, cplx t, cplx eps)>;

double norm(const Values& v);

/// I1: overlaps whose U-sectors meet (level k2 decay). I2: the rest (level k1).
struct LevelPartition {
  std::vector<int> I1, I2;
  std::vector<std::string> warnings;

  Level level_of(int p) const;
  bool degenerate() const { return I1.empty() || I2.empty(); }
};

LevelPartition classify_levels(const std::vector<bool>& u_intersections_nonempty);

struct Cocycle {
  GoodCovering covering;
  SectionFn G;      // sector functions; required by multilevel_split only
  SectionFn Delta;  // Delta_p on E_p n E_{p+1}
  LevelPartition levels;
  std::vector<bool> active;  // false marks Delta_p identically zero
  int dim = 1;
};

/// Cocycle with Delta_p = G_{p+1} - G_p.
Cocycle cocycle_from_sections(const GoodCovering& cov, SectionFn G, LevelPartition levels, int dim = 1);

/// Delta_p kept on the overlaps of the given level, zero elsewhere.
Cocycle level_filter(const Cocycle& c, Level level);

/// Angular data of overlap O_p, unwrapped so that lower < ray < upper.
struct Overlap {
  double lower = 0.0, upper = 0.0;  // angular edges
  double ray = 0.0;                 // bisector, the cut gamma_p
  double radius = 0.0;              // min of the two sector radii
};

std::vector<Overlap> overlaps(const GoodCovering& cov);

struct CauchyHeineOptions {
  double ray_fraction = 0.9;      // ray length / overlap radius
  double inner_cut = 1e-12;       // rays start at inner_cut * length; Delta is flat there
  double panel_ratio = 1.189207115002721;  // 2^{1/4}, geometric panels in |xi|
  double bend_fraction = 0.9;     // bent ray sits this far towards the overlap edge
  int arc_panels = 8;
  double cut_tolerance = 1e-9;    // radians; closer to a cut is refused
};

/// Sequential bound ||Delta_p(t,eps)|| <= C H^N |eps|^N for |t| < r_N.
struct SequentialBound {
  double C = 1.0;
  double H = 1.0;
};

// Probe of overlap or sector p at expansion order N.
struct BoundProbe {
  int p = 0;
  int N = 0;
  cplx t;
  cplx eps;
};

/// Max over probes of log(||Delta_p|| / bound); throws CertificationFailure
/// when positive, DomainViolation for |t| >= r_N. Inactive overlaps are skipped.
double certify_sequential_bound(const Cocycle& c, const SequentialBound& b, const GevreyScale& scale,
                                const std::vector<BoundProbe>& probes);

class CauchyHeine {
 public:
  CauchyHeine(Cocycle c, CauchyHeineOptions opt = {});

  /// Psi_p(t, eps); eps must lie in E_p, off the cuts, inside the ray radius.
  Values psi(int p, cplx t, cplx eps) const;
  /// phi_n(t) = sum_j (1/2 pi i) int_{gamma_j} Delta_j(t, xi) xi^{-n-1} d xi.
  Values coefficient(int n, cplx t) const;
  /// Psi_p - sum_{n<=N} phi_n eps^n through the kernel (eps/xi)^{N+1}/(xi - eps).
  Values remainder(int p, int N, cplx t, cplx eps) const;

  const Cocycle& cocycle() const { return c_; }
  const std::vector<Overlap>& cuts() const { return ov_; }
  /// Largest |eps| for which psi is defined: the shortest ray.
  double radius() const;
  /// Which region of E_p holds eps: -1 before gamma_{p-1}, 0 middle, +1 past gamma_p.
  int region(int p, cplx eps) const;
  /// Angles of the bent rays of cut p: (clockwise, counterclockwise).
  std::pair<double, double> bend_angles(int p) const;

 private:
  struct Contour {
    std::vector<cplx> xi, w;  // w includes d xi / (2 pi i)
  };
  struct Cache {
    std::vector<std::vector<Values>> straight, up, down;
  };

  const Cache& cache(cplx t) const;
  template <class Kernel>
  Values accumulate(int p, cplx t, cplx eps, const Kernel& k) const;

  Cocycle c_;
  CauchyHeineOptions opt_;
  std::vector<Overlap> ov_;
  std::vector<double> rho_;
  std::vector<Contour> straight_, up_, down_;
  mutable std::map<std::pair<double, double>, std::unique_ptr<Cache>> cache_;
  mutable std::mutex mu_;
};

struct SplitProbe {
  int p = 0;
  cplx t;
  cplx eps;
};

/// Deterministic probes in every E_p: the three regions, each at the given
/// radii, at angles kept away from cuts and overlap edges.
std::vector<SplitProbe> split_probes(const CauchyHeine& ch, const std::vector<cplx>& ts,
                                     const std::vector<double>& radii);

struct SplitReport {
  double reconstruction_error = 0.0;
  double difference_error[2] = {0.0, 0.0};  // indexed by Level
  double glue_mismatch = 0.0;               // max ||a_{p+1} - a_p|| on overlap probes
  double glue_outer_max = 0.0;              // sup ||a|| on |eps| = eps1
  double glue_inner_max = 0.0;              // sup ||a|| over the cascade |eps| = eps1 2^{-j}
  double glue_laurent = 0.0;                // largest negative-index DFT coefficient of a
  double eps1 = 0.0;
  int probes = 0;
  bool passed = true;
  std::vector<std::string> warnings;
};

struct SplitOptions {
  CauchyHeineOptions ch;
  double tolerance = 1e-7;
  int cascade = 8;       // inner circles eps1 2^{-j}, j = 1..cascade
  int circle_points = 64;
  bool throw_on_failure = true;
};

class SplitResult {
 public:
  /// Glue a(t, eps): a_p for the sector whose middle region holds eps.
  Values glue(cplx t, cplx eps) const;
  /// G_p^j(t, eps) = Psi_p^j.
  Values piece(Level level, int p, cplx t, cplx eps) const;
  /// phi_n^j(t); requires |t| < r_n of the level (DomainViolation otherwise).
  Values coefficient(Level level, int n, cplx t) const;
  Values expansion_remainder(Level level, int p, int N, cplx t, cplx eps) const;
  /// Taylor coefficients of a(t, .) at 0 from a DFT on |eps| = radius.
  std::vector<Values> glue_taylor(cplx t, int n_max, double radius, int points = 64) const;

  const GevreyScale& scale(Level level) const { return level == Level::one ? s1_ : s2_; }
  const CauchyHeine& splitter(Level level) const { return level == Level::one ? *ch1_ : *ch2_; }
  const SplitReport& report() const { return report_; }

  friend SplitResult multilevel_split(const Cocycle&, const GevreyScale&, const GevreyScale&,
                                      const std::vector<cplx>&, const SplitOptions&);

 private:
  Values glue_p(int p, cplx t, cplx eps) const;

  Cocycle c_;
  GevreyScale s1_, s2_;
  std::shared_ptr<CauchyHeine> ch1_, ch2_;
  SplitReport report_;
};

/// Runs the level-wise Cauchy-Heine split, forms a_p = G_p - Psi_p^1 - Psi_p^2
/// and checks glue consistency, reconstruction, difference realization and
/// boundedness of a on the probe cascade at the t values given. Throws
/// CertificationFailure when any of these exceeds opt.tolerance.
SplitResult multilevel_split(const Cocycle& c, const GevreyScale& level1, const GevreyScale& level2,
                             const std::vector<cplx>& ts, const SplitOptions& opt = {});

/// Remainder table of Psi_p^level on probes (p, N, t, eps) with |t| < r_N.
RemainderTable split_remainders(const SplitResult& s, Level level, const std::vector<BoundProbe>& probes);

}  // namespace qgevrey
