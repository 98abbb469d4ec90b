#pragma once

// Sectors and good coverings of C*, the q-spiral avoiding domains
//
//   R_{d,delta} = { T != 0 : |1 + r e^{id} / T| > delta for all r >= 0 },
//
// the roots of P_{m,j} and the admissibility conditions a)/b) on directions.

#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qgevrey/polynomial.hpp"
#include "qgevrey/qcore.hpp"

namespace qgevrey {

using cplx = std::complex<double>;

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

/// Open sector {inner_radius < |z| < radius, |arg z - bisector| < half_opening}.
/// radius = +inf marks an unbounded sector.
struct Sector {
  double bisector = 0.0;
  double half_opening = 0.5;
  double radius = std::numeric_limits<double>::infinity();
  double inner_radius = 0.0;

  bool unbounded() const { return radius == std::numeric_limits<double>::infinity(); }
  bool contains(cplx z) const;
};

/// Throws InvalidArgument unless 0 < half_opening < pi and 0 <= inner < radius.
Sector make_sector(double bisector, double half_opening,
                   double radius = std::numeric_limits<double>::infinity(),
                   double inner_radius = 0.0);

/// Whether two sectors share a point (exact: arc overlap and radial overlap).
bool sectors_intersect(const Sector& a, const Sector& b);

struct GoodCovering {
  std::vector<Sector> sectors;
  std::size_t size() const { return sectors.size(); }
  const Sector& operator[](std::size_t p) const { return sectors[p % sectors.size()]; }
};

struct CoveringReport {
  std::vector<std::string> adjacency_violations;
  int min_coverage = 0;           // fewest sectors over any arc-grid angle
  double uncovered_arc = 0.0;     // total arc measure with coverage 0
  double common_radius = 0.0;     // min radius: the covered punctured disc
  bool valid() const { return adjacency_violations.empty() && min_coverage >= 1 && common_radius > 0.0; }
};

CoveringReport validate_good_covering(const GoodCovering& cov, int arc_resolution = 3600);

struct QSpiralDomain {
  double direction = 0.0;
  double delta_t = 0.5;
  std::optional<double> bounded_radius;  // R^b = R_{d,delta} intersected with D(0, eps0 rT)
};

/// inf_{r >= 0} |1 + r e^{id} / T| in closed form: 1 when cos(d - arg T) >= 0,
/// |sin(d - arg T)| otherwise.
double qspiral_infimum(double direction, cplx T);

bool qspiral_membership(const QSpiralDomain& dom, cplx T);

/// Data of one level of the root construction: P_{m,j}(tau) =
/// Q(im)/(q^{1/k})^{k(k-1)/2} - R_D(im)/(q^{1/k})^{(d_D+k)(d_D+k-1)/2} tau^{d_D}.
struct RootConfig {
  Level level = Level::one;
  Polynomial Q;
  Polynomial RD;
  int dD = 1;
  double q = 2.0;
  double k = 1.0;
  double M1 = 0.0;   // required margin in a)
  double M2 = 0.0;   // required margin in b)
  double rho = 0.5;  // disc D(0, rho) joined to U_d at level one
};

/// P_{m,j} as a polynomial in tau.
Polynomial root_polynomial(const RootConfig& cfg, double m);

/// The d_D roots of P_{m,j}, sorted by argument. Throws DomainViolation when
/// R_D(im) = 0.
std::vector<cplx> roots_of_P(const RootConfig& cfg, double m);

/// 257 points in [-20, 20], quadratically clustered at 0.
std::vector<double> default_m_grid();

struct Admissibility {
  bool ok;
  double M1_est;
  double M2_est;
  int tau_points;
};

/// Minimises |tau - q_l(m)|/(1+|tau|) and |tau - q_l(m)|/|q_l(m)| over the
/// m-grid and a point cloud of the test sector (radially log-spaced up to
/// min(radius, outer_cutoff), plus the closed disc D(0, rho) at level one).
/// The cloud for n is a subset of the cloud for 2n - 1.
Admissibility direction_admissible(const RootConfig& cfg, const Sector& test_sector,
                                   const std::vector<double>& m_grid, int tau_grid_size,
                                   double outer_cutoff = 1e3);

struct AssociationReport {
  std::vector<std::string> failures;
  int product_points = 0;
  bool ok() const { return failures.empty(); }
};

/// Checks R^b_p and R^b_{p+1} meet (sampled on a polar grid of D(0, eps0 rT))
/// and eps t in R^b_p for t on a grid of the T sector and eps on a grid of E_p.
AssociationReport associate_family(const GoodCovering& cov, const std::vector<QSpiralDomain>& domains,
                                   const Sector& T_sector, const QFrame& frame, int grid = 24);

/// Sample points of a bounded sector: radial x angular interior grid.
std::vector<cplx> sector_samples(const Sector& s, int radial, int angular);

}  // namespace qgevrey
