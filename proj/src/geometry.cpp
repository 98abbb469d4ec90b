#include "qgevrey/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qgevrey/errors.hpp"

namespace qgevrey {

using std::numbers::pi;

double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * pi);
  if (w <= -pi) w += 2.0 * pi;
  return w;
}

bool Sector::contains(cplx z) const {
  const double r = std::abs(z);
  if (!(r > inner_radius) || !(r < radius)) return false;
  return std::abs(wrap_angle(std::arg(z) - bisector)) < half_opening;
}

Sector make_sector(double bisector, double half_opening, double radius, double inner_radius) {
  if (!(half_opening > 0.0 && half_opening < pi)) {
    throw InvalidArgument("sector half-opening must lie in (0, pi)");
  }
  if (!(inner_radius >= 0.0) || !(radius > inner_radius)) {
    throw InvalidArgument("sector radii must satisfy 0 <= inner < outer");
  }
  return {bisector, half_opening, radius, inner_radius};
}

bool sectors_intersect(const Sector& a, const Sector& b) {
  const bool arcs = std::abs(wrap_angle(a.bisector - b.bisector)) < a.half_opening + b.half_opening;
  const bool radii = std::max(a.inner_radius, b.inner_radius) < std::min(a.radius, b.radius);
  return arcs && radii;
}

CoveringReport validate_good_covering(const GoodCovering& cov, int arc_resolution) {
  CoveringReport rep;
  const std::size_t n = cov.size();
  if (n < 2) {
    rep.adjacency_violations.push_back("a good covering needs at least two sectors");
    return rep;
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      const bool adjacent = (k == j + 1) || (j == 0 && k == n - 1);
      const bool meet = sectors_intersect(cov.sectors[j], cov.sectors[k]);
      if (adjacent != meet) {
        std::ostringstream os;
        os << "E_" << j << (meet ? " meets " : " misses ") << "E_" << k
           << (adjacent ? " (cyclic neighbours must intersect)" : " (non-neighbours must be disjoint)");
        rep.adjacency_violations.push_back(os.str());
      }
    }
  }
  rep.common_radius = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    const Sector& s = cov.sectors[j];
    rep.common_radius = std::min(rep.common_radius, s.radius);
    if (s.inner_radius > 0.0) {
      rep.adjacency_violations.push_back("E_" + std::to_string(j) +
                                         " has a positive inner radius, so no punctured disc is covered");
    }
  }
  rep.min_coverage = static_cast<int>(n);
  const double h = 2.0 * pi / arc_resolution;
  for (int i = 0; i < arc_resolution; ++i) {
    const double th = -pi + h * (i + 0.5);
    int count = 0;
    for (const Sector& s : cov.sectors) {
      if (std::abs(wrap_angle(th - s.bisector)) < s.half_opening) ++count;
    }
    rep.min_coverage = std::min(rep.min_coverage, count);
    if (count == 0) rep.uncovered_arc += h;
  }
  return rep;
}

double qspiral_infimum(double direction, cplx T) {
  if (T == cplx{0.0, 0.0}) throw InvalidArgument("R_{d,delta} is defined on C*; T = 0");
  const double th = wrap_angle(direction - std::arg(T));
  return std::cos(th) >= 0.0 ? 1.0 : std::abs(std::sin(th));
}

bool qspiral_membership(const QSpiralDomain& dom, cplx T) {
  if (dom.bounded_radius && !(std::abs(T) < *dom.bounded_radius)) return false;
  return qspiral_infimum(dom.direction, T) > dom.delta_t;
}

namespace {

double level_exponent(const RootConfig& cfg) {
  const double d = cfg.dD, k = cfg.k;
  return ((d + k) * (d + k - 1.0) / 2.0 - k * (k - 1.0) / 2.0) * std::log(cfg.q) / k;
}

cplx checked_ratio(const RootConfig& cfg, double m) {
  const cplx im{0.0, m};
  const cplx r = cfg.RD(im);
  const double scale = std::pow(1.0 + std::abs(m), std::max(cfg.RD.degree(), cfg.Q.degree()));
  if (std::abs(r) <= 1e-14 * cfg.RD.coefficient_scale() * scale) {
    std::ostringstream os;
    os << "R_D(im) vanishes at m = " << m << " (hypothesis H2)";
    throw DomainViolation(os.str());
  }
  const cplx qv = cfg.Q(im);
  if (std::abs(qv) <= 1e-14 * cfg.Q.coefficient_scale() * scale) {
    std::ostringstream os;
    os << "Q(im) vanishes at m = " << m << " (hypothesis H2)";
    throw DomainViolation(os.str());
  }
  return qv / r;
}

}  // namespace

Polynomial root_polynomial(const RootConfig& cfg, double m) {
  const cplx im{0.0, m};
  const double L = std::log(cfg.q), k = cfg.k, d = cfg.dD;
  std::vector<cplx> c(cfg.dD + 1, cplx{0.0, 0.0});
  c[0] = cfg.Q(im) * std::exp(-L / k * k * (k - 1.0) / 2.0);
  c[cfg.dD] = -cfg.RD(im) * std::exp(-L / k * (d + k) * (d + k - 1.0) / 2.0);
  return Polynomial(std::move(c));
}

std::vector<cplx> roots_of_P(const RootConfig& cfg, double m) {
  if (cfg.dD < 1) throw InvalidArgument("d_D must be at least 1");
  const cplx c = checked_ratio(cfg, m) * std::exp(level_exponent(cfg));
  const double mod = std::pow(std::abs(c), 1.0 / cfg.dD);
  std::vector<cplx> roots;
  for (int j = 0; j < cfg.dD; ++j) {
    roots.push_back(std::polar(mod, wrap_angle((std::arg(c) + 2.0 * pi * j) / cfg.dD)));
  }
  std::sort(roots.begin(), roots.end(),
            [](cplx a, cplx b) { return std::arg(a) < std::arg(b); });
  return roots;
}

std::vector<double> default_m_grid() {
  std::vector<double> g;
  for (int i = -128; i <= 128; ++i) {
    const double s = i / 128.0;
    g.push_back(20.0 * s * std::abs(s));
  }
  return g;
}

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  if (n == 1) return {0.5 * (a + b)};
  for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
  return v;
}

}  // namespace

Admissibility direction_admissible(const RootConfig& cfg, const Sector& test_sector,
                                   const std::vector<double>& m_grid, int tau_grid_size,
                                   double outer_cutoff) {
  if (m_grid.empty() || tau_grid_size < 2) {
    throw InvalidArgument("admissibility scan needs a non-empty m-grid and at least two tau points");
  }
  std::vector<cplx> cloud;
  const double rmax = std::min(test_sector.radius, outer_cutoff);
  const double rmin = std::max(test_sector.inner_radius, 1e-3 * std::min(1.0, rmax));
  const auto angles = linspace(test_sector.bisector - test_sector.half_opening,
                               test_sector.bisector + test_sector.half_opening, tau_grid_size);
  for (double lr : linspace(std::log(rmin), std::log(rmax), tau_grid_size)) {
    for (double a : angles) cloud.push_back(std::polar(std::exp(lr), a));
  }
  if (cfg.level == Level::one) {
    cloud.emplace_back(0.0, 0.0);
    for (double r : linspace(0.0, cfg.rho, tau_grid_size)) {
      if (r == 0.0) continue;
      for (double a : linspace(-pi, pi, tau_grid_size)) cloud.push_back(std::polar(r, a));
    }
  }
  double m1 = std::numeric_limits<double>::infinity(), m2 = m1;
  for (double m : m_grid) {
    for (const cplx& root : roots_of_P(cfg, m)) {
      const double rr = std::abs(root);
      for (const cplx& tau : cloud) {
        const double dist = std::abs(tau - root);
        m1 = std::min(m1, dist / (1.0 + std::abs(tau)));
        m2 = std::min(m2, dist / rr);
      }
    }
  }
  return {m1 >= cfg.M1 && m2 >= cfg.M2, m1, m2, static_cast<int>(cloud.size())};
}

std::vector<cplx> sector_samples(const Sector& s, int radial, int angular) {
  if (s.unbounded()) throw InvalidArgument("cannot sample an unbounded sector");
  std::vector<cplx> pts;
  for (int i = 0; i < radial; ++i) {
    const double r = s.inner_radius + (s.radius - s.inner_radius) * (i + 0.5) / radial;
    for (int j = 0; j < angular; ++j) {
      const double a = s.bisector + s.half_opening * (-1.0 + 2.0 * (j + 0.5) / angular);
      pts.push_back(std::polar(r, a));
    }
  }
  return pts;
}

AssociationReport associate_family(const GoodCovering& cov, const std::vector<QSpiralDomain>& domains,
                                   const Sector& T_sector, const QFrame& frame, int grid) {
  if (domains.size() != cov.size()) {
    throw InvalidArgument("one q-spiral domain per covering sector is required");
  }
  AssociationReport rep;
  const double bound = frame.epsilon0() * frame.rT();
  std::vector<QSpiralDomain> dom = domains;
  for (auto& d : dom) {
    if (!d.bounded_radius) d.bounded_radius = bound;
  }
  const std::size_t n = cov.size();
  for (std::size_t p = 0; p < n; ++p) {
    const QSpiralDomain& a = dom[p];
    const QSpiralDomain& b = dom[(p + 1) % n];
    bool meet = false;
    for (int i = 0; i < 16 * grid && !meet; ++i) {
      const double r = 0.5 * std::min(*a.bounded_radius, *b.bounded_radius);
      const cplx T = std::polar(r, -pi + 2.0 * pi * (i + 0.5) / (16 * grid));
      meet = qspiral_membership(a, T) && qspiral_membership(b, T);
    }
    if (!meet) {
      rep.failures.push_back("R^b_" + std::to_string(p) + " and R^b_" + std::to_string((p + 1) % n) +
                             " share no sampled point");
    }
  }
  const auto ts = sector_samples(T_sector, grid, grid);
  for (std::size_t p = 0; p < n; ++p) {
    int bad = 0;
    cplx worst{0.0, 0.0};
    for (const cplx& eps : sector_samples(cov.sectors[p], grid, grid)) {
      for (const cplx& t : ts) {
        ++rep.product_points;
        if (!qspiral_membership(dom[p], eps * t)) {
          if (bad++ == 0) worst = eps * t;
        }
      }
    }
    if (bad > 0) {
      std::ostringstream os;
      os << bad << " points eps*t outside R^b_" << p << ", e.g. " << worst;
      rep.failures.push_back(os.str());
    }
  }
  return rep;
}

}  // namespace qgevrey
