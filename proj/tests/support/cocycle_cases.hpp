#pragma once

// Synthetic two-level cocycle on the four-sector covering used throughout the
// tests, plus an independent oracle for sector functions G_p whose
// differences reproduce it: G_p = g + (Cauchy-Heine sum along rays of another
// angle and length, integrated adaptively, continued by the Plemelj jump).

#include <cmath>
#include <numbers>
#include <vector>

#include "qgevrey/cocycle.hpp"
#include "qgevrey/geometry.hpp"
#include "qgevrey/quadrature.hpp"

namespace qgevrey::testing {

inline GoodCovering four_sector_covering(double radius = 0.4) {
  const double pi = std::numbers::pi;
  GoodCovering cov;
  for (double d : {0.0, 1.0, pi, pi + 1.0}) cov.sectors.push_back(make_sector(d, 1.4, radius));
  return cov;
}

struct PlantedDelta {
  std::vector<double> k;      // decay order per overlap
  std::vector<cplx> c;        // amplitude per overlap
  std::vector<double> gamma;  // power of eps t per overlap
  std::vector<double> ray;    // branch direction per overlap
  double q = 2.0;
  Values shape;               // F-valued profile

  Values operator()(int p, cplx t, cplx e) const {
    const cplx x = e * t * std::polar(1.0, -(ray[p] + std::arg(t)));
    const cplx l = std::log(x);
    const cplx v = c[p] * std::exp(-k[p] * l * l / (2.0 * std::log(q)) + gamma[p] * l);
    return v * shape;
  }
};

// I1 = {0, 2} decays at k2 = 2, I2 = {1, 3} at k1 = 1.
inline PlantedDelta two_level_delta(const GoodCovering& cov) {
  PlantedDelta d;
  d.k = {2.0, 1.0, 2.0, 1.0};
  d.c = {{1.0, 0.5}, {-0.7, 0.2}, {0.4, -0.3}, {0.9, 0.1}};
  d.gamma = {0.5, 0.0, 1.0, 0.25};
  for (const auto& o : overlaps(cov)) d.ray.push_back(o.ray);
  d.shape = Values(2);
  d.shape << cplx{1.0, 0.0}, cplx{0.5, -0.25};
  return d;
}

inline LevelPartition alternating_levels() { return classify_levels({true, false, true, false}); }

// Sector functions with G_{p+1} - G_p = Delta_p for |eps| below the oracle ray
// length. Rays sit at offset * (half width) from the bisector of each overlap.
class OracleSections {
 public:
  OracleSections(GoodCovering cov, SectionFn delta, std::function<Values(cplx, cplx)> g, int dim,
                 double offset = -0.137, double length = 0.95)
      : cov_(std::move(cov)), delta_(std::move(delta)), g_(std::move(g)), dim_(dim) {
    for (const auto& o : overlaps(cov_)) {
      const double h = 0.5 * (o.upper - o.lower);
      ray_.push_back(o.ray + offset * h);
      len_.push_back(length * o.radius);
    }
  }

  Values operator()(int p, cplx t, cplx e) const {
    const int n = int(cov_.size());
    Values s = g_(t, e);
    for (int j = 0; j < n; ++j) s += cauchy(j, t, e);
    const Sector& E = cov_[std::size_t(p)];
    const double a = wrap_angle(std::arg(e) - E.bisector);
    if (a > wrap_angle(ray_[p] - E.bisector)) s -= delta_(p, t, e);
    const int lo = (p + n - 1) % n;
    if (a < wrap_angle(ray_[lo] - E.bisector)) s += delta_(lo, t, e);
    return s;
  }

 private:
  Values cauchy(int j, cplx t, cplx e) const {
    const cplx dir = std::polar(1.0, ray_[j]);
    const cplx two_pi_i{0.0, 2.0 * std::numbers::pi};
    Values out(dim_);
    const double s_lo = std::sqrt(len_[j] * 1e-15), s_hi = std::sqrt(len_[j]);
    std::vector<double> bp{s_lo};
    const double sc = std::sqrt(std::abs(e));
    if (sc > s_lo && sc < s_hi) bp.push_back(sc);
    bp.push_back(s_hi);
    QuadOptions opt;
    opt.abs_tol = 1e-17;
    opt.rel_tol = 1e-14;
    opt.max_intervals = 20000;
    for (int c = 0; c < dim_; ++c) {
      const auto r = integrate(
          [&](double s) {
            const cplx xi = s * s * dir;
            return delta_(j, t, xi)(c) / (xi - e) * 2.0 * s * dir / two_pi_i;
          },
          bp, opt);
      out(c) = r.value;
    }
    return out;
  }

  GoodCovering cov_;
  SectionFn delta_;
  std::function<Values(cplx, cplx)> g_;
  int dim_;
  std::vector<double> ray_, len_;
};

inline Values smooth_glue(cplx t, cplx e) {
  Values v(2);
  v << std::cos(e) + t * e * e, cplx{0.3, 0.0} - e / (2.0 - e);
  return v;
}

inline Cocycle two_level_cocycle(double scale = 1.0) {
  const GoodCovering cov = four_sector_covering();
  PlantedDelta d = two_level_delta(cov);
  for (auto& c : d.c) c *= scale;
  SectionFn delta = [d](int p, cplx t, cplx e) { return d(p, t, e); };
  OracleSections G(cov, delta, [scale](cplx t, cplx e) { return Values(scale * smooth_glue(t, e)); }, 2);
  Cocycle c;
  c.covering = cov;
  c.Delta = delta;
  c.G = [G](int p, cplx t, cplx e) { return G(p, t, e); };
  c.levels = alternating_levels();
  c.active.assign(4, true);
  c.dim = 2;
  return c;
}

}  // namespace qgevrey::testing
