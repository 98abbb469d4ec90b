#include "qgevrey/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qgevrey/errors.hpp"
#include "qgevrey/quadrature.hpp"

namespace qgevrey {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const cplx kTwoPiI{0.0, kTwoPi};

// Representative of a - b in (0, 2 pi].
double ccw_gap(double a, double b) {
  double d = std::fmod(a - b, kTwoPi);
  if (d <= 0.0) d += kTwoPi;
  return d;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

}  // namespace

double norm(const Values& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

Level LevelPartition::level_of(int p) const {
  if (std::find(I1.begin(), I1.end(), p) != I1.end()) return Level::two;
  if (std::find(I2.begin(), I2.end(), p) != I2.end()) return Level::one;
  throw InvalidArgument("overlap " + std::to_string(p) + " is in neither I1 nor I2");
}

LevelPartition classify_levels(const std::vector<bool>& flags) {
  if (flags.empty()) throw InvalidArgument("classify_levels needs one flag per overlap");
  LevelPartition lp;
  for (std::size_t p = 0; p < flags.size(); ++p) (flags[p] ? lp.I1 : lp.I2).push_back(int(p));
  if (lp.I1.empty()) lp.warnings.push_back("I1 empty: single level k1, multilevel split degenerates");
  if (lp.I2.empty()) lp.warnings.push_back("I2 empty: single level k2, multilevel split degenerates");
  return lp;
}

Cocycle cocycle_from_sections(const GoodCovering& cov, SectionFn G, LevelPartition levels, int dim) {
  Cocycle c;
  c.covering = cov;
  c.G = G;
  const int n = int(cov.size());
  c.Delta = [G, n](int p, cplx t, cplx e) { return Values(G((p + 1) % n, t, e) - G(p, t, e)); };
  c.levels = std::move(levels);
  c.active.assign(cov.size(), true);
  c.dim = dim;
  return c;
}

Cocycle level_filter(const Cocycle& c, Level level) {
  Cocycle f = c;
  const std::size_t n = c.covering.size();
  if (f.active.size() != n) f.active.assign(n, true);
  for (std::size_t p = 0; p < n; ++p) {
    f.active[p] = f.active[p] && c.levels.level_of(int(p)) == level;
  }
  auto act = f.active;
  auto base = c.Delta;
  const int dim = c.dim;
  f.Delta = [base, act, dim](int p, cplx t, cplx e) {
    return act[std::size_t(p)] ? base(p, t, e) : Values(Values::Zero(dim));
  };
  return f;
}

std::vector<Overlap> overlaps(const GoodCovering& cov) {
  const std::size_t n = cov.size();
  if (n < 2) throw InvalidArgument("a cocycle needs at least two sectors");
  std::vector<Overlap> out(n);
  for (std::size_t p = 0; p < n; ++p) {
    const Sector& a = cov[p];
    const Sector& b = cov[p + 1];
    const double bn = a.bisector + ccw_gap(b.bisector, a.bisector);
    Overlap o;
    o.lower = bn - b.half_opening;
    o.upper = a.bisector + a.half_opening;
    if (!(o.lower < o.upper)) {
      throw InvalidArgument("E_" + std::to_string(p) + " and E_" + std::to_string((p + 1) % n) + " do not overlap");
    }
    o.ray = 0.5 * (o.lower + o.upper);
    o.radius = std::min(a.radius, b.radius);
    if (!std::isfinite(o.radius)) throw InvalidArgument("Cauchy-Heine rays need bounded sectors");
    out[p] = o;
  }
  return out;
}

double certify_sequential_bound(const Cocycle& c, const SequentialBound& b, const GevreyScale& scale,
                                const std::vector<BoundProbe>& probes) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto& pr = probes[i];
    if (!c.active.empty() && !c.active[std::size_t(pr.p)]) continue;
    if (!(std::abs(pr.t) < scale.radius(pr.N))) {
      throw DomainViolation("bound probe " + std::to_string(i) + ": t outside D(0, r_" + std::to_string(pr.N) + ")");
    }
    const double n = norm(c.Delta(pr.p, pr.t, pr.eps));
    const double lb = std::log(b.C) + pr.N * (std::log(b.H) + std::log(std::abs(pr.eps)));
    const double v = std::log(std::max(n, kRemainderFloor)) - lb;
    worst = std::max(worst, v);
    if (v > 0.0) {
      throw CertificationFailure("Delta_" + std::to_string(pr.p) + " exceeds C H^N |eps|^N at N = " +
                                 std::to_string(pr.N) + " (probe " + std::to_string(i) + ")");
    }
  }
  return worst;
}

CauchyHeine::CauchyHeine(Cocycle c, CauchyHeineOptions opt) : c_(std::move(c)), opt_(opt) {
  ov_ = overlaps(c_.covering);
  const std::size_t n = ov_.size();
  if (c_.active.size() != n) c_.active.assign(n, true);
  if (!(opt_.ray_fraction > 0.0 && opt_.ray_fraction < 1.0)) throw InvalidArgument("ray_fraction must lie in (0,1)");
  if (!(opt_.bend_fraction > 0.0 && opt_.bend_fraction < 1.0)) throw InvalidArgument("bend_fraction must lie in (0,1)");
  if (!(opt_.inner_cut > 0.0 && opt_.inner_cut < 1.0)) throw InvalidArgument("inner_cut must lie in (0,1)");
  if (!(opt_.panel_ratio > 1.0)) throw InvalidArgument("panel_ratio must exceed 1");

  auto ray = [&](double theta, double rho, Contour& out) {
    const double s_hi = std::sqrt(rho), s_lo = std::sqrt(rho * opt_.inner_cut);
    const double rs = std::sqrt(opt_.panel_ratio);
    const int panels = int(std::ceil(std::log(s_hi / s_lo) / std::log(rs)));
    std::vector<double> edges(panels + 1);
    for (int i = 0; i <= panels; ++i) edges[i] = s_lo * std::pow(s_hi / s_lo, double(i) / panels);
    const FixedRule r = gauss_legendre_panels(edges);
    const cplx dir = std::polar(1.0, theta);
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      const double s = r.nodes[i];
      out.xi.push_back(s * s * dir);
      out.w.push_back(r.weights[i] * 2.0 * s * dir / kTwoPiI);
    }
  };
  auto arc = [&](double from, double to, double rho, Contour& out) {
    std::vector<double> edges(opt_.arc_panels + 1);
    for (int i = 0; i <= opt_.arc_panels; ++i) edges[i] = from + (to - from) * i / opt_.arc_panels;
    const FixedRule r = gauss_legendre_panels(edges);
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      const cplx xi = std::polar(rho, r.nodes[i]);
      out.xi.push_back(xi);
      out.w.push_back(r.weights[i] * cplx{0.0, 1.0} * xi / kTwoPiI);
    }
  };

  rho_.resize(n);
  straight_.resize(n);
  up_.resize(n);
  down_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Overlap& o = ov_[j];
    rho_[j] = opt_.ray_fraction * o.radius;
    ray(o.ray, rho_[j], straight_[j]);
    const auto [lo, hi] = bend_angles(int(j));
    ray(hi, rho_[j], up_[j]);
    arc(hi, o.ray, rho_[j], up_[j]);
    ray(lo, rho_[j], down_[j]);
    arc(lo, o.ray, rho_[j], down_[j]);
  }
}

std::pair<double, double> CauchyHeine::bend_angles(int p) const {
  const Overlap& o = ov_[std::size_t(p) % ov_.size()];
  return {o.ray - opt_.bend_fraction * (o.ray - o.lower), o.ray + opt_.bend_fraction * (o.upper - o.ray)};
}

double CauchyHeine::radius() const { return *std::min_element(rho_.begin(), rho_.end()); }

int CauchyHeine::region(int p, cplx eps) const {
  const int n = int(ov_.size());
  p = ((p % n) + n) % n;
  const Sector& E = c_.covering[std::size_t(p)];
  if (!(std::abs(eps) < radius())) {
    throw DomainViolation("|eps| = " + fmt(std::abs(eps)) + " beyond the Cauchy-Heine radius " + fmt(radius()));
  }
  const double a = wrap_angle(std::arg(eps) - E.bisector);
  if (!(std::abs(a) < E.half_opening)) throw DomainViolation("eps outside E_" + std::to_string(p));
  const int lo = (p + n - 1) % n;
  const double up = wrap_angle(ov_[p].ray - E.bisector);
  const double dn = wrap_angle(ov_[lo].ray - E.bisector);
  const double tol = opt_.cut_tolerance;
  if (std::abs(a - up) < tol || std::abs(a - dn) < tol) {
    throw DomainViolation("eps on a cut ray of E_" + std::to_string(p));
  }
  if (a > up) {
    if (a >= wrap_angle(bend_angles(p).second - E.bisector) - tol) {
      throw DomainViolation("eps past the bent ray of overlap " + std::to_string(p));
    }
    return 1;
  }
  if (a < dn) {
    if (a <= wrap_angle(bend_angles(lo).first - E.bisector) + tol) {
      throw DomainViolation("eps past the bent ray of overlap " + std::to_string(lo));
    }
    return -1;
  }
  return 0;
}

const CauchyHeine::Cache& CauchyHeine::cache(cplx t) const {
  std::lock_guard lock(mu_);
  auto& slot = cache_[{t.real(), t.imag()}];
  if (!slot) {
    auto c = std::make_unique<Cache>();
    const std::size_t n = ov_.size();
    auto fill = [&](const std::vector<Contour>& cs, std::vector<std::vector<Values>>& dst) {
      dst.resize(n);
      for (std::size_t j = 0; j < n; ++j) {
        if (!c_.active[j]) continue;
        dst[j].reserve(cs[j].xi.size());
        for (const cplx& xi : cs[j].xi) dst[j].push_back(c_.Delta(int(j), t, xi));
      }
    };
    fill(straight_, c->straight);
    fill(up_, c->up);
    fill(down_, c->down);
    slot = std::move(c);
  }
  return *slot;
}

template <class Kernel>
Values CauchyHeine::accumulate(int p, cplx t, cplx eps, const Kernel& kernel) const {
  const int n = int(ov_.size());
  p = ((p % n) + n) % n;
  const int reg = region(p, eps);
  const Cache& C = cache(t);
  Values sum = Values::Zero(c_.dim);
  for (int j = 0; j < n; ++j) {
    if (!c_.active[std::size_t(j)]) continue;
    const Contour* ct = &straight_[j];
    const std::vector<Values>* dv = &C.straight[j];
    if (j == p && reg == 1) {
      ct = &up_[j];
      dv = &C.up[j];
    } else if (j == (p + n - 1) % n && reg == -1) {
      ct = &down_[j];
      dv = &C.down[j];
    }
    for (std::size_t i = 0; i < ct->xi.size(); ++i) sum += (ct->w[i] * kernel(ct->xi[i])) * (*dv)[i];
  }
  return sum;
}

Values CauchyHeine::psi(int p, cplx t, cplx eps) const {
  return accumulate(p, t, eps, [eps](cplx xi) { return 1.0 / (xi - eps); });
}

Values CauchyHeine::remainder(int p, int N, cplx t, cplx eps) const {
  if (N < 0) throw InvalidArgument("remainder order must be >= 0");
  return accumulate(p, t, eps, [eps, N](cplx xi) { return std::pow(eps / xi, N + 1) / (xi - eps); });
}

Values CauchyHeine::coefficient(int n, cplx t) const {
  if (n < 0) throw InvalidArgument("coefficient index must be >= 0");
  const Cache& C = cache(t);
  Values sum = Values::Zero(c_.dim);
  for (std::size_t j = 0; j < ov_.size(); ++j) {
    if (!c_.active[j]) continue;
    const Contour& ct = straight_[j];
    for (std::size_t i = 0; i < ct.xi.size(); ++i) sum += (ct.w[i] * std::pow(ct.xi[i], -n - 1)) * C.straight[j][i];
  }
  return sum;
}

std::vector<SplitProbe> split_probes(const CauchyHeine& ch, const std::vector<cplx>& ts,
                                     const std::vector<double>& radii) {
  const int n = int(ch.cuts().size());
  const auto& cov = ch.cocycle().covering;
  std::vector<SplitProbe> out;
  for (int p = 0; p < n; ++p) {
    const Sector& E = cov[std::size_t(p)];
    const double up = E.bisector + wrap_angle(ch.cuts()[p].ray - E.bisector);
    const double dn = E.bisector + wrap_angle(ch.cuts()[(p + n - 1) % n].ray - E.bisector);
    const double up_b = E.bisector + wrap_angle(ch.bend_angles(p).second - E.bisector);
    const double dn_b = E.bisector + wrap_angle(ch.bend_angles((p + n - 1) % n).first - E.bisector);
    std::vector<double> angles;
    for (double f : {0.25, 0.5, 0.75}) angles.push_back(dn + f * (up - dn));
    for (double f : {1.0 / 3.0, 2.0 / 3.0}) {
      angles.push_back(up + f * (up_b - up));
      angles.push_back(dn + f * (dn_b - dn));
    }
    for (const cplx& t : ts) {
      for (double r : radii) {
        for (double a : angles) out.push_back({p, t, std::polar(r, a)});
      }
    }
  }
  return out;
}

Values SplitResult::glue_p(int p, cplx t, cplx eps) const {
  return Values(c_.G(p, t, eps) - ch1_->psi(p, t, eps) - ch2_->psi(p, t, eps));
}

Values SplitResult::glue(cplx t, cplx eps) const {
  const auto& cuts = ch1_->cuts();
  const int n = int(cuts.size());
  const double a = std::arg(eps);
  // Near a cut use the side whose bent contour keeps away from eps.
  for (int p = 0; p < n; ++p) {
    const double d = wrap_angle(a - cuts[p].ray);
    const auto [lo, hi] = ch1_->bend_angles(p);
    if (d > 0.0 && d < 0.5 * (hi - cuts[p].ray)) return glue_p(p, t, eps);
    if (d <= 0.0 && -d < 0.5 * (cuts[p].ray - lo)) return glue_p((p + 1) % n, t, eps);
  }
  for (int p = 0; p < n; ++p) {
    const Sector& E = c_.covering[std::size_t(p)];
    const double x = wrap_angle(a - E.bisector);
    if (std::abs(x) >= E.half_opening) continue;
    const double up = wrap_angle(cuts[p].ray - E.bisector);
    const double dn = wrap_angle(cuts[(p + n - 1) % n].ray - E.bisector);
    if (x > dn && x < up) return glue_p(p, t, eps);
  }
  throw DomainViolation("no sector holds eps for the glue");
}

Values SplitResult::piece(Level level, int p, cplx t, cplx eps) const {
  return splitter(level).psi(p, t, eps);
}

Values SplitResult::coefficient(Level level, int n, cplx t) const {
  if (!(std::abs(t) < scale(level).radius(n))) {
    throw DomainViolation("phi_" + std::to_string(n) + " requested outside D(0, r_" + std::to_string(n) + ")");
  }
  return splitter(level).coefficient(n, t);
}

Values SplitResult::expansion_remainder(Level level, int p, int N, cplx t, cplx eps) const {
  return splitter(level).remainder(p, N, t, eps);
}

std::vector<Values> SplitResult::glue_taylor(cplx t, int n_max, double radius, int points) const {
  std::vector<Values> samples(static_cast<std::size_t>(points));
  std::vector<double> phi(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    phi[k] = kTwoPi * (k + 0.37) / points;
    samples[k] = glue(t, std::polar(radius, phi[k]));
  }
  std::vector<Values> out;
  for (int m = 0; m <= n_max; ++m) {
    Values s = Values::Zero(c_.dim);
    for (int k = 0; k < points; ++k) s += std::polar(1.0, -m * phi[k]) * samples[k];
    out.push_back(s / (points * std::pow(radius, m)));
  }
  return out;
}

SplitResult multilevel_split(const Cocycle& c, const GevreyScale& level1, const GevreyScale& level2,
                             const std::vector<cplx>& ts, const SplitOptions& opt) {
  if (!c.G) throw InvalidArgument("multilevel_split needs the sector functions G_p");
  if (level1.level != Level::one || level2.level != Level::two) {
    throw InvalidArgument("scales must be given as (level one, level two)");
  }
  const std::size_t n = c.covering.size();
  {
    std::vector<int> seen(n, 0);
    for (int p : c.levels.I1) ++seen.at(std::size_t(p));
    for (int p : c.levels.I2) ++seen.at(std::size_t(p));
    for (std::size_t p = 0; p < n; ++p) {
      if (seen[p] != 1) throw InvalidArgument("I1, I2 must partition the overlaps");
    }
  }
  if (ts.empty()) throw InvalidArgument("multilevel_split needs at least one t");

  SplitResult s;
  s.c_ = c;
  if (s.c_.active.size() != n) s.c_.active.assign(n, true);
  s.s1_ = level1;
  s.s2_ = level2;
  s.ch1_ = std::make_shared<CauchyHeine>(level_filter(s.c_, Level::one), opt.ch);
  s.ch2_ = std::make_shared<CauchyHeine>(level_filter(s.c_, Level::two), opt.ch);
  SplitReport& r = s.report_;
  r.warnings = c.levels.warnings;
  if (c.levels.degenerate()) r.warnings.push_back("single-level fallback");
  r.eps1 = 0.5 * s.ch1_->radius();

  const auto probes = split_probes(*s.ch1_, ts, {r.eps1, 0.5 * r.eps1, 0.25 * r.eps1});
  r.probes = int(probes.size());
  for (const auto& pr : probes) {
    const Values G = s.c_.G(pr.p, pr.t, pr.eps);
    const Values p1 = s.ch1_->psi(pr.p, pr.t, pr.eps), p2 = s.ch2_->psi(pr.p, pr.t, pr.eps);
    r.reconstruction_error = std::max(r.reconstruction_error, norm(G - (s.glue(pr.t, pr.eps) + p1 + p2)));
    const int reg = s.ch1_->region(pr.p, pr.eps);
    if (reg == 0) continue;
    const int lo = reg == 1 ? pr.p : int((pr.p + n - 1) % n);
    const int hi = int((lo + 1) % n);
    for (Level L : {Level::one, Level::two}) {
      const CauchyHeine& ch = s.splitter(L);
      const Values d = ch.psi(hi, pr.t, pr.eps) - ch.psi(lo, pr.t, pr.eps) - ch.cocycle().Delta(lo, pr.t, pr.eps);
      double& slot = r.difference_error[L == Level::one ? 0 : 1];
      slot = std::max(slot, norm(d));
    }
    r.glue_mismatch = std::max(r.glue_mismatch, norm(s.glue_p(hi, pr.t, pr.eps) - s.glue_p(lo, pr.t, pr.eps)));
  }

  for (const cplx& t : ts) {
    auto circle_max = [&](double rad) {
      double m = 0.0;
      for (int k = 0; k < opt.circle_points; ++k) {
        m = std::max(m, norm(s.glue(t, std::polar(rad, kTwoPi * (k + 0.37) / opt.circle_points))));
      }
      return m;
    };
    r.glue_outer_max = std::max(r.glue_outer_max, circle_max(r.eps1));
    for (int j = 1; j <= opt.cascade; ++j) {
      r.glue_inner_max = std::max(r.glue_inner_max, circle_max(r.eps1 * std::pow(2.0, -j)));
    }
    // Negative Laurent modes of a on |eps| = eps1/2 vanish for a holomorphic glue.
    const double rad = 0.5 * r.eps1;
    std::vector<Values> smp;
    std::vector<double> phi;
    for (int k = 0; k < opt.circle_points; ++k) {
      phi.push_back(kTwoPi * (k + 0.37) / opt.circle_points);
      smp.push_back(s.glue(t, std::polar(rad, phi.back())));
    }
    for (int m = 1; m <= 8; ++m) {
      Values acc = Values::Zero(s.c_.dim);
      for (int k = 0; k < opt.circle_points; ++k) acc += std::polar(1.0, m * phi[k]) * smp[k];
      r.glue_laurent = std::max(r.glue_laurent, norm(acc) / opt.circle_points);
    }
  }

  std::vector<std::string> fails;
  const double tol = opt.tolerance;
  if (r.reconstruction_error > tol) fails.push_back("reconstruction error " + fmt(r.reconstruction_error));
  if (r.difference_error[0] > tol) fails.push_back("level-one difference realization " + fmt(r.difference_error[0]));
  if (r.difference_error[1] > tol) fails.push_back("level-two difference realization " + fmt(r.difference_error[1]));
  if (r.glue_mismatch > tol) fails.push_back("a_p mismatch across an overlap " + fmt(r.glue_mismatch));
  if (r.glue_laurent > tol) fails.push_back("glue has a singular Laurent part " + fmt(r.glue_laurent));
  if (r.glue_inner_max > r.glue_outer_max * (1.0 + 1e-6) + tol) {
    fails.push_back("a grows towards 0: " + fmt(r.glue_inner_max) + " > " + fmt(r.glue_outer_max));
  }
  r.passed = fails.empty();
  if (!r.passed && opt.throw_on_failure) {
    std::string msg = "multilevel split failed:";
    for (const auto& f : fails) msg += " " + f + ";";
    throw CertificationFailure(msg);
  }
  return s;
}

RemainderTable split_remainders(const SplitResult& s, Level level, const std::vector<BoundProbe>& probes) {
  RemainderTable t;
  const GevreyScale& sc = s.scale(level);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto& pr = probes[i];
    if (!(std::abs(pr.t) < sc.radius(pr.N))) {
      throw DomainViolation("probe " + std::to_string(i) + ": t outside D(0, r_" + std::to_string(pr.N) + ")");
    }
    t.rows.push_back({pr.N, pr.eps, pr.t, norm(s.expansion_remainder(level, pr.p, pr.N, pr.t, pr.eps))});
  }
  return t;
}

}  // namespace qgevrey
