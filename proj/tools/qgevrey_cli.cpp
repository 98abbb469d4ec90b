// Batch front-end: every subcommand prints one JSON document on stdout and
// writes its tables under --out. Exit 0 when every certification in scope
// passes, 1 on a certification failure, 2 on input or configuration errors.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qgevrey/errors.hpp"
#include "qgevrey/json_io.hpp"

using namespace qgevrey;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kCertification = 1, kInput = 2;

struct Globals {
  std::string out = "qgevrey-out";
  std::uint64_t seed = 1;
  bool plot = false;
  double tol = 0.0;  // 0 keeps each stage's default
};

cplx parse_complex(const std::string& s) {
  std::stringstream ss(s);
  double re = 0.0, im = 0.0;
  char comma = 0;
  ss >> re;
  if (ss.fail()) throw InvalidArgument("expected re[,im], got \"" + s + "\"");
  if (ss >> comma) {
    if (comma != ',' || !(ss >> im)) throw InvalidArgument("expected re[,im], got \"" + s + "\"");
  }
  return {re, im};
}

fs::path out_dir(const Globals& g) {
  fs::path d(g.out);
  std::error_code ec;
  fs::create_directories(d, ec);
  if (ec) throw InvalidArgument("cannot create output directory " + g.out);
  return d;
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream os(p);
  if (!os) throw InvalidArgument("cannot write " + p.string());
  os << j.dump(2) << '\n';
}

std::ofstream open_csv(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw InvalidArgument("cannot write " + p.string());
  os.precision(17);
  return os;
}

// --- theta ------------------------------------------------------------------

int run_theta(const Globals& g, double q, double k, const std::vector<std::string>& zs, int m, int check,
              double delta, json& out) {
  const ThetaSpec spec = make_theta_spec(q, k);
  out = {{"q", q}, {"k", k}, {"points", json::array()}};
  for (const auto& s : zs) {
    const cplx z = parse_complex(s);
    const ScaledComplex v = theta_scaled(q, k, z);
    json pt = {{"z", to_json(z)},
               {"mantissa", to_json(v.mantissa)},
               {"log_scale", v.log_scale},
               {"log_abs", v.log_abs()},
               {"zero_spiral_margin", zero_spiral_margin(q, k, z)}};
    const cplx val = v.value();
    pt["value"] = std::isfinite(std::abs(val)) ? to_json(val) : json(nullptr);
    if (std::abs(z) >= spec.annulus_min && std::abs(z) <= spec.annulus_max) {
      const QDiffResidual r = theta_qdiff_residual(spec, z, m);
      pt["qdiff"] = {{"m", m}, {"residual", r.value}, {"relative", r.relative}};
    }
    out["points"].push_back(pt);
  }
  if (check <= 0) return kOk;
  // Lower-bound check on a random held-out grid of admissible points.
  const GrowthCalibration cal = calibrate_growth_constant(q, k, delta);
  const ThetaSpec cs = with_growth_constant(spec, cal, delta);
  std::mt19937_64 rng(g.seed);
  std::uniform_real_distribution<double> lr(-12.0, 12.0), th(-std::numbers::pi, std::numbers::pi);
  int checked = 0, violations = 0;
  double worst = -1e300;
  while (checked < check) {
    const cplx z = std::polar(std::exp(lr(rng)), th(rng));
    if (zero_spiral_margin(q, k, z) <= delta) continue;
    const ThetaLowerBound b = theta_lower_bound(cs, z, delta);
    worst = std::max(worst, b.log_rhs - b.log_lhs);
    if (!b.margin_ok) ++violations;
    ++checked;
  }
  out["growth_check"] = {{"delta", delta}, {"Cqk", cal.Cqk}, {"calibration_points", cal.admissible_points},
                         {"points", checked}, {"violations", violations}, {"worst_log_ratio", worst},
                         {"seed", g.seed}};
  return violations == 0 ? kOk : kCertification;
}

// --- fourier ----------------------------------------------------------------

Symbol load_symbol(const std::string& name, double beta, double mu, double C) {
  if (fs::exists(name)) return symbol_from_csv(name, DecayProfile{C, mu, beta});
  return builtin_symbol(name, beta, mu);
}

int run_fourier(const Globals& g, const std::string& sym, double beta, double mu, double C, double bp,
                const std::vector<std::string>& zs, json& out) {
  const Symbol f = load_symbol(sym, beta, mu, C);
  out = {{"symbol", f.name()}, {"beta_prime", bp}, {"points", json::array()}};
  for (const auto& s : zs) {
    const cplx z = parse_complex(s);
    json r = to_json(g.tol > 0.0 ? inverse_fourier(f, z, bp, g.tol) : inverse_fourier(f, z, bp));
    r["z"] = to_json(z);
    out["points"].push_back(r);
  }
  return kOk;
}

// --- qlaplace ---------------------------------------------------------------

// Borel-plane functions: "one", "monomial:n", "pole:re,im" (u/(u - u*)) or a
// CSV of samples "r,re,im" along the ray, linear in r, constant outside.
struct RayFn {
  std::function<cplx(cplx)> f;
  GrowthCertificate cert;
  std::string name;
};

RayFn load_ray_function(const std::string& spec, double k, double d) {
  RayFn out;
  out.name = spec;
  out.cert.k = k;
  out.cert.rho = 1.0;
  if (spec == "one") {
    out.f = [](cplx) { return cplx{1.0, 0.0}; };
    out.cert.K = 1.0;
    return out;
  }
  if (spec.rfind("monomial:", 0) == 0) {
    const int n = std::stoi(spec.substr(9));
    if (n < 0) throw InvalidArgument("monomial degree must be non-negative");
    out.f = [n](cplx u) { return std::pow(u, n); };
    out.cert.K = 1.0;
    out.cert.alpha = n;
    return out;
  }
  if (spec.rfind("pole:", 0) == 0) {
    const cplx a = parse_complex(spec.substr(5));
    if (std::abs(a) == 0.0) throw InvalidArgument("pole at the origin");
    out.f = [a](cplx u) { return u / (u - a); };
    const cplx dir = std::polar(1.0, d);
    double K = 0.0;
    for (double s = -30.0; s <= 30.0; s += 0.01) K = std::max(K, std::abs(out.f(std::exp(s) * dir)));
    if (!std::isfinite(K) || K > 1e12) throw InvalidArgument("pole lies on the integration ray");
    out.cert.K = 1.25 * K;
    return out;
  }
  std::ifstream is(spec);
  if (!is) throw InvalidArgument("unknown function \"" + spec + "\" (one, monomial:n, pole:re,im or a CSV path)");
  std::vector<double> r;
  std::vector<cplx> v;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
    std::stringstream ss(line);
    double a, b, c;
    char c1, c2;
    if (!(ss >> a >> c1 >> b >> c2 >> c) || c1 != ',' || c2 != ',') throw InvalidArgument("bad CSV row: " + line);
    if (!r.empty() && !(a > r.back())) throw InvalidArgument("CSV radii must increase");
    r.push_back(a);
    v.push_back({b, c});
  }
  if (r.size() < 2) throw InvalidArgument("CSV needs at least two rows");
  double K = 0.0;
  for (cplx x : v) K = std::max(K, std::abs(x));
  out.cert.K = std::max(K, 1e-300);
  out.f = [r, v](cplx u) {
    const double a = std::abs(u);
    if (a <= r.front()) return v.front();
    if (a >= r.back()) return v.back();
    const auto it = std::upper_bound(r.begin(), r.end(), a);
    const std::size_t i = std::size_t(it - r.begin());
    const double w = (a - r[i - 1]) / (r[i] - r[i - 1]);
    return (1.0 - w) * v[i - 1] + w * v[i];
  };
  return out;
}

int run_qlaplace(const Globals& g, double q, double k, double d, const std::string& fname, const std::string& Ts,
                 double delta, json& out) {
  const RayFn f = load_ray_function(fname, k, d);
  const QLaplaceSpec spec = make_qlaplace_spec(q, k, d, delta, g.tol > 0.0 ? g.tol : 1e-12);
  const cplx T = parse_complex(Ts);
  out = to_json(qlaplace(spec, f.f, f.cert, T));
  out["T"] = to_json(T);
  out["f"] = f.name;
  return kOk;
}

// --- geometry ---------------------------------------------------------------

int run_geometry(const std::string& path, json& out) {
  const Scenario sc = scenario_from_json(read_json_file(path));
  const CoveringReport cr = validate_good_covering(sc.covering);
  const ScenarioCheck chk = check_scenario(sc);
  const auto meet = sc.u_intersections();
  const LevelPartition lv = sc.levels();
  out = {{"covering", to_json(cr)}, {"overlaps", json::array()}, {"kernels", json::array()}};
  const auto ov = overlaps(sc.covering);
  for (std::size_t p = 0; p < ov.size(); ++p) {
    out["overlaps"].push_back({{"p", p},
                               {"lower", ov[p].lower},
                               {"upper", ov[p].upper},
                               {"ray", ov[p].ray},
                               {"radius", ov[p].radius},
                               {"u_intersection", bool(meet[p])},
                               {"level", to_string(lv.level_of(int(p)))}});
  }
  bool kernels_ok = true;
  for (int p = 0; p < sc.size(); ++p) {
    const KernelCertification c = certify_kernel(sc, p);
    kernels_ok = kernels_ok && c.ok();
    out["kernels"].push_back({{"p", p},
                              {"points", c.points},
                              {"growth_violations", c.growth_violations},
                              {"discrepancy_violations", c.discrepancy_violations},
                              {"worst_growth", c.worst_growth},
                              {"worst_discrepancy", c.worst_discrepancy > -1e299 ? json(c.worst_discrepancy) : json(nullptr)}});
  }
  out["partition"] = {{"I1", lv.I1}, {"I2", lv.I2}, {"warnings", lv.warnings}};
  out["scenario_failures"] = chk.failures;
  out["passed"] = cr.valid() && chk.ok() && kernels_ok;
  return out["passed"].get<bool>() ? kOk : kCertification;
}

// --- hypotheses -------------------------------------------------------------

int run_hypotheses(const std::string& path, json& out) {
  const EquationSpec e = equation_from_json(read_json_file(path));
  const HypothesisReport r = validate_hypotheses(e, default_m_grid());
  out = to_json(r);
  return r.ok() ? kOk : kCertification;
}

// --- diff -------------------------------------------------------------------

void plot_rate(const fs::path& p, const RateCascade& rc) {
  std::ofstream os = open_csv(p);
  os << "# log|eps t|  log||u_{p+1} - u_p||\n";
  for (std::size_t i = 0; i < rc.j.size(); ++i) os << std::log(rc.abs_eps_t[i]) << ' ' << std::log(rc.norm[i]) << '\n';
}

// Criteria covered: direct vs decomposed agreement within 10x the composed
// tolerance, fitted rate within 15% of the level order.
json diff_stage(const Globals& g, const Model& m, const fs::path& dir, bool& ok) {
  const Scenario& sc = m.scenario();
  json rows = json::array();
  for (int p = 0; p < sc.size(); ++p) {
    const DifferenceTable tab = consecutive_difference(m, p, overlap_grid(sc, p));
    tab.write_csv((dir / ("diff_p" + std::to_string(p) + ".csv")).string());
    const RateCascade rc = rate_cascade(m, p);
    rc.write_csv((dir / ("rate_p" + std::to_string(p) + ".csv")).string());
    if (g.plot) plot_rate(dir / ("rate_p" + std::to_string(p) + ".dat"), rc);
    const double k = sc.frame.k(rc.expected);
    const double agree = tab.worst_agreement();
    const bool rate_ok = std::abs(rc.fit.k_fit - k) <= 0.15 * k;
    ok = ok && agree <= 10.0 && rate_ok;
    rows.push_back({{"p", p},
                    {"empty_u_intersection", tab.empty_case},
                    {"level", to_string(rc.expected)},
                    {"worst_agreement", agree},
                    {"agreement_ok", agree <= 10.0},
                    {"rate_fit", to_json(rc.fit)},
                    {"expected_k", k},
                    {"rate_ok", rate_ok}});
  }
  return rows;
}

int run_diff(const Globals& g, const std::string& path, json& out) {
  const Scenario sc = scenario_from_json(read_json_file(path));
  const fs::path dir = out_dir(g);
  const Model m(sc);
  bool ok = true;
  out = {{"overlaps", diff_stage(g, m, dir, ok)}, {"passed", ok}};
  write_json(dir / "rates.json", out);
  return ok ? kOk : kCertification;
}

// --- split ------------------------------------------------------------------

void write_vector_rows(std::ofstream& os, const std::string& prefix, const std::vector<cplx>& zg, const Values& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    os << prefix << ',' << i << ',' << zg[std::size_t(i)].real() << ',' << zg[std::size_t(i)].imag() << ','
       << v[i].real() << ',' << v[i].imag() << '\n';
  }
}

void export_split(const Globals& g, const Model& m, const TheoremReport& r, const TheoremOptions& opt,
                  const fs::path& dir) {
  const SplitResult& s = *r.result;
  const auto& zg = m.z_grid();
  const std::vector<SplitProbe> probes = split_probes(s.splitter(Level::one), {opt.split_ts.front()}, opt.eps_radii);
  std::ofstream psi = open_csv(dir / "psi.csv");
  std::ofstream glue = open_csv(dir / "glue.csv");
  psi << "level,p,re_t,im_t,re_eps,im_eps,iz,re_z,im_z,re,im\n";
  glue << "p,re_t,im_t,re_eps,im_eps,iz,re_z,im_z,re,im\n";
  for (const SplitProbe& pr : probes) {
    std::ostringstream key;
    key.precision(17);
    key << pr.p << ',' << pr.t.real() << ',' << pr.t.imag() << ',' << pr.eps.real() << ',' << pr.eps.imag();
    for (Level L : {Level::one, Level::two}) {
      write_vector_rows(psi, to_string(L) + ',' + key.str(), zg, s.piece(L, pr.p, pr.t, pr.eps));
    }
    write_vector_rows(glue, key.str(), zg, s.glue(pr.t, pr.eps));
  }
  std::ofstream coef = open_csv(dir / "coefficients.csv");
  coef << "level,n,re_t,im_t,iz,re_z,im_z,re,im\n";
  const cplx t = opt.split_ts.back();
  for (Level L : {Level::one, Level::two}) {
    for (int n = 0; n <= opt.n_max && std::abs(t) < s.scale(L).radius(n); ++n) {
      std::ostringstream key;
      key.precision(17);
      key << to_string(L) << ',' << n << ',' << t.real() << ',' << t.imag();
      write_vector_rows(coef, key.str(), zg, s.coefficient(L, n, t));
    }
  }
  for (const LevelReport& lr : r.level_reports) {
    std::ofstream os = open_csv(dir / ("remainders_" + to_string(lr.level) + ".csv"));
    lr.table.write_csv(os);
    if (g.plot) {
      std::ofstream pl = open_csv(dir / ("remainders_" + to_string(lr.level) + ".dat"));
      pl << "# N  log|eps|  log(norm)  log(bound)\n";
      for (const RemainderRow& row : lr.table.rows) {
        pl << row.N << ' ' << std::log(std::abs(row.eps)) << ' ' << std::log(std::max(row.norm, kRemainderFloor))
           << ' ' << lr.fit.log_bound(row) << '\n';
      }
    }
  }
}

TheoremOptions theorem_options(const Globals& g, const std::vector<std::string>& ts, int n_max) {
  TheoremOptions opt;
  if (!ts.empty()) {
    opt.split_ts.clear();
    for (const auto& s : ts) opt.split_ts.push_back(parse_complex(s));
  }
  if (n_max > 0) opt.n_max = n_max;
  if (g.tol > 0.0) opt.split.tolerance = g.tol;
  return opt;
}

json split_stage(const Globals& g, const Model& m, const TheoremOptions& opt, const fs::path& dir, bool& ok) {
  const TheoremReport r = verify_two_level_theorem(m, opt);
  export_split(g, m, r, opt, dir);
  json j = to_json(r);
  write_json(dir / "certification.json", j);
  ok = ok && r.passed;
  return j;
}

int run_split(const Globals& g, const std::string& path, const std::vector<std::string>& ts, int n_max, json& out) {
  const Scenario sc = scenario_from_json(read_json_file(path));
  const fs::path dir = out_dir(g);
  const Model m(sc);
  bool ok = true;
  out = split_stage(g, m, theorem_options(g, ts, n_max), dir, ok);
  return ok ? kOk : kCertification;
}

// --- demo -------------------------------------------------------------------

int run_demo(const Globals& g, const std::string& path, json& out) {
  const Scenario sc = scenario_from_json(read_json_file(path));
  const fs::path dir = out_dir(g);
  const ScenarioCheck chk = check_scenario(sc);
  out = {{"scenario", to_json(sc)}, {"scenario_failures", chk.failures}};
  if (!chk.ok()) {
    out["passed"] = false;
    return kCertification;
  }
  bool ok = true;
  json kernels = json::array();
  for (int p = 0; p < sc.size(); ++p) {
    const KernelCertification c = certify_kernel(sc, p);
    ok = ok && c.ok();
    kernels.push_back({{"p", p}, {"points", c.points}, {"ok", c.ok()}});
  }
  out["kernels"] = kernels;
  const Model m(sc);
  out["differences"] = diff_stage(g, m, dir, ok);
  out["theorem"] = split_stage(g, m, theorem_options(g, {}, 0), dir, ok);
  out["passed"] = ok;
  write_json(dir / "demo.json", out);
  return ok ? kOk : kCertification;
}

// --- fit --------------------------------------------------------------------

RemainderTable read_table(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot open " + path);
  RemainderTable t;
  std::string line;
  std::getline(is, line);
  if (line.rfind("N,re_eps,im_eps,re_t,im_t,norm", 0) != 0) throw InvalidArgument(path + ": unexpected header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() == 5) f.push_back("");
    if (f.size() != 6) throw InvalidArgument(path + ": bad row " + line);
    try {
      RemainderRow r;
      r.N = std::stoi(f[0]);
      r.eps = {std::stod(f[1]), std::stod(f[2])};
      if (!f[3].empty()) r.t = cplx{std::stod(f[3]), std::stod(f[4])};
      r.norm = std::stod(f[5]);
      t.rows.push_back(r);
    } catch (const std::logic_error&) {
      throw InvalidArgument(path + ": bad row " + line);
    }
  }
  if (t.rows.empty()) throw InvalidArgument(path + ": no rows");
  return t;
}

// Planted table C A^{N+1} [q^{N(N+1)/2k}] |eps|^{N+1} x (1 + noise U(-1,1)).
RemainderTable planted_table(const Globals& g, bool q_gevrey, double q, double k, double C, double A,
                             double noise, const GevreyScale& scale) {
  std::mt19937_64 rng(g.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RemainderTable t;
  for (int N = 0; N <= 6; ++N) {
    for (double e : {0.02, 0.05, 0.1, 0.2}) {
      RemainderRow r;
      r.N = N;
      r.eps = e;
      double v = C * std::pow(A * e, N + 1);
      if (q_gevrey) {
        v *= std::pow(q, N * (N + 1) / (2.0 * k));
      } else {
        r.t = 0.5 * scale.radius(N);
      }
      r.norm = v * (1.0 + noise * u(rng));
      t.rows.push_back(r);
    }
  }
  return t;
}

int run_fit(const Globals& g, const std::string& table, const std::string& kind, double q, double k,
            double pA, double pC, double noise, json& out) {
  const bool qg = kind == "q_gevrey";
  if (!qg && kind != "zero_gevrey_relative") throw InvalidArgument("--kind must be q_gevrey or zero_gevrey_relative");
  GevreyScale scale;
  scale.q = q;
  scale.k = k;
  RemainderTable t;
  if (!table.empty()) {
    t = read_table(table);
  } else {
    if (!(pA > 0.0 && pC > 0.0)) throw InvalidArgument("give --table or a planted --planted-A and --planted-C");
    t = planted_table(g, qg, q, k, pC, pA, noise, scale);
    std::ofstream os = open_csv(out_dir(g) / "planted_table.csv");
    t.write_csv(os);
  }
  const GevreyFit f = qg ? fit_q_gevrey(t, k, q) : fit_zero_gevrey_relative(t, scale);
  out = to_json(f);
  if (table.empty()) {
    out["planted"] = {{"A", pA}, {"C", pC}, {"noise", noise}, {"seed", g.seed},
                      {"A_relative_error", std::abs(f.A_fit - pA) / pA}};
  }
  return f.certified() ? kOk : kCertification;
}

json error_json(const std::string& kind, const std::string& msg, int code) {
  return {{"error", {{"kind", kind}, {"message", msg}}}, {"exit_code", code}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"q-Gevrey two-level toolkit: theta, Fourier and q-Laplace transforms, model differences and splits"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--out", g.out, "Output directory for tables")->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for randomized grids")->capture_default_str();
  app.add_option("--tol", g.tol, "Tolerance override for the quadratures and the split checks");
  app.add_flag("--emit-plot-data", g.plot, "Also write gnuplot-ready .dat columns");

  json out;
  int code = kOk;
  std::function<int()> action;

  double q = 2.0, k = 1.0, delta = 0.3, beta = 1.0, mu = 3.0, C = 1.0, bp = 0.5, dir = 0.0;
  int m = 1, check = 0, n_max = 0;
  std::vector<std::string> zs, ts;
  std::string scenario, specfile, f, T, sym = "exp_decay", table, kind = "zero_gevrey_relative";
  double pA = 0.0, pC = 0.0, noise = 0.0;

  auto* th = app.add_subcommand("theta", "Evaluate Theta_{q^{1/k}} and check its q-difference equation and growth bound");
  th->add_option("--q", q, "Base q > 1")->capture_default_str();
  th->add_option("--k", k, "Order k")->capture_default_str();
  th->add_option("--z", zs, "Points re,im");
  th->add_option("--m", m, "Shift of the q-difference residual")->capture_default_str();
  th->add_option("--check-growth", check, "Random admissible points for the lower-bound check");
  th->add_option("--delta", delta, "Spiral margin of the growth check")->capture_default_str();
  th->callback([&] { action = [&] { return run_theta(g, q, k, zs, m, check, delta, out); }; });

  auto* fo = app.add_subcommand("fourier", "Inverse Fourier transform of a symbol on the strip");
  fo->add_option("--symbol", sym, "exp_decay, gaussian, odd or a CSV path (m,re,im)")->capture_default_str();
  fo->add_option("--beta", beta)->capture_default_str();
  fo->add_option("--mu", mu)->capture_default_str();
  fo->add_option("--C", C, "Profile constant for CSV symbols")->capture_default_str();
  fo->add_option("--beta-prime", bp)->capture_default_str();
  fo->add_option("--z", zs, "Points re,im")->required();
  fo->callback([&] { action = [&] { return run_fourier(g, sym, beta, mu, C, bp, zs, out); }; });

  auto* ql = app.add_subcommand("qlaplace", "q-Laplace transform of order k along a direction");
  ql->add_option("--q", q)->capture_default_str();
  ql->add_option("--k", k)->capture_default_str();
  ql->add_option("--direction", dir, "Ray direction in radians")->capture_default_str();
  ql->add_option("--f", f, "one, monomial:n, pole:re,im or a CSV path (r,re,im)")->required();
  ql->add_option("--T", T, "Evaluation point re,im")->required();
  ql->add_option("--delta", delta, "Spiral margin")->capture_default_str();
  ql->callback([&] { action = [&] { return run_qlaplace(g, q, k, dir, f, T, delta, out); }; });

  auto* ge = app.add_subcommand("geometry", "Covering, overlaps, levels and kernel certification of a scenario");
  ge->add_option("--scenario", scenario)->required();
  ge->callback([&] { action = [&] { return run_geometry(scenario, out); }; });

  auto* hy = app.add_subcommand("hypotheses", "Check (H1)/(H2) for an equation spec");
  hy->add_option("--spec", specfile)->required();
  hy->callback([&] { action = [&] { return run_hypotheses(specfile, out); }; });

  auto* di = app.add_subcommand("diff", "Consecutive differences and rate fits of the model solutions");
  di->add_option("--scenario", scenario)->required();
  di->callback([&] { action = [&] { return run_diff(g, scenario, out); }; });

  auto* sp = app.add_subcommand("split", "Two-level splitting of the model cocycle with certification");
  sp->add_option("--scenario", scenario)->required();
  sp->add_option("--t", ts, "Values of t for the split checks, re,im");
  sp->add_option("--n-max", n_max, "Largest expansion order");
  sp->callback([&] { action = [&] { return run_split(g, scenario, ts, n_max, out); }; });

  auto* de = app.add_subcommand("demo", "Full pipeline: scenario checks, differences, rates, split and fits");
  de->add_option("--scenario", scenario)->required();
  de->callback([&] { action = [&] { return run_demo(g, scenario, out); }; });

  auto* fi = app.add_subcommand("fit", "Fit a Gevrey-type envelope to a remainder table");
  fi->add_option("--table", table, "CSV N,re_eps,im_eps,re_t,im_t,norm");
  fi->add_option("--kind", kind, "q_gevrey or zero_gevrey_relative")->capture_default_str();
  fi->add_option("--q", q)->capture_default_str();
  fi->add_option("--k", k)->capture_default_str();
  fi->add_option("--planted-A", pA, "Generate a planted table instead of reading one");
  fi->add_option("--planted-C", pC);
  fi->add_option("--noise", noise, "Relative multiplicative noise of the planted table")->capture_default_str();
  fi->callback([&] { action = [&] { return run_fit(g, table, kind, q, k, pA, pC, noise, out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cout << error_json("input", e.what(), kInput).dump(2) << '\n';
    return kInput;
  }

  try {
    code = action();
  } catch (const CertificationFailure& e) {
    out = error_json("certification", e.what(), kCertification);
    code = kCertification;
  } catch (const InvalidArgument& e) {
    out = error_json("input", e.what(), kInput);
    code = kInput;
  } catch (const DomainViolation& e) {
    out = error_json("domain", e.what(), kInput);
    code = kInput;
  } catch (const std::exception& e) {
    out = error_json("internal", e.what(), kInput);
    code = kInput;
  }
  std::cout << out.dump(2) << '\n';
  return code;
}
