#include "qgevrey/json_io.hpp"

#include <cmath>
#include <fstream>

#include "qgevrey/errors.hpp"

namespace qgevrey {

namespace {

const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidArgument(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) throw InvalidArgument(std::string("field \"") + key + "\" must be a number");
  return v.get<double>();
}

double number(const json& j, const char* key) {
  const json& v = need(j, key);
  if (!v.is_number()) throw InvalidArgument(std::string("field \"") + key + "\" must be a number");
  return v.get<double>();
}

int integer(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw InvalidArgument(std::string("field \"") + key + "\" must be an integer");
  return v.get<int>();
}

// Converts library-side json type errors into input errors.
template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string(what) + ": " + e.what());
  }
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot open " + path);
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw InvalidArgument("complex number must be a number or [re, im], got " + j.dump());
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

QFrame frame_from_json(const json& j) {
  return make_qframe(number(j, "q"), number(j, "k1"), number(j, "k2"), number(j, "epsilon0"), number(j, "rT"));
}

json to_json(const QFrame& f) {
  return {{"q", f.q()}, {"k1", f.k1()}, {"k2", f.k2()}, {"kappa", f.kappa()},
          {"epsilon0", f.epsilon0()}, {"rT", f.rT()}};
}

Sector sector_from_json(const json& j) {
  const double r = j.contains("radius") && !j.at("radius").is_null() ? number(j, "radius")
                                                                      : std::numeric_limits<double>::infinity();
  return make_sector(number(j, "bisector"), 0.5 * number(j, "opening"), r, number(j, "inner_radius", 0.0));
}

json to_json(const Sector& s) {
  return {{"bisector", s.bisector}, {"opening", 2.0 * s.half_opening}, {"radius", finite_or_null(s.radius)},
          {"inner_radius", s.inner_radius}};
}

Polynomial polynomial_from_json(const json& j) {
  if (!j.is_array()) throw InvalidArgument("polynomial must be a coefficient list");
  std::vector<cplx> c;
  for (const json& x : j) c.push_back(complex_from_json(x));
  return Polynomial(std::move(c));
}

json to_json(const Polynomial& p) {
  json a = json::array();
  for (cplx c : p.coeffs()) a.push_back(to_json(c));
  return a;
}

Kernel kernel_from_json(const json& j, const QFrame& frame) {
  return guarded("kernel", [&] {
    Kernel k;
    if (j.contains("poles")) {
      for (const json& p : j.at("poles")) {
        Pole pl;
        pl.at = complex_from_json(need(p, "at"));
        if (p.contains("weight")) pl.weight = complex_from_json(p.at("weight"));
        if (std::abs(pl.at) == 0.0) throw InvalidArgument("pole at the origin");
        k.poles.push_back(pl);
      }
    }
    if (j.contains("polynomial")) {
      for (const json& c : j.at("polynomial")) k.polynomial.push_back(complex_from_json(c));
    }
    if (j.contains("discrepancy") && !j.at("discrepancy").is_null()) {
      const json& d = j.at("discrepancy");
      Discrepancy e;
      if (d.contains("amplitude")) e.amplitude = complex_from_json(d.at("amplitude"));
      e.lambda = complex_from_json(need(d, "lambda"));
      e.kappa = number(d, "kappa", frame.kappa());
      if (!(e.kappa > 0.0) || std::abs(e.lambda) == 0.0) throw InvalidArgument("discrepancy needs kappa > 0, lambda != 0");
      k.discrepancy = e;
    }
    k.scale = number(j, "scale", 1.0);
    return k;
  });
}

json to_json(const Kernel& k) {
  json o;
  o["poles"] = json::array();
  for (const Pole& p : k.poles) o["poles"].push_back({{"at", to_json(p.at)}, {"weight", to_json(p.weight)}});
  o["polynomial"] = json::array();
  for (cplx c : k.polynomial) o["polynomial"].push_back(to_json(c));
  if (k.discrepancy) {
    o["discrepancy"] = {{"amplitude", to_json(k.discrepancy->amplitude)},
                        {"lambda", to_json(k.discrepancy->lambda)},
                        {"kappa", k.discrepancy->kappa}};
  }
  o["scale"] = k.scale;
  o["growth"] = {{"C_w", k.growth.C_w}, {"nu", k.growth.nu}, {"K31", k.growth.K31}, {"K41", k.growth.K41}};
  return o;
}

Scenario scenario_from_json(const json& j) {
  return guarded("scenario", [&] {
    Scenario sc;
    sc.frame = frame_from_json(need(j, "frame"));
    for (const json& d : need(j, "directions")) sc.directions.push_back(d.get<double>());
    for (const json& s : need(j, "covering")) sc.covering.sectors.push_back(sector_from_json(s));
    sc.u_half_opening = 0.5 * number(j, "u_opening", 2.0 * sc.u_half_opening);
    sc.s_half_opening = 0.5 * number(j, "s_opening", 2.0 * sc.s_half_opening);
    sc.T = sector_from_json(need(j, "T"));
    sc.delta_t = number(j, "delta_t", sc.delta_t);
    sc.rho_tilde = number(j, "rho_tilde", sc.rho_tilde);
    sc.beta = number(j, "beta", sc.beta);
    sc.beta_prime = number(j, "beta_prime", sc.beta_prime);
    sc.mu = number(j, "mu", sc.mu);
    sc.nu = number(j, "nu", sc.nu);
    sc.alpha = number(j, "alpha", sc.alpha);
    const json& ks = need(j, "kernels");
    if (!ks.is_array()) throw InvalidArgument("kernels must be a list");
    for (const json& k : ks) sc.kernels.push_back(kernel_from_json(k, sc.frame));
    if (sc.kernels.size() != sc.directions.size()) throw InvalidArgument("one kernel per direction is required");
    for (std::size_t p = 0; p < ks.size(); ++p) {
      if (ks[p].contains("growth")) {
        const json& g = ks[p].at("growth");
        sc.kernels[p].growth = {number(g, "C_w"), number(g, "nu", sc.nu), number(g, "K31", 0.0),
                                number(g, "K41", 0.0)};
      } else {
        calibrate_kernel_growth(sc, int(p), sc.kernels[p]);
      }
    }
    return sc;
  });
}

json to_json(const Scenario& sc) {
  json o;
  o["frame"] = to_json(sc.frame);
  o["directions"] = sc.directions;
  o["covering"] = json::array();
  for (const Sector& s : sc.covering.sectors) o["covering"].push_back(to_json(s));
  o["u_opening"] = 2.0 * sc.u_half_opening;
  o["s_opening"] = 2.0 * sc.s_half_opening;
  o["T"] = to_json(sc.T);
  o["delta_t"] = sc.delta_t;
  o["rho_tilde"] = sc.rho_tilde;
  o["beta"] = sc.beta;
  o["beta_prime"] = sc.beta_prime;
  o["mu"] = sc.mu;
  o["nu"] = sc.nu;
  o["alpha"] = sc.alpha;
  o["kernels"] = json::array();
  for (const Kernel& k : sc.kernels) o["kernels"].push_back(to_json(k));
  return o;
}

EquationSpec equation_from_json(const json& j) {
  return guarded("equation", [&] {
    EquationSpec e;
    e.frame = frame_from_json(need(j, "frame"));
    e.D = integer(j, "D", e.D);
    e.dD1 = integer(j, "dD1", e.dD1);
    e.dD2 = integer(j, "dD2", e.dD2);
    e.Q = polynomial_from_json(need(j, "Q"));
    e.RD1 = polynomial_from_json(need(j, "RD1"));
    e.RD2 = polynomial_from_json(need(j, "RD2"));
    for (const json& t : need(j, "terms")) {
      EquationTerm term;
      term.Delta = integer(t, "Delta", 0);
      term.d = integer(t, "d", 1);
      term.delta = integer(t, "delta", 1);
      term.R = polynomial_from_json(need(t, "R"));
      e.terms.push_back(term);
    }
    e.mu = number(j, "mu", e.mu);
    e.beta = number(j, "beta", e.beta);
    return e;
  });
}

json to_json(const EquationSpec& e) {
  json o;
  o["frame"] = to_json(e.frame);
  o["D"] = e.D;
  o["dD1"] = e.dD1;
  o["dD2"] = e.dD2;
  o["Q"] = to_json(e.Q);
  o["RD1"] = to_json(e.RD1);
  o["RD2"] = to_json(e.RD2);
  o["terms"] = json::array();
  for (const EquationTerm& t : e.terms) {
    o["terms"].push_back({{"Delta", t.Delta}, {"d", t.d}, {"delta", t.delta}, {"R", to_json(t.R)}});
  }
  o["mu"] = e.mu;
  o["beta"] = e.beta;
  return o;
}

json to_json(const HypothesisReport& r) {
  json v = json::array();
  for (const auto& x : r.violations) v.push_back({{"clause", x.clause}, {"witness", x.witness}});
  return {{"ok", r.ok()}, {"exact", r.exact}, {"violations", v}};
}

json to_json(const GevreyFit& f) {
  json o = {{"kind", f.kind == FitKind::q_gevrey ? "q_gevrey" : "zero_gevrey_relative"},
            {"q", f.q},
            {"k", finite_or_null(f.k)},
            {"C_fit", f.C_fit},
            {"A_fit", f.A_fit},
            {"C", f.C},
            {"A", f.A},
            {"max_violation", f.max_violation},
            {"residual_rms", f.residual_rms},
            {"rows_used", f.rows_used},
            {"certified", f.certified()}};
  if (f.kind == FitKind::zero_gevrey_relative) {
    o["scale"] = {{"level", to_string(f.scale.level)}, {"q", f.scale.q}, {"k", f.scale.k}};
  }
  return o;
}

json to_json(const RateFit& f) {
  return {{"a", f.a}, {"b", f.b}, {"c", f.c}, {"k_fit", f.k_fit}, {"residual_rms", f.residual_rms},
          {"rows_used", f.rows_used}};
}

json to_json(const SplitReport& r) {
  return {{"reconstruction_error", r.reconstruction_error},
          {"difference_error", {{"one", r.difference_error[0]}, {"two", r.difference_error[1]}}},
          {"glue_mismatch", r.glue_mismatch},
          {"glue_outer_max", r.glue_outer_max},
          {"glue_inner_max", r.glue_inner_max},
          {"glue_laurent", r.glue_laurent},
          {"eps1", r.eps1},
          {"probes", r.probes},
          {"passed", r.passed},
          {"warnings", r.warnings}};
}

json to_json(const QLaplaceResult& r) {
  return {{"value", to_json(r.value)},
          {"error_estimate", r.error},
          {"tail_bound", r.tail_bound},
          {"nodes_used", r.nodes_used},
          {"direction_used", r.direction_used},
          {"rerouted", r.rerouted}};
}

json to_json(const FourierResult& r) {
  return {{"value", to_json(r.value)}, {"error_estimate", r.error}, {"cutoff", r.cutoff},
          {"evaluations", r.evaluations}};
}

json to_json(const CoveringReport& r) {
  return {{"valid", r.valid()},
          {"adjacency_violations", r.adjacency_violations},
          {"min_coverage", r.min_coverage},
          {"uncovered_arc", r.uncovered_arc},
          {"common_radius", r.common_radius}};
}

json to_json(const FunctionalBound& b) { return {{"K", b.K}, {"k", b.k}, {"gamma", b.gamma}, {"q", b.q}}; }

json to_json(const TheoremReport& r) {
  json levels = json::array();
  for (const LevelReport& lr : r.level_reports) {
    levels.push_back({{"level", to_string(lr.level)},
                      {"overlaps", lr.overlaps},
                      {"functional", to_json(lr.functional)},
                      {"sequential", {{"C", lr.sequential.C}, {"H", lr.sequential.H}}},
                      {"sequential_margin", lr.sequential_margin},
                      {"rows", lr.table.rows.size()},
                      {"fit", to_json(lr.fit)}});
  }
  return {{"partition", {{"I1", r.levels.I1}, {"I2", r.levels.I2}}},
          {"single_level", r.single_level},
          {"split", to_json(r.split)},
          {"levels", levels},
          {"corollary", to_json(r.corollary)},
          {"merged", to_json(r.merged)},
          {"warnings", r.warnings},
          {"passed", r.passed}};
}

}  // namespace qgevrey
