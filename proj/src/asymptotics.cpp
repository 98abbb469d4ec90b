#include "qgevrey/asymptotics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>
#include <string>

#include "qgevrey/errors.hpp"

namespace qgevrey {

int RemainderTable::n_max() const {
  int n = -1;
  for (const auto& r : rows) n = std::max(n, r.N);
  return n;
}

void RemainderTable::write_csv(std::ostream& os) const {
  const auto old = os.precision(17);
  os << "N,re_eps,im_eps,re_t,im_t,norm\n";
  for (const auto& r : rows) {
    os << r.N << ',' << r.eps.real() << ',' << r.eps.imag() << ',';
    if (r.t) {
      os << r.t->real() << ',' << r.t->imag();
    } else {
      os << ',';
    }
    os << ',' << r.norm << '\n';
  }
  os.precision(old);
}

std::vector<cplx> default_z_grid(double beta_prime, int n) {
  if (!(beta_prime > 0.0) || n < 2) throw InvalidArgument("z grid needs beta' > 0 and n >= 2");
  std::vector<cplx> z(n);
  for (int j = 0; j < n; ++j) {
    z[j] = {-1.0 + 2.0 * j / (n - 1), beta_prime * (-1.0 + 2.0 * (j + 1) / (n + 1))};
  }
  return z;
}

double sup_norm(const std::function<cplx(cplx)>& g, const std::vector<cplx>& z_grid) {
  double s = 0.0;
  for (const auto& z : z_grid) s = std::max(s, std::abs(g(z)));
  return s;
}

RemainderTable remainders(const Family& f, const CoefficientFamily& coeffs,
                          const std::vector<RemainderProbe>& probes,
                          const std::vector<cplx>& z_grid,
                          const std::optional<GevreyScale>& scale) {
  RemainderTable table;
  table.rows.reserve(probes.size());
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto& pr = probes[i];
    if (pr.N < 0) throw InvalidArgument("probe " + std::to_string(i) + ": N must be >= 0");
    const cplx t = pr.t.value_or(cplx{0.0, 0.0});
    if (scale && pr.t && !(std::abs(t) < scale->radius(pr.N))) {
      throw DomainViolation("probe " + std::to_string(i) + ": |t| = " + std::to_string(std::abs(t)) +
                            " outside D(0, r_" + std::to_string(pr.N) + ")");
    }
    const double norm = sup_norm(
        [&](cplx z) {
          cplx s = f(t, z, pr.eps);
          cplx e{1.0, 0.0};
          for (int p = 0; p <= pr.N; ++p, e *= pr.eps) s -= coeffs(p, t, z) * e;
          return s;
        },
        z_grid);
    table.rows.push_back({pr.N, pr.eps, pr.t, norm});
  }
  return table;
}

namespace {

double safe_log(double r) { return std::log(std::max(r, kRemainderFloor)); }

// Shift term of the envelope that does not involve C or A.
double fixed_part(const GevreyFit& fit, const RemainderRow& row) {
  double s = (row.N + 1) * std::log(std::abs(row.eps));
  if (fit.kind == FitKind::q_gevrey && std::isfinite(fit.k)) {
    s += double(row.N) * (row.N + 1) * std::log(fit.q) / (2.0 * fit.k);
  }
  return s;
}

void check_rows(const RemainderTable& table) {
  if (table.rows.empty()) throw InvalidArgument("remainder table is empty");
  std::set<int> ns;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (table.rows[i].eps == cplx{0.0, 0.0}) {
      throw InvalidArgument("row " + std::to_string(i) + ": eps = 0 carries no information");
    }
    ns.insert(table.rows[i].N);
  }
  if (ns.size() < 2) throw InvalidArgument("fit needs at least two distinct N (underdetermined)");
  if (table.n_max() < 5) throw InvalidArgument("fit needs N_max >= 5");
}

// y = log C + (N+1) log A by least squares over non-floored rows, then C inflated.
void fit_and_certify(GevreyFit& fit, const RemainderTable& table) {
  std::vector<double> xs, ys;
  for (const auto& r : table.rows) {
    if (r.norm <= kRemainderFloor) continue;
    xs.push_back(r.N + 1.0);
    ys.push_back(std::log(r.norm) - fixed_part(fit, r));
  }
  if (std::set<double>(xs.begin(), xs.end()).size() < 2) {
    throw InvalidArgument("fewer than two distinct N above the remainder floor");
  }
  const double n = double(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - icpt - slope * xs[i];
    ss += e * e;
  }
  fit.rows_used = int(xs.size());
  fit.residual_rms = std::sqrt(ss / n);
  fit.C_fit = std::exp(icpt);
  fit.A_fit = std::exp(slope);
  fit.A = fit.A_fit;
  fit.C = fit.C_fit;
  const double excess = max_violation(fit, table);
  if (excess > 0.0) fit.C *= std::exp(excess) * (1.0 + 1e-12);
  fit.max_violation = max_violation(fit, table);
}

}  // namespace

double GevreyFit::log_bound(const RemainderRow& row) const {
  return std::log(C) + (row.N + 1) * std::log(A) + fixed_part(*this, row);
}

double max_violation(const GevreyFit& fit, const RemainderTable& table) {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& r : table.rows) v = std::max(v, safe_log(r.norm) - fit.log_bound(r));
  return v;
}

GevreyFit fit_q_gevrey(const RemainderTable& table, double k, double q) {
  if (!(k > 0.0)) throw InvalidArgument("q-Gevrey order k must be positive");
  if (!(q > 1.0)) throw InvalidArgument("q must exceed 1");
  check_rows(table);
  GevreyFit fit;
  fit.kind = FitKind::q_gevrey;
  fit.q = q;
  fit.k = k;
  fit_and_certify(fit, table);
  return fit;
}

GevreyFit fit_zero_gevrey_relative(const RemainderTable& table, const GevreyScale& scale) {
  check_rows(table);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    if (r.t && !(std::abs(*r.t) < scale.radius(r.N))) {
      throw DomainViolation("row " + std::to_string(i) + ": t outside D(0, r_" + std::to_string(r.N) + ")");
    }
  }
  GevreyFit fit;
  fit.kind = FitKind::zero_gevrey_relative;
  fit.q = scale.q;
  fit.k = scale.k;
  fit.scale = scale;
  fit_and_certify(fit, table);
  fit.scale.C = fit.C;
  fit.scale.A = fit.A;
  return fit;
}

RemainderTable restrict_to_scale(const RemainderTable& table, const GevreyScale& scale) {
  RemainderTable out;
  for (const auto& r : table.rows) {
    if (!r.t || std::abs(*r.t) < scale.radius(r.N)) out.rows.push_back(r);
  }
  return out;
}

double FunctionalBound::operator()(double x) const {
  const double lx = std::log(x);
  return K * std::exp(gamma * lx - 0.5 * k * lx * lx / std::log(q));
}

double SequentialRow::bound(double x) const { return C * std::pow(H, N) * G * std::pow(x, N); }

std::vector<SequentialRow> functional_to_sequential(const FunctionalBound& fb, int n_max) {
  if (!(fb.k > 0.0)) throw InvalidArgument("functional bound needs k > 0");
  if (!(fb.q > 1.0)) throw InvalidArgument("q must exceed 1");
  if (n_max < 0) throw InvalidArgument("n_max must be >= 0");
  std::vector<SequentialRow> rows;
  const double C = fb.K * std::pow(fb.q, fb.gamma * fb.gamma / (2.0 * fb.k));
  const double H = std::pow(fb.q, -fb.gamma / fb.k);
  for (int N = 0; N <= n_max; ++N) {
    rows.push_back({N, C, H, std::pow(fb.q, double(N) * N / (2.0 * fb.k))});
  }
  return rows;
}

RateFit fit_log_gaussian_rate(const std::vector<double>& x, const std::vector<double>& y, double q) {
  if (x.size() != y.size()) throw InvalidArgument("rate fit: x and y differ in length");
  std::vector<int> keep;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) throw InvalidArgument("rate fit: |eps t| must be positive");
    if (y[i] > kRemainderFloor) keep.push_back(int(i));
  }
  if (keep.size() < 3) throw InvalidArgument("rate fit needs three rows above the floor");
  Eigen::MatrixXd X(keep.size(), 3);
  Eigen::VectorXd Y(keep.size());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const double l = std::log(x[keep[r]]);
    X(r, 0) = l * l;
    X(r, 1) = l;
    X(r, 2) = 1.0;
    Y(r) = std::log(y[keep[r]]);
  }
  const Eigen::Vector3d beta = X.colPivHouseholderQr().solve(Y);
  RateFit fit;
  fit.a = beta(0);
  fit.b = beta(1);
  fit.c = beta(2);
  fit.k_fit = -2.0 * std::log(q) * fit.a;
  fit.residual_rms = std::sqrt((X * beta - Y).squaredNorm() / double(keep.size()));
  fit.rows_used = int(keep.size());
  return fit;
}

}  // namespace qgevrey
