#include "qgevrey/polynomial.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>

#include "qgevrey/errors.hpp"

namespace qgevrey {

Polynomial::Polynomial(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {
  while (!c_.empty() && c_.back() == cplx{0.0, 0.0}) c_.pop_back();
}

int Polynomial::degree() const { return static_cast<int>(c_.size()) - 1; }

cplx Polynomial::operator()(cplx x) const {
  cplx acc{0.0, 0.0};
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double Polynomial::coefficient_scale() const {
  double s = 0.0;
  for (const cplx& c : c_) s = std::max(s, std::abs(c));
  return s;
}

std::vector<cplx> Polynomial::roots() const {
  const int n = degree();
  if (n < 0) throw InvalidArgument("the zero polynomial has no finite root set");
  if (n == 0) return {};
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -c_[i] / c_[n];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + n};
}

}  // namespace qgevrey
