#pragma once

#include <complex>
#include <vector>

namespace qgevrey {

using cplx = std::complex<double>;

/// Dense polynomial with complex coefficients, lowest degree first.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<cplx> coeffs);
  static Polynomial constant(cplx c) { return Polynomial({c}); }

  int degree() const;  // -1 for the zero polynomial
  cplx operator()(cplx x) const;
  const std::vector<cplx>& coeffs() const { return c_; }
  double coefficient_scale() const;  // max |c_i|

  /// All roots via eigenvalues of the companion matrix. Throws InvalidArgument
  /// for the zero polynomial.
  std::vector<cplx> roots() const;

 private:
  std::vector<cplx> c_;
};

}  // namespace qgevrey
