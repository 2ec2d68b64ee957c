#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace sqmlab {

/// Thomas algorithm for a tridiagonal system. sub/sup have size n-1.
/// Overwrites rhs with the solution and returns a reference to it.
template <class T>
std::vector<T>& solve_tridiagonal(const std::vector<T>& sub, std::vector<T> diag,
                                  const std::vector<T>& sup, std::vector<T>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const T w = sub[i - 1] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
  return rhs;
}

/// Conjugate gradient for an SPD (or Hermitian positive definite) operator
/// given as apply(x, out). Returns the iteration count; throws on
/// non-convergence.
template <class T>
int conjugate_gradient(const std::function<void(const std::vector<T>&, std::vector<T>&)>& apply,
                       const std::vector<T>& b, std::vector<T>& x, double rel_tol,
                       int max_iter);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

/// Gauss-Laguerre rule for the weight e^{-s} on [0, inf).
QuadratureRule gauss_laguerre(int n);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

extern template int conjugate_gradient<double>(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>&,
    const std::vector<double>&, std::vector<double>&, double, int);
extern template int conjugate_gradient<std::complex<double>>(
    const std::function<void(const std::vector<std::complex<double>>&,
                             std::vector<std::complex<double>>&)>&,
    const std::vector<std::complex<double>>&, std::vector<std::complex<double>>&, double,
    int);

}  // namespace sqmlab
