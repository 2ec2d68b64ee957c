#include "sqmlab/numerics.hpp"

#include <cmath>

#include "sqmlab/errors.hpp"

namespace sqmlab {

namespace {

// Laguerre L_n(x) via the three-term recurrence.
double laguerre(int n, double x) {
  double p0 = 1.0, p1 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double p2 = p1;
    p1 = p0;
    p0 = ((2.0 * j + 1.0 - x) * p1 - j * p2) / (j + 1.0);
  }
  return p0;
}

template <class T>
double dot_re(const std::vector<T>& a, const std::vector<T>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if constexpr (std::is_same_v<T, double>)
      acc += a[i] * b[i];
    else
      acc += (std::conj(a[i]) * b[i]).real();
  }
  return acc;
}

}  // namespace

template <class T>
int conjugate_gradient(const std::function<void(const std::vector<T>&, std::vector<T>&)>& apply,
                       const std::vector<T>& b, std::vector<T>& x, double rel_tol,
                       int max_iter) {
  const std::size_t n = b.size();
  std::vector<T> r(n), p(n), ap(n);
  apply(x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  p = r;
  double rr = dot_re(r, r);
  const double bb = dot_re(b, b);
  const double stop = rel_tol * rel_tol * (bb > 0.0 ? bb : 1.0);
  if (rr <= stop) return 0;
  for (int it = 1; it <= max_iter; ++it) {
    apply(p, ap);
    const double alpha = rr / dot_re(p, ap);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double rr_new = dot_re(r, r);
    if (rr_new <= stop) return it;
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  throw ConvergenceError("conjugate gradient did not converge", std::sqrt(rr), max_iter);
}

template int conjugate_gradient<double>(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>&,
    const std::vector<double>&, std::vector<double>&, double, int);
template int conjugate_gradient<std::complex<double>>(
    const std::function<void(const std::vector<std::complex<double>>&,
                             std::vector<std::complex<double>>&)>&,
    const std::vector<std::complex<double>>&, std::vector<std::complex<double>>&, double,
    int);

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw InvalidInput("gauss_legendre: n must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

QuadratureRule gauss_laguerre(int n) {
  if (n < 1) throw InvalidInput("gauss_laguerre: n must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  double x = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      x = 3.0 / (1.0 + 2.4 * n);
    } else if (i == 1) {
      x += 15.0 / (1.0 + 2.5 * n);
    } else {
      const double ai = i - 1;
      x += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (x - rule.nodes[i - 2]);
    }
    for (int it = 0; it < 200; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0 - x) * p1 - j * p2) / (j + 1.0);
      }
      const double pp = n * (p0 - p1) / x;
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-14 * std::max(1.0, x)) break;
    }
    rule.nodes[i] = x;
    const double lnp1 = laguerre(n + 1, x);
    rule.weights[i] = x / ((n + 1.0) * (n + 1.0) * lnp1 * lnp1);
  }
  return rule;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("linear_fit: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw InvalidInput("linear_fit: degenerate abscissae");
  LinearFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0;
  const double mean_y = sy / n;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pred = fit.slope * x[i] + fit.intercept;
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace sqmlab
