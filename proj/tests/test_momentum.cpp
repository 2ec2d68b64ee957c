#include <cmath>
#include <complex>

#include "doctest.h"
#include "sqmlab/field_ops.hpp"
#include "sqmlab/momentum.hpp"
#include "sqmlab/numerics.hpp"

using namespace sqmlab;
using cplx = std::complex<double>;

namespace {

// Amplitude-width Gaussian: psi(x) = N exp(-x^2 / (2 s^2)).
ComplexField gaussian_packet(const Grid& g, double s) {
  auto psi = ComplexField::sample(g, [&](Vec3 p) {
    return cplx(std::exp(-p[0] * p[0] / (2.0 * s * s)), 0.0);
  });
  double nrm = l2_norm(psi);
  for (std::size_t k = 0; k < psi.size(); ++k) psi[k] /= nrm;
  return psi;
}

}  // namespace

TEST_SUITE("momentum") {

TEST_CASE("round trip reproduces the packet") {
  const double hbar = 1.3;
  Grid g(Axis{-10.0, 10.0, 96});
  auto psi = gaussian_packet(g, 1.0);
  auto spec = to_momentum(psi, hbar);
  CHECK_FALSE(spec.boundary_leak);
  auto back = from_momentum(spec, g);
  double err = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k) err = std::max(err, std::abs(psi[k] - back[k]));
  CHECK(err < 1e-10);
}

TEST_CASE("Gaussian of amplitude width s maps to width hbar/s") {
  const double hbar = 0.7;
  const double s = 0.8;
  Grid g(Axis{-12.0, 12.0, 128});
  auto psi = gaussian_packet(g, s);
  auto spec = to_momentum(psi, hbar);
  // Width from the second moment of |psi~|^2: for amplitude width s_p the
  // density has variance s_p^2 / 2.
  double w = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < spec.values.size(); ++k) {
    const double p = spec.pgrid.coord(0, static_cast<int>(k));
    const double d = std::norm(spec.values[k]) * spec.pgrid.quad_weight(k);
    w += d;
    m2 += p * p * d;
  }
  const double width = std::sqrt(2.0 * m2 / w);
  CHECK(std::abs(width - hbar / s) / (hbar / s) < 1e-6);
}

TEST_CASE("Parseval identity") {
  const double hbar = 2.0;
  Grid g(Axis{-9.0, 9.0, 80});
  auto psi = gaussian_packet(g, 0.6);
  // add a phase so the spectrum is complex
  for (std::size_t k = 0; k < psi.size(); ++k) {
    const double x = g.point(k)[0];
    psi[k] *= std::polar(1.0, 1.7 * x / hbar);
  }
  auto spec = to_momentum(psi, hbar);
  double x_norm = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k)
    x_norm += std::norm(psi[k]) * g.quad_weight(k);
  double p_norm = 0.0;
  for (std::size_t k = 0; k < spec.values.size(); ++k)
    p_norm += std::norm(spec.values[k]) * spec.pgrid.quad_weight(k);
  p_norm /= 2.0 * M_PI * hbar;
  CHECK(std::abs(x_norm - p_norm) / x_norm < 1e-8);
}

TEST_CASE("real even field gives a real even spectrum") {
  const double hbar = 1.0;
  Grid g(Axis{-8.0, 8.0, 97});
  auto psi = gaussian_packet(g, 1.1);
  auto spec = to_momentum(psi, hbar);
  const int n = spec.pgrid.n(0);
  double worst_imag = 0.0, worst_asym = 0.0;
  for (int j = 0; j < n; ++j) {
    worst_imag = std::max(worst_imag, std::abs(spec.values[j].imag()));
    worst_asym = std::max(worst_asym, std::abs(spec.values[j] - spec.values[n - 1 - j]));
  }
  CHECK(worst_imag < 1e-10);
  CHECK(worst_asym < 1e-10);
}

TEST_CASE("boundary leak attaches a warning diagnostic") {
  Grid g(Axis{-2.0, 2.0, 48});
  auto psi = gaussian_packet(g, 1.5);  // far from decayed at the box edge
  auto spec = to_momentum(psi, 1.0);
  CHECK(spec.boundary_leak);
}

TEST_CASE("2D round trip") {
  const double hbar = 1.0;
  Grid g = Grid::centered(2, 7.0, 48);
  auto psi = ComplexField::sample(g, [&](Vec3 p) {
    return cplx(std::exp(-norm_sq(p) / 2.0), 0.0) * std::polar(1.0, 0.9 * p[1]);
  });
  double nrm = l2_norm(psi);
  for (std::size_t k = 0; k < psi.size(); ++k) psi[k] /= nrm;
  auto spec = to_momentum(psi, hbar);
  auto back = from_momentum(spec, g);
  double err = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k) err = std::max(err, std::abs(psi[k] - back[k]));
  CHECK(err < 1e-9);
}

TEST_CASE("Gauss-Legendre and Gauss-Laguerre rules are sane") {
  auto gl = gauss_legendre(8);
  double s = 0.0;
  for (double w : gl.weights) s += w;
  CHECK(s == doctest::Approx(2.0).epsilon(1e-13));
  // integrate x^6 over [-1,1]: 2/7
  double acc = 0.0;
  for (int i = 0; i < 8; ++i) acc += gl.weights[i] * std::pow(gl.nodes[i], 6);
  CHECK(acc == doctest::Approx(2.0 / 7.0).epsilon(1e-12));

  auto glag = gauss_laguerre(24);
  double s1 = 0.0, sx = 0.0, sx5 = 0.0;
  for (int i = 0; i < 24; ++i) {
    s1 += glag.weights[i];
    sx += glag.weights[i] * glag.nodes[i];
    sx5 += glag.weights[i] * std::pow(glag.nodes[i], 5);
  }
  CHECK(s1 == doctest::Approx(1.0).epsilon(1e-12));    // ∫ e^-s ds
  CHECK(sx == doctest::Approx(1.0).epsilon(1e-12));    // ∫ s e^-s ds
  CHECK(sx5 == doctest::Approx(120.0).epsilon(1e-10)); // 5!
}

}  // TEST_SUITE
