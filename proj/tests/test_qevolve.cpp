#include <cmath>
#include <complex>

#include "doctest.h"
#include "sqmlab/logse.hpp"
#include "sqmlab/qevolve.hpp"

using namespace sqmlab;
using qevolve::WaveFunction;
using cplx = std::complex<double>;

namespace {

// |psi|^2 has standard deviation sigma; optional momentum boost p0.
WaveFunction gaussian_wf(const Grid& g, double sigma, double p0 = 0.0, double mass = 1.0,
                         double hbar = 1.0, double charge = 1.0) {
  auto psi = ComplexField::sample(g, [&](Vec3 p) {
    return std::polar(std::exp(-p[0] * p[0] / (4.0 * sigma * sigma)), p0 * p[0] / hbar);
  });
  return qevolve::make_wave_function(std::move(psi), mass, charge, hbar);
}

double density_variance(const WaveFunction& wf) {
  const Grid& g = wf.psi.grid();
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < wf.psi.size(); ++k) {
    const double x = g.point(k)[0];
    const double w = std::norm(wf.psi[k]) * g.quad_weight(k);
    m0 += w;
    m1 += x * w;
    m2 += x * x * w;
  }
  return m2 / m0 - (m1 / m0) * (m1 / m0);
}

ScalarField harmonic(const Grid& g, double mass, double omega) {
  return ScalarField::sample(
      g, [&](Vec3 p) { return 0.5 * mass * omega * omega * norm_sq(p); });
}

}  // namespace

TEST_SUITE("qevolve") {

TEST_CASE("norm is preserved over a thousand steps") {
  Grid g(Axis{-10.0, 10.0, 256});
  auto wf = gaussian_wf(g, 1.0);
  auto V = harmonic(g, 1.0, 1.0);
  auto out = qevolve::evolve(wf, V, 1000 * 0.002, 0.002);
  CHECK(std::abs(out.norm_sq() - 1.0) < 1e-7);
}

TEST_CASE("free Gaussian spreads at the analytic rate") {
  const double sigma0 = 1.0, hbar = 1.0, mass = 1.0, t = 1.0;
  Grid g(Axis{-10.0, 10.0, 320});
  auto wf = gaussian_wf(g, sigma0, 0.0, mass, hbar);
  ScalarField zero(g);
  auto out = qevolve::evolve(wf, zero, t, 0.005);
  const double expected = sigma0 * sigma0 + std::pow(hbar * t / (2.0 * mass * sigma0), 2);
  CHECK(std::abs(density_variance(out) - expected) / expected < 1e-3);
}

TEST_CASE("coherent state oscillates with conserved amplitude") {
  const double omega = 1.0, x0 = 1.0;
  Grid g(Axis{-8.0, 8.0, 768});
  const double gs_sigma = std::sqrt(0.5);  // hbar/(2 m omega)
  auto psi = ComplexField::sample(g, [&](Vec3 p) {
    const double dx = p[0] - x0;
    return cplx(std::exp(-dx * dx / (4.0 * gs_sigma * gs_sigma)), 0.0);
  });
  auto wf = qevolve::make_wave_function(std::move(psi), 1.0, 1.0, 1.0);
  auto V = harmonic(g, 1.0, omega);
  const double period = 2.0 * M_PI / omega;
  const double dt = period / 800.0;

  double worst = 0.0;
  auto state = wf;
  for (int quarter = 1; quarter <= 4; ++quarter) {
    state = qevolve::evolve(state, V, period / 4.0, dt);
    const double expected = x0 * std::cos(omega * state.time);
    worst = std::max(worst, std::abs(qevolve::expect_position(state)[0] - expected));
  }
  CHECK(worst < 1e-3 * x0);
}

TEST_CASE("energy is conserved under evolve") {
  Grid g(Axis{-10.0, 10.0, 256});
  auto wf = gaussian_wf(g, 0.8, 0.4);
  auto V = harmonic(g, 1.0, 1.2);
  const double e0 = qevolve::energy(wf, V);
  auto out = qevolve::evolve(wf, V, 2.0, 0.004);
  CHECK(std::abs(qevolve::energy(out, V) - e0) / std::abs(e0) < 1e-6);
}

TEST_CASE("evolve_log with kT = 0 is bitwise the linear evolution") {
  Grid g(Axis{-10.0, 10.0, 128});
  auto wf = gaussian_wf(g, 1.0);
  auto V = harmonic(g, 1.0, 1.0);
  auto linear = qevolve::evolve(wf, V, 0.1, 0.01);
  auto log0 = qevolve::evolve_log(wf, V, 0.0, 0.1, 0.01);
  for (std::size_t k = 0; k < linear.psi.size(); ++k) {
    CHECK(linear.psi[k].real() == log0.psi[k].real());
    CHECK(linear.psi[k].imag() == log0.psi[k].imag());
  }
}

TEST_CASE("evolve_log norm drift stays below 1e-7 over a thousand steps") {
  Grid g(Axis{-12.0, 12.0, 256});
  auto wf = gaussian_wf(g, 1.0);
  ScalarField zero(g);
  auto out = qevolve::evolve_log(wf, zero, 0.05, 1000 * 0.002, 0.002);
  CHECK(std::abs(out.norm_sq() - 1.0) < 1e-7);
}

TEST_CASE("a Gausson of the stationary problem stays put under evolve_log") {
  // Solve the stationary problem with D = hbar^2/2m, feed sqrt(rho) to the
  // time stepper with the same kT: the width must not move.
  const double mass = 1.0, hbar = 1.0, omega = 2.0, kT = 0.3;
  const double D = hbar * hbar / (2.0 * mass);
  Grid g(Axis{-8.0, 8.0, 512});
  logse::Problem prob{harmonic(g, mass, omega), D, kT};
  prob.tol = 1e-11;
  auto sol = logse::solve(prob);
  ComplexField psi(g);
  for (std::size_t k = 0; k < psi.size(); ++k) psi[k] = std::sqrt(sol.density[k]);
  auto wf = qevolve::make_wave_function(std::move(psi), mass, 1.0, hbar);
  const double var0 = density_variance(wf);
  auto out = qevolve::evolve_log(wf, prob.potential, kT, 1.0, 0.002);
  CHECK(std::abs(density_variance(out) - var0) / var0 < 1e-3);
}

TEST_CASE("current of a real wave function vanishes identically") {
  Grid g(Axis{-10.0, 10.0, 160});
  auto wf = gaussian_wf(g, 1.0);
  auto cd = qevolve::current(wf);
  for (double j : cd.current.component(0)) CHECK(j == 0.0);
  // charge density integrates to q
  CHECK(integrate(cd.charge_density) == doctest::Approx(wf.charge).epsilon(1e-9));
}

TEST_CASE("plane wave current matches q p/m |psi|^2") {
  const double hbar = 1.0, mass = 1.0, charge = 2.0, L = 10.0;
  const int n = 201;
  Grid g(Axis{0.0, L, n});
  const double p0 = 2.0 * M_PI * hbar * 3.0 / L;  // 3 whole wavelengths
  auto psi = ComplexField::sample(
      g, [&](Vec3 q) { return std::polar(1.0 / std::sqrt(L), p0 * q[0] / hbar); },
      Boundary::periodic);
  WaveFunction wf{std::move(psi), mass, charge, hbar, 0.0};
  auto cd = qevolve::current(wf);
  const double h = g.spacing(0);
  // Central differences see sin(p h / hbar)/h in place of p/hbar.
  const double p_discrete = hbar * std::sin(p0 * h / hbar) / h;
  for (std::size_t k = 0; k < cd.current.component(0).size(); ++k) {
    const double density = std::norm(wf.psi[k]);
    CHECK(cd.current.component(0)[k] ==
          doctest::Approx(charge * p_discrete / mass * density).epsilon(1e-12));
    CHECK(std::abs(cd.current.component(0)[k] - charge * p0 / mass * density) <
          charge * p0 / mass * density * std::pow(p0 * h / hbar, 2));
  }
}

TEST_CASE("charge continuity holds to discretization order") {
  const double dt = 0.002;
  Grid g(Axis{-10.0, 10.0, 256});
  auto wf = gaussian_wf(g, 1.0, 0.6);
  auto V = harmonic(g, 1.0, 1.0);
  auto before = qevolve::evolve(wf, V, 5 * dt, dt);
  auto mid = qevolve::evolve(before, V, dt, dt);
  auto after = qevolve::evolve(mid, V, dt, dt);
  auto cd_before = qevolve::current(before);
  auto cd_mid = qevolve::current(mid);
  auto cd_after = qevolve::current(after);
  auto div_j = divergence(cd_mid.current);
  double worst = 0.0, scale = 0.0;
  int idx[3];
  for (std::size_t k = 0; k < div_j.size(); ++k) {
    g.unflatten(k, idx);
    if (idx[0] < 8 || idx[0] > g.n(0) - 9) continue;
    const double drho_dt =
        (cd_after.charge_density[k] - cd_before.charge_density[k]) / (2.0 * dt);
    worst = std::max(worst, std::abs(drho_dt + div_j[k]));
    scale = std::max(scale, std::abs(drho_dt));
  }
  CHECK(worst < 5e-3 * std::max(scale, 1e-30));
}

TEST_CASE("expectation of position vanishes for an even packet") {
  Grid g(Axis{-9.0, 9.0, 257});
  auto wf = gaussian_wf(g, 1.2);
  CHECK(std::abs(qevolve::expect_position(wf)[0]) < 1e-10);
}

TEST_CASE("harmonic ground state has <a^2> = omega^3 hbar (2m)^-1") {
  const double mass = 1.3, omega = 2.0, hbar = 1.0;
  Grid g(Axis{-6.0, 6.0, 801});
  const double sigma = std::sqrt(hbar / (2.0 * mass * omega));
  auto psi = ComplexField::sample(g, [&](Vec3 p) {
    return cplx(std::exp(-p[0] * p[0] / (4.0 * sigma * sigma)), 0.0);
  });
  auto wf = qevolve::make_wave_function(std::move(psi), mass, 1.0, hbar);
  auto V = harmonic(g, mass, omega);
  const double expected = omega * omega * omega * hbar / (2.0 * mass);
  CHECK(qevolve::expect_acceleration_sq(wf, V) ==
        doctest::Approx(expected).epsilon(1e-5));
}

TEST_CASE("linear potential gives <a>^2 = <a^2> exactly") {
  Grid g(Axis{-9.0, 9.0, 257});
  auto wf = gaussian_wf(g, 1.0, 0.0, 1.7);
  auto V = ScalarField::sample(g, [](Vec3 p) { return 0.8 * p[0]; });
  const Vec3 a = qevolve::expect_acceleration(wf, V);
  const double a2 = qevolve::expect_acceleration_sq(wf, V);
  CHECK(a[0] * a[0] == doctest::Approx(a2).epsilon(1e-12));
}

TEST_CASE("evolution commutes with grid translation") {
  // Shifting (psi, V) by a whole number of cells shifts the result.
  Grid g(Axis{-12.0, 12.0, 384});
  const int shift = 16;
  const double dx = shift * g.spacing(0);
  auto wf = gaussian_wf(g, 0.9);
  auto wf_shifted = [&] {
    auto psi = ComplexField::sample(g, [&](Vec3 p) {
      const double x = p[0] - dx;
      return cplx(std::exp(-x * x / (4.0 * 0.9 * 0.9)), 0.0);
    });
    return qevolve::make_wave_function(std::move(psi), 1.0, 1.0, 1.0);
  }();
  auto V = ScalarField::sample(g, [](Vec3 p) { return 0.03 * p[0] * p[0]; });
  auto V_shifted = ScalarField::sample(g, [&](Vec3 p) {
    const double x = p[0] - dx;
    return 0.03 * x * x;
  });
  auto a = qevolve::evolve(wf, V, 0.5, 0.005);
  auto b = qevolve::evolve(wf_shifted, V_shifted, 0.5, 0.005);
  double worst = 0.0;
  for (int i = 0; i + shift < g.n(0); ++i)
    worst = std::max(worst, std::abs(a.psi[i] - b.psi[i + shift]));
  CHECK(worst < 1e-7);
}

TEST_CASE("current is invariant under a global phase") {
  Grid g(Axis{-10.0, 10.0, 160});
  auto wf = gaussian_wf(g, 1.0, 0.5);
  auto rotated = wf;
  const cplx phase = std::polar(1.0, 1.234);
  for (std::size_t k = 0; k < rotated.psi.size(); ++k) rotated.psi[k] *= phase;
  auto a = qevolve::current(wf);
  auto b = qevolve::current(rotated);
  for (std::size_t k = 0; k < a.current.component(0).size(); ++k) {
    CHECK(a.current.component(0)[k] ==
          doctest::Approx(b.current.component(0)[k]).epsilon(1e-12));
    CHECK(a.charge_density[k] == doctest::Approx(b.charge_density[k]).epsilon(1e-12));
  }
}

TEST_CASE("wave function invariants are enforced") {
  Grid g(Axis{-2.0, 2.0, 64});
  auto psi = ComplexField::sample(g, [](Vec3 p) {
    return cplx(std::exp(-p[0] * p[0]), 0.0);  // visible at the box edge
  });
  auto wf = qevolve::make_wave_function(std::move(psi), 1.0, 1.0, 1.0);
  CHECK_THROWS_AS(wf.validate(), InvalidInput);
}

}  // TEST_SUITE
