#include <cmath>
#include <complex>
#include <sstream>

#include "doctest.h"
#include "sqmlab/field_io.hpp"
#include "sqmlab/field_ops.hpp"
#include "sqmlab/rng.hpp"

using namespace sqmlab;

TEST_SUITE("fields") {

TEST_CASE("grid invariants") {
  CHECK_THROWS_AS(Grid(Axis{0.0, 1.0, 3}), InvalidInput);
  CHECK_THROWS_AS(Grid(Axis{1.0, 1.0, 8}), InvalidInput);
  Grid g(Axis{0.0, 1.0, 11});
  CHECK(g.spacing(0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(g.node_count() == 11);
  CHECK(g.coord(0, 10) == doctest::Approx(1.0));
}

TEST_CASE("laplacian of x^2 is exactly 2 in the interior") {
  Grid g(Axis{-1.0, 1.0, 33});
  auto f = ScalarField::sample(g, [](Vec3 p) { return p[0] * p[0]; });
  auto lap = laplacian(f);
  for (std::size_t k = 1; k + 1 < lap.size(); ++k)
    CHECK(lap[k] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("laplacian of a constant is zero") {
  Grid g(Axis{-1.0, 1.0, 16}, Axis{-1.0, 1.0, 16});
  auto f = ScalarField::sample(g, [](Vec3) { return 3.7; });
  auto lap = laplacian(f);
  CHECK(linf_norm(lap) < 1e-12);
}

TEST_CASE("periodic laplacian of sin(kx) converges at second order") {
  // Analytic second derivative -k^2 sin(kx) is the oracle.
  const double k = 2.0 * M_PI;
  auto run = [&](int n) {
    Grid g(Axis{0.0, 1.0, n});
    auto f = ScalarField::sample(g, [&](Vec3 p) { return std::sin(k * p[0]); },
                                 Boundary::periodic);
    auto lap = laplacian(f);
    double err = 0.0;
    for (std::size_t j = 0; j < lap.size(); ++j) {
      const double want = -k * k * std::sin(k * g.coord(0, static_cast<int>(j)));
      err = std::max(err, std::abs(lap[j] - want));
    }
    return err;
  };
  const double e1 = run(65);
  const double e2 = run(129);
  CHECK(e1 / e2 > 3.4);
  CHECK(e1 / e2 < 4.6);
}

TEST_CASE("gradient of x is exactly one") {
  Grid g(Axis{-2.0, 2.0, 21});
  auto f = ScalarField::sample(g, [](Vec3 p) { return p[0]; });
  auto grad = gradient(f);
  for (double v : grad.component(0)) CHECK(v == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("gradient of a constant is zero") {
  Grid g(Axis{-2.0, 2.0, 21});
  auto f = ScalarField::sample(g, [](Vec3) { return -5.0; });
  auto grad = gradient(f);
  for (double v : grad.component(0)) CHECK(std::abs(v) < 1e-13);
}

TEST_CASE("gradient of exp(-x^2) converges to the analytic derivative") {
  auto run = [&](int n) {
    Grid g(Axis{-4.0, 4.0, n});
    auto f = ScalarField::sample(g, [](Vec3 p) { return std::exp(-p[0] * p[0]); });
    auto grad = gradient(f);
    double err = 0.0;
    for (int j = 0; j < n; ++j) {
      const double x = g.coord(0, j);
      err = std::max(err, std::abs(grad.component(0)[j] + 2.0 * x * std::exp(-x * x)));
    }
    return err;
  };
  const double e1 = run(101);
  const double e2 = run(201);
  CHECK(e1 / e2 > 3.0);
}

TEST_CASE("integrate of one over the unit interval") {
  Grid g(Axis{0.0, 1.0, 17});
  auto f = ScalarField::sample(g, [](Vec3) { return 1.0; });
  CHECK(integrate(f) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("integrate of a normalized Gaussian well inside the box") {
  const double sigma = 0.5;
  Grid g(Axis{-8.0, 8.0, 257});
  auto f = ScalarField::sample(g, [&](Vec3 p) {
    return std::exp(-p[0] * p[0] / (2.0 * sigma * sigma)) /
           (sigma * std::sqrt(2.0 * M_PI));
  });
  CHECK(std::abs(integrate(f) - 1.0) < 1e-8);
}

TEST_CASE("integration is linear") {
  Grid g(Axis{0.0, 2.0, 33});
  Rng rng(99);
  ScalarField f(g), h(g);
  for (std::size_t k = 0; k < f.size(); ++k) {
    f[k] = rng.uniform();
    h[k] = rng.uniform();
  }
  const double a = 2.25, b = -0.75;
  ScalarField combo(g);
  for (std::size_t k = 0; k < f.size(); ++k) combo[k] = a * f[k] + b * h[k];
  CHECK(integrate(combo) ==
        doctest::Approx(a * integrate(f) + b * integrate(h)).epsilon(1e-14));
}

TEST_CASE("integral of the periodic laplacian vanishes to machine precision") {
  Grid g(Axis{0.0, 1.0, 41});
  Rng rng(7);
  ScalarField f(g, Boundary::periodic);
  for (std::size_t k = 0; k + 1 < f.size(); ++k) f[k] = rng.uniform();
  f[f.size() - 1] = f[0];  // seam
  auto lap = laplacian(f);
  CHECK(std::abs(integrate(lap)) < 1e-11 * linf_norm(f) / (g.spacing(0) * g.spacing(0)));
}

TEST_CASE("gradient of a radial field points radially") {
  Grid g = Grid::centered(2, 3.0, 61);
  auto f = ScalarField::sample(g, [](Vec3 p) { return std::exp(-norm_sq(p)); });
  auto grad = gradient(f);
  double worst = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const Vec3 p = g.point(k);
    const double r = norm(p);
    if (r < 0.3 || r > 2.0) continue;
    const Vec3 gv = grad.value(k);
    // transverse part: g - (g.r̂) r̂
    const Vec3 rad = p / r;
    const Vec3 trans = gv - dot(gv, rad) * rad;
    worst = std::max(worst, norm(trans));
  }
  CHECK(worst < 5e-3);
}

TEST_CASE("divergence of a gradient matches the laplacian in the interior") {
  Grid g = Grid::centered(2, 2.0, 41);
  auto f = ScalarField::sample(g, [](Vec3 p) { return std::sin(p[0]) * std::cos(p[1]); });
  auto div = divergence(gradient(f));
  auto lap = laplacian(f);
  double worst = 0.0;
  int idx[3];
  for (std::size_t k = 0; k < f.size(); ++k) {
    g.unflatten(k, idx);
    if (idx[0] < 2 || idx[0] > 38 || idx[1] < 2 || idx[1] > 38) continue;
    worst = std::max(worst, std::abs(div[k] - lap[k]));
  }
  CHECK(worst < 5e-3);
}

TEST_CASE("multilinear interpolation reproduces a linear function") {
  Grid g = Grid::centered(3, 1.0, 5);
  auto f = ScalarField::sample(g, [](Vec3 p) { return 1.0 + 2.0 * p[0] - p[1] + 0.5 * p[2]; });
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    Vec3 p{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
    CHECK(interpolate(f, p) ==
          doctest::Approx(1.0 + 2.0 * p[0] - p[1] + 0.5 * p[2]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(interpolate(f, Vec3{1.5, 0.0, 0.0}), InvalidInput);
}

TEST_CASE("field CSV carries grid metadata and is stable") {
  Grid g(Axis{0.0, 1.0, 4});
  auto f = ScalarField::sample(g, [](Vec3 p) { return p[0]; });
  std::ostringstream a, b;
  write_field_csv(a, f, 0.5);
  write_field_csv(b, f, 0.5);
  CHECK(a.str() == b.str());
  CHECK(a.str().find("# dim=1") == 0);
  CHECK(a.str().find("t=0.5") != std::string::npos);
  CHECK(a.str().find("x,re") != std::string::npos);
}

}  // TEST_SUITE
