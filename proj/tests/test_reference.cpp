#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pafnet/reference.hpp"
#include "test_support.hpp"

using namespace pafnet;

TEST_CASE("analytic_oscillator: value, envelope, regime check") {
  const double m = 1.0, mu = 4.0, k = 400.0;
  CHECK(analytic_oscillator(0.0, m, mu, k) == doctest::Approx(1.0).epsilon(1e-14));

  const double delta = mu / (2 * m);
  const double omega0 = std::sqrt(k / m);
  const double omega = std::sqrt(omega0 * omega0 - delta * delta);
  const double two_a = 1.0 / std::cos(std::atan(-delta / omega));
  for (int i = 0; i <= 100; ++i) {
    const double t = 2.5 * i / 100.0;
    CHECK(std::fabs(analytic_oscillator(t, m, mu, k)) <=
          std::fabs(two_a) * std::exp(-delta * t) + 1e-12);
  }
  CHECK_THROWS_AS(analytic_oscillator(0.0, 1.0, 50.0, 400.0), Overdamped);
}

TEST_CASE("analytic_advection_dispersion: boundary, front, golden point") {
  const double C0 = 1.0, v = 0.003, D = 0.003;
  for (double t : {0.5, 10.0, 120.0})
    CHECK(analytic_advection_dispersion(0.0, t, C0, v, D) ==
          doctest::Approx(C0).epsilon(1e-12));
  CHECK(analytic_advection_dispersion(2.0, 1e-6, C0, v, D) < 1e-12);
  // t <= 0 falls back to the initial profile
  CHECK(analytic_advection_dispersion(0.7, 0.0, C0, v, D) == 0.0);
  CHECK(analytic_advection_dispersion(0.0, 0.0, C0, v, D) == C0);

  // golden value from the series-oracle erfc evaluation of the closed form
  const double x = 0.5, t = 50.0;
  const double s = 2.0 * std::sqrt(D * t);
  const double oracle =
      0.5 * C0 *
      (testsup::erfc_oracle((x - v * t) / s) +
       std::exp(v * x / D) * testsup::erfc_oracle((x + v * t) / s));
  CHECK(analytic_advection_dispersion(x, t, C0, v, D) ==
        doctest::Approx(oracle).epsilon(1e-12));

  // overflow-safe branch: vx/D = 720 would overflow exp(); well behind the
  // front the profile saturates at C0
  const double big = analytic_advection_dispersion(1.2, 30.0, 1.0, 0.9, 0.0015);
  CHECK(std::isfinite(big));
  CHECK(big == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("fd_diffusion_solve: t=0 slice is the initial profile") {
  ProfileFn ic = [](double x) {
    const double q = 1.0 / (x * x + 0.2);
    return 0.2 * q * q;
  };
  DiffusivityFn D = [](double x, double) {
    return 0.02 * (0.3 * x + std::log(x * x + 1.5));
  };
  Field1D f = fd_diffusion_solve(D, ic, -1.0, 1.0, 1.0, 21, 0.05, 20);
  CHECK(f.t[0] == 0.0);
  CHECK(f.values[0][10] == doctest::Approx(5.0).epsilon(1e-14));  // x = 0
  for (int i = 1; i + 1 < 21; ++i)
    CHECK(f.values[0][i] == doctest::Approx(ic(f.x[i])).epsilon(1e-14));
  CHECK(f.values[0][0] == 0.0);  // Dirichlet edges stand in for infinity
  CHECK(f.values[0][20] == 0.0);

  // the heterogeneous coefficient stays positive on the domain; its interior
  // minimum sits where 0.3 + 2x/(x^2+1.5) = 0, i.e. x = -(2-sqrt(3.46))/0.6
  double dmin = 1e9, xmin = 0;
  for (int i = 0; i <= 4000; ++i) {
    const double x = -1.0 + 2.0 * i / 4000.0;
    if (D(x, 0) < dmin) {
      dmin = D(x, 0);
      xmin = x;
    }
  }
  CHECK(dmin > 0.0);
  CHECK(xmin == doctest::Approx(-(2.0 - std::sqrt(3.46)) / 0.6).epsilon(1e-3));
  CHECK(dmin == doctest::Approx(0.0074224).epsilon(1e-4));
  CHECK(D(-1.0, 0) == doctest::Approx(0.012326).epsilon(1e-4));  // left-edge value
}

TEST_CASE("fd_diffusion_solve: constant-D Gaussian matches the heat kernel") {
  const double Dc = 0.01, sigma0 = 0.15;
  ProfileFn ic = [=](double x) {
    return std::exp(-x * x / (2 * sigma0 * sigma0));
  };
  DiffusivityFn D = [=](double, double) { return Dc; };
  const int nx = 201;
  const double dx = 2.0 / (nx - 1);
  const double dt = 0.25 * dx * dx / Dc;
  const int stride = static_cast<int>(std::ceil(1.0 / dt));
  Field1D f = fd_diffusion_solve(D, ic, -1.0, 1.0, stride * dt, nx, dt, stride);

  const double t1 = f.t.back();
  const double s2 = sigma0 * sigma0 + 2 * Dc * t1;
  double max_err = 0, max_val = 0;
  for (int i = 0; i < nx; ++i) {
    const double x = f.x[i];
    const double exact = sigma0 / std::sqrt(s2) * std::exp(-x * x / (2 * s2));
    max_err = std::max(max_err, std::fabs(f.values.back()[i] - exact));
    max_val = std::max(max_val, exact);
  }
  CHECK(max_err / max_val < 1e-3);
}

TEST_CASE("fd_diffusion_solve: mass conservation with negligible edge values") {
  // narrow pulse and small D keep the edges at ~1e-9 over [0, 30] s
  const double Dc = 3e-4, sigma0 = 0.1;
  ProfileFn ic = [=](double x) {
    return std::exp(-x * x / (2 * sigma0 * sigma0));
  };
  DiffusivityFn D = [=](double x, double) { return Dc * (1.0 + 0.3 * x); };
  const int nx = 101;
  const double dx = 2.0 / (nx - 1);
  const double dt = 0.2 * dx * dx / (Dc * 1.3);
  const int stride = 50;
  Field1D f = fd_diffusion_solve(D, ic, -1.0, 1.0, 30.0, nx, dt, stride);
  const double m0 = f.mass_at(0);
  for (std::size_t k = 1; k < f.t.size(); ++k)
    CHECK(std::fabs(f.mass_at(k) - m0) / m0 < 1e-6);
}

TEST_CASE("fd_diffusion_solve: stability and positivity guards") {
  ProfileFn ic = [](double) { return 1.0; };
  DiffusivityFn D = [](double, double) { return 0.02; };
  const double dx = 0.1;
  CHECK_THROWS_AS(
      fd_diffusion_solve(D, ic, -1.0, 1.0, 1.0, 21, 0.5 * dx * dx / 0.02, 1),
      UnstableStep);
  DiffusivityFn bad = [](double x, double) { return 0.01 - 0.02 * x * x; };
  CHECK_THROWS_AS(fd_diffusion_solve(bad, ic, -1.0, 1.0, 1.0, 21, 1e-4, 1),
                  NonPositiveD);
}

TEST_CASE("fd_diffusion_solve: second-order grid convergence") {
  ProfileFn ic = [](double x) {
    const double q = 1.0 / (x * x + 0.2);
    return 0.2 * q * q;
  };
  DiffusivityFn D = [](double x, double) {
    return 0.02 * (0.3 * x + std::log(x * x + 1.5));
  };
  const double T = 1.0;
  auto solve_at = [&](int nx) {
    const double dx = 2.0 / (nx - 1);
    const double dtb = 0.2 * dx * dx / 0.025;
    const long steps = static_cast<long>(std::ceil(T / dtb));
    const double dt = T / static_cast<double>(steps);
    return fd_diffusion_solve(D, ic, -1.0, 1.0, T, nx, dt,
                              static_cast<int>(steps));
  };
  Field1D coarse = solve_at(21);
  Field1D mid = solve_at(41);
  Field1D fine = solve_at(161);  // reference

  auto err_vs_fine = [&](const Field1D& f) {
    double e = 0;
    for (std::size_t i = 0; i < f.x.size(); ++i)
      e = std::max(e, std::fabs(f.values.back()[i] - fine.interp(f.x[i], T)));
    return e;
  };
  const double ratio = err_vs_fine(coarse) / err_vs_fine(mid);
  CHECK(ratio > 4.0 * 0.7);
  CHECK(ratio < 4.0 * 1.3);
}

TEST_CASE("fd_laplace_solve: corners, mean value, convergence order") {
  const double l1 = 3.14, l2 = 3.14;
  Field2D f = fd_laplace_solve(l1, l2, 33);
  CHECK(std::fabs(f.values[0][0]) < 1e-12);

  // discrete mean-value property at every interior point
  const int n = 33;
  for (int i = 1; i + 1 < n; ++i)
    for (int j = 1; j + 1 < n; ++j) {
      const double avg = 0.25 * (f.values[i - 1][j] + f.values[i + 1][j] +
                                 f.values[i][j - 1] + f.values[i][j + 1]);
      CHECK(std::fabs(f.values[i][j] - avg) < 1e-6);
    }

  Field2D ref = fd_laplace_solve(l1, l2, 129);
  auto err_vs_ref = [&](const Field2D& c) {
    double e = 0;
    for (std::size_t i = 1; i + 1 < c.x.size(); ++i)
      for (std::size_t j = 1; j + 1 < c.y.size(); ++j)
        e = std::max(e, std::fabs(c.values[i][j] - ref.interp(c.x[i], c.y[j])));
    return e;
  };
  const double e17 = err_vs_ref(fd_laplace_solve(l1, l2, 17));
  const double e33 = err_vs_ref(f);
  CHECK(e17 / e33 > 4.0 * 0.7);
  CHECK(e17 / e33 < 4.0 * 1.3);

  CHECK_THROWS_AS(fd_laplace_solve(l1, l2, 8), InvalidRange);
  CHECK_THROWS_AS(fd_laplace_solve(l1, l2, 33, 1e-8, 3), NoConvergence);
}

TEST_CASE("make_dataset: split roles, determinism, guards") {
  const double m = 1.0, mu = 4.0, k = 400.0;
  TruthFn truth = [&](std::span<const double> p) {
    return analytic_oscillator(p[0], m, mu, k);
  };
  SplitSpec split;
  split.data_ranges = {{0.0, 0.75}};
  split.physics_ranges = {{0.0, 1.5}};
  split.test_ranges = {{1.5, 2.5}};
  split.n_data = {40};
  split.n_physics = {100};
  split.n_test = {60};
  split.validation_fraction = 0.1;

  Dataset a = make_dataset({"t"}, truth, {{0.0, 1e9}}, split, 3);
  Dataset b = make_dataset({"t"}, truth, {{0.0, 1e9}}, split, 3);
  CHECK(a.data_points == b.data_points);
  CHECK(a.data_values == b.data_values);
  CHECK(a.val_points == b.val_points);
  CHECK(a.test_points == b.test_points);

  CHECK(a.data_points.size() + a.val_points.size() == 40);
  CHECK(a.val_points.size() == 4);
  CHECK(a.physics_points.size() == 100);
  CHECK(a.test_points.size() == 60);
  for (const auto& pt : a.data_points) {
    CHECK(pt[0] > 0.0);
    CHECK(pt[0] < 0.75);
  }
  for (const auto& pt : a.test_points) {
    CHECK(pt[0] > 1.5);
    CHECK(pt[0] < 2.5);
  }
  for (std::size_t i = 0; i < a.data_points.size(); ++i)
    CHECK(a.data_values[i] == truth(a.data_points[i]));

  Dataset c = make_dataset({"t"}, truth, {{0.0, 1e9}}, split, 4);
  CHECK(a.data_points != c.data_points);

  // empty test range: no test set, no error
  SplitSpec no_test = split;
  no_test.test_ranges.clear();
  Dataset d = make_dataset({"t"}, truth, {{0.0, 1e9}}, no_test, 3);
  CHECK(d.test_points.empty());

  SplitSpec outside = split;
  outside.test_ranges = {{-5.0, 2.5}};
  CHECK_THROWS_AS(make_dataset({"t"}, truth, {{0.0, 1e9}}, outside, 3),
                  RangeOutsideOracle);
}
