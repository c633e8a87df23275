#include "pafnet/reference.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

#include "pafnet/errors.hpp"
#include "pafnet/special.hpp"

namespace pafnet {

using ad::Expr;
using ad::Graph;

// ---------------------------------------------------------------------------
// fields

namespace {

double interp1(const std::vector<double>& axis, double q, std::size_t& i0,
               double& w) {
  // clamped linear interpolation weight along one uniform axis
  if (axis.size() < 2)
    throw RangeOutsideOracle("field axis has fewer than two samples");
  const double lo = axis.front(), hi = axis.back();
  if (q < lo - 1e-12 || q > hi + 1e-12)
    throw RangeOutsideOracle("query " + std::to_string(q) + " outside grid [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "]");
  const double h = (axis.size() > 1) ? (hi - lo) / static_cast<double>(axis.size() - 1)
                                     : 1.0;
  double s = (q - lo) / h;
  s = std::clamp(s, 0.0, static_cast<double>(axis.size() - 1));
  i0 = std::min(static_cast<std::size_t>(s), axis.size() - 2);
  w = s - static_cast<double>(i0);
  return h;
}

}  // namespace

double Field1D::interp(double xq, double tq) const {
  std::size_t ix, it;
  double wx, wt;
  interp1(x, xq, ix, wx);
  interp1(t, tq, it, wt);
  const double a = values[it][ix] * (1 - wx) + values[it][ix + 1] * wx;
  const double b = values[it + 1][ix] * (1 - wx) + values[it + 1][ix + 1] * wx;
  return a * (1 - wt) + b * wt;
}

double Field1D::mass_at(std::size_t time_index) const {
  const auto& v = values[time_index];
  const double dx = x[1] - x[0];
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) m += 0.5 * (v[i] + v[i + 1]) * dx;
  return m;
}

double Field2D::interp(double xq, double yq) const {
  std::size_t ix, iy;
  double wx, wy;
  interp1(x, xq, ix, wx);
  interp1(y, yq, iy, wy);
  const double a = values[ix][iy] * (1 - wy) + values[ix][iy + 1] * wy;
  const double b = values[ix + 1][iy] * (1 - wy) + values[ix + 1][iy + 1] * wy;
  return a * (1 - wx) + b * wx;
}

// ---------------------------------------------------------------------------
// closed forms

namespace {

struct OscillatorConstants {
  double delta, omega, phi, two_a;
};

OscillatorConstants oscillator_constants(double m, double mu, double k) {
  const double delta = mu / (2.0 * m);
  const double omega0 = std::sqrt(k / m);
  if (delta >= omega0) throw Overdamped(delta, omega0);
  OscillatorConstants c;
  c.delta = delta;
  c.omega = std::sqrt(omega0 * omega0 - delta * delta);
  c.phi = std::atan(-delta / c.omega);
  c.two_a = 1.0 / std::cos(c.phi);
  return c;
}

}  // namespace

double analytic_oscillator(double t, double m, double mu, double k) {
  const OscillatorConstants c = oscillator_constants(m, mu, k);
  return std::exp(-c.delta * t) * c.two_a * std::cos(c.phi + c.omega * t);
}

Expr analytic_oscillator_expr(Graph& g, Expr t, double m, double mu, double k) {
  const OscillatorConstants c = oscillator_constants(m, mu, k);
  return g.exp(-c.delta * t) * (c.two_a * g.cos(c.phi + c.omega * t));
}

double analytic_advection_dispersion(double x, double t, double C0, double v,
                                     double D) {
  if (D <= 0.0) throw InvalidRange("advection-dispersion needs D > 0");
  if (x < 0.0) throw InvalidRange("advection-dispersion solution needs x >= 0");
  if (t <= 0.0) return x == 0.0 ? C0 : 0.0;  // initial condition
  const double s = 2.0 * std::sqrt(D * t);
  const double a1 = (x - v * t) / s;
  const double a2 = (x + v * t) / s;
  const double e = v * x / D;
  double second;
  if (e < 700.0) {
    second = std::exp(e) * special::erfc(a2);
  } else {
    // e^{e} erfc(a2) = e^{e - a2^2} erfcx(a2); a2 >= 0 whenever x, v, t > 0
    second = std::exp(e - a2 * a2) * special::erfcx(a2);
  }
  return 0.5 * C0 * (special::erfc(a1) + second);
}

Expr analytic_advection_dispersion_expr(Graph& g, Expr x, Expr t, double C0,
                                        double v, double D) {
  Expr s = 2.0 * g.sqrt(D * t);
  Expr first = g.erfc((x - v * t) / s);
  Expr second = g.exp(v / D * x) * g.erfc((x + v * t) / s);
  return 0.5 * C0 * (first + second);
}

// ---------------------------------------------------------------------------
// diffusion solver

Field1D fd_diffusion_solve(const DiffusivityFn& D, const ProfileFn& ic, double xlo,
                           double xhi, double T, int nx, double dt,
                           int save_stride) {
  if (nx < 3) throw InvalidRange("fd_diffusion_solve: nx must be >= 3");
  if (!(xhi > xlo)) throw InvalidRange("fd_diffusion_solve: empty x range");
  if (dt <= 0.0 || T < 0.0) throw InvalidRange("fd_diffusion_solve: bad time setup");
  if (save_stride < 1) throw InvalidRange("fd_diffusion_solve: save_stride >= 1");

  const double dx = (xhi - xlo) / static_cast<double>(nx - 1);
  Field1D out;
  out.problem = "diffusion";
  out.x.resize(nx);
  for (int i = 0; i < nx; ++i) out.x[i] = xlo + dx * i;

  std::vector<double> c(nx), next(nx);
  for (int i = 0; i < nx; ++i) c[i] = ic(out.x[i]);
  c[0] = 0.0;
  c[nx - 1] = 0.0;  // Dirichlet edges stand in for the infinite boundaries

  out.t.push_back(0.0);
  out.values.push_back(c);

  const long n_steps = static_cast<long>(std::llround(T / dt));
  std::vector<double> dface(nx - 1);
  for (long step = 0; step < n_steps; ++step) {
    const double t_now = static_cast<double>(step) * dt;
    double dmax = 0.0;
    for (int i = 0; i + 1 < nx; ++i) {
      const double da = D(out.x[i], t_now);
      const double db = D(out.x[i + 1], t_now);
      if (da <= 0.0) throw NonPositiveD(out.x[i], da);
      if (db <= 0.0) throw NonPositiveD(out.x[i + 1], db);
      dface[i] = 0.5 * (da + db);
      dmax = std::max(dmax, dface[i]);
    }
    if (dt > 0.4 * dx * dx / dmax)
      throw UnstableStep("dt=" + std::to_string(dt) + " exceeds 0.4 dx^2/maxD = " +
                         std::to_string(0.4 * dx * dx / dmax));

    const double r = dt / (dx * dx);
    next[0] = 0.0;
    next[nx - 1] = 0.0;
    for (int i = 1; i + 1 < nx; ++i)
      next[i] = c[i] + r * (dface[i] * (c[i + 1] - c[i]) -
                            dface[i - 1] * (c[i] - c[i - 1]));
    c.swap(next);

    if ((step + 1) % save_stride == 0) {
      out.t.push_back(static_cast<double>(step + 1) * dt);
      out.values.push_back(c);
    }
  }
  return out;
}

double stable_diffusion_dt(const DiffusivityFn& D, double xlo, double xhi, int nx,
                           double t_probe_max, double save_interval) {
  const double dx = (xhi - xlo) / static_cast<double>(nx - 1);
  double dmax = 0.0;
  const int probes = 200;
  for (int i = 0; i <= probes; ++i) {
    const double x = xlo + (xhi - xlo) * i / static_cast<double>(probes);
    for (int j = 0; j <= probes; ++j) {
      const double t = t_probe_max * j / static_cast<double>(probes);
      dmax = std::max(dmax, D(x, t));
    }
  }
  if (dmax <= 0.0) throw NonPositiveD(xlo, dmax);
  const double bound = 0.4 * dx * dx / dmax;
  const long k = std::max(1l, static_cast<long>(std::ceil(save_interval / bound)));
  return save_interval / static_cast<double>(k);
}

// ---------------------------------------------------------------------------
// Laplace solver

Field2D fd_laplace_solve(double lambda1, double lambda2, int n, double tol,
                         int max_sweeps) {
  if (n < 16) throw InvalidRange("fd_laplace_solve: n must be >= 16");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double h = two_pi / static_cast<double>(n - 1);

  Field2D out;
  out.problem = "laplace";
  out.meta = {{"lambda1", lambda1}, {"lambda2", lambda2}};
  out.x.resize(n);
  out.y.resize(n);
  for (int i = 0; i < n; ++i) out.x[i] = h * i;
  out.y = out.x;
  out.values.assign(n, std::vector<double>(n, 0.0));
  auto& u = out.values;

  for (int j = 0; j < n; ++j) {
    const double y = out.y[j];
    u[0][j] = 3.0 * y * std::sin(y + lambda1);
    u[n - 1][j] = 3.0 * y * std::sin(y + lambda1);
  }
  for (int i = 0; i < n; ++i) {
    const double x = out.x[i];
    u[i][0] = 3.0 * x * std::sin(x + lambda2);
    u[i][n - 1] = 3.0 * x * std::sin(x + lambda2);
  }

  const double omega = 2.0 / (1.0 + std::sin(std::numbers::pi / (n - 1)));
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_res = 0.0;
    for (int i = 1; i + 1 < n; ++i)
      for (int j = 1; j + 1 < n; ++j) {
        const double res =
            u[i - 1][j] + u[i + 1][j] + u[i][j - 1] + u[i][j + 1] - 4.0 * u[i][j];
        u[i][j] += omega * 0.25 * res;
        max_res = std::max(max_res, std::fabs(res));
      }
    if (max_res < tol) return out;
  }
  throw NoConvergence("fd_laplace_solve: residual above " + std::to_string(tol) +
                      " after " + std::to_string(max_sweeps) + " sweeps");
}

// ---------------------------------------------------------------------------
// dataset assembly

const char* role_name(Role role) {
  switch (role) {
    case Role::Data: return "data";
    case Role::Validation: return "validation";
    case Role::Physics: return "physics";
    case Role::Test: return "test";
  }
  return "?";
}

namespace {

void check_inside(const std::vector<std::pair<double, double>>& ranges,
                  const std::vector<std::pair<double, double>>& domain,
                  const char* label) {
  if (ranges.size() != domain.size())
    throw RangeOutsideOracle(std::string(label) + ": dimension mismatch");
  for (std::size_t d = 0; d < ranges.size(); ++d) {
    if (ranges[d].first < domain[d].first - 1e-12 ||
        ranges[d].second > domain[d].second + 1e-12)
      throw RangeOutsideOracle(std::string(label) + " range [" +
                               std::to_string(ranges[d].first) + ", " +
                               std::to_string(ranges[d].second) +
                               "] outside the oracle domain");
  }
}

PointMatrix sample_role(const std::vector<std::pair<double, double>>& ranges,
                        const std::vector<int>& counts, SampleMode mode,
                        std::uint64_t seed) {
  if (mode == SampleMode::Grid) {
    std::vector<int> per_axis = counts;
    if (per_axis.size() == 1 && ranges.size() > 1)
      per_axis.assign(ranges.size(), counts[0]);
    return sample_grid(ranges, per_axis);
  }
  if (counts.size() != 1)
    throw InvalidRange("random sampling takes a single total count");
  return sample_collocation(ranges, counts[0], seed, SampleMode::UniformRandom);
}

}  // namespace

Dataset make_dataset(const std::vector<std::string>& vars, const TruthFn& truth,
                     const std::vector<std::pair<double, double>>& oracle_domain,
                     const SplitSpec& split, std::uint64_t seed) {
  Dataset ds;
  ds.vars = vars;
  check_inside(split.data_ranges, oracle_domain, "data");
  check_inside(split.physics_ranges, oracle_domain, "physics");
  if (!split.test_ranges.empty())
    check_inside(split.test_ranges, oracle_domain, "test");

  PointMatrix data_all =
      sample_role(split.data_ranges, split.n_data, split.mode, seed * 3 + 1);
  ds.physics_points =
      sample_role(split.physics_ranges, split.n_physics, split.mode, seed * 3 + 2);
  const bool want_test = !split.test_ranges.empty() && !split.n_test.empty() &&
                         split.n_test[0] > 0;
  if (want_test)
    ds.test_points =
        sample_role(split.test_ranges, split.n_test, split.mode, seed * 3 + 3);

  // held-out validation split from the data range
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<std::size_t> order(data_all.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng() % i]);
  const std::size_t n_val =
      static_cast<std::size_t>(std::floor(split.validation_fraction *
                                          static_cast<double>(data_all.size())));
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& pt = data_all[order[i]];
    const double v = truth(pt);
    if (i < n_val) {
      ds.val_points.push_back(pt);
      ds.val_values.push_back(v);
    } else {
      ds.data_points.push_back(pt);
      ds.data_values.push_back(v);
    }
  }
  for (const auto& pt : ds.test_points) ds.test_values.push_back(truth(pt));
  return ds;
}

void write_dataset_csv(const Dataset& ds, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  for (const auto& v : ds.vars) os << v << ',';
  os << "value,role\n";
  char buf[32];
  auto row = [&](const std::vector<double>& pt, double value, Role role) {
    for (double c : pt) {
      std::snprintf(buf, sizeof buf, "%.17g", c);
      os << buf << ',';
    }
    if (std::isnan(value)) {
      os << "";
    } else {
      std::snprintf(buf, sizeof buf, "%.17g", value);
      os << buf;
    }
    os << ',' << role_name(role) << '\n';
  };
  for (std::size_t i = 0; i < ds.data_points.size(); ++i)
    row(ds.data_points[i], ds.data_values[i], Role::Data);
  for (std::size_t i = 0; i < ds.val_points.size(); ++i)
    row(ds.val_points[i], ds.val_values[i], Role::Validation);
  for (const auto& pt : ds.physics_points)
    row(pt, std::numeric_limits<double>::quiet_NaN(), Role::Physics);
  for (std::size_t i = 0; i < ds.test_points.size(); ++i)
    row(ds.test_points[i], ds.test_values[i], Role::Test);
}

void write_field_csv(const Field1D& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os.precision(12);
  os << "t\\x";
  for (double x : f.x) os << ',' << x;
  os << '\n';
  for (std::size_t it = 0; it < f.t.size(); ++it) {
    os << f.t[it];
    for (double v : f.values[it]) os << ',' << v;
    os << '\n';
  }
}

void write_field_csv(const Field2D& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os.precision(12);
  os << "x\\y";
  for (double y : f.y) os << ',' << y;
  os << '\n';
  for (std::size_t ix = 0; ix < f.x.size(); ++ix) {
    os << f.x[ix];
    for (double v : f.values[ix]) os << ',' << v;
    os << '\n';
  }
}

}  // namespace pafnet
