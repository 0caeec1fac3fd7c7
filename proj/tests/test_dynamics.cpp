#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "support.hpp"
#include "tmu/dynamics.hpp"
#include "tmu/error.hpp"
#include "tmu/sampling.hpp"

using namespace tmu;

namespace {
const double kPi = std::numbers::pi;

using State = std::array<double, 8>;

// Classical RK4 on (x, y) with a fixed small step; independent of the
// adaptive integrator.
State rk4(const SpacetimeModel& m, double alpha, State s, double dt, int n) {
  auto f = [&](const State& u) {
    const Point4 x{u[0], u[1], u[2], u[3]}, y{u[4], u[5], u[6], u[7]};
    const auto a = worldline_rhs(m, x, y, alpha);
    return State{y[0], y[1], y[2], y[3], a[0], a[1], a[2], a[3]};
  };
  const double h = dt / n;
  for (int i = 0; i < n; ++i) {
    State k1 = f(s), t = s;
    for (int j = 0; j < 8; ++j) t[j] = s[j] + 0.5 * h * k1[j];
    State k2 = f(t);
    for (int j = 0; j < 8; ++j) t[j] = s[j] + 0.5 * h * k2[j];
    State k3 = f(t);
    for (int j = 0; j < 8; ++j) t[j] = s[j] + h * k3[j];
    State k4 = f(t);
    for (int j = 0; j < 8; ++j) s[j] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
  }
  return s;
}

double norm_sq(const SpacetimeModel& m, const Point4& x, const Point4& y) {
  const auto g = metric_value(m, x);
  double s = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s += g[i][j] * y[i] * y[j];
  return s;
}

// Bound, slightly eccentric orbit well outside the horizon.
WorldlineState bound_orbit() { return {0, {0, 10, 1.2, 0}, {1, 0.01, 0.001, 0.034}}; }

const SpacetimeModel& rn() {
  static const SpacetimeModel m = catalog("reissner_nordstrom", {{"M", 1.0}, {"Q", 0.3}});
  return m;
}
}  // namespace

TEST_CASE("randers lagrangian") {
  const auto mk = catalog("minkowski", {});
  CHECK(randers_lagrangian(mk, {0, 0, 0, 0}, {1, 0, 0, 0}, 0.0) == 1.0);
  const double f5 = 1 - 2.0 / 5 + 0.09 / 25;
  CHECK(randers_lagrangian(rn(), {0, 5, 1, 0}, {1, 0, 0, 0}, 1.0) ==
        doctest::Approx(std::sqrt(f5) + 0.06).epsilon(1e-14));
  const Point4 y{1.3, 0.1, 0.02, 0.01};
  CHECK(randers_lagrangian(rn(), {0, 5, 1, 0}, {3.9, 0.3, 0.06, 0.03}, 0.7) ==
        doctest::Approx(3 * randers_lagrangian(rn(), {0, 5, 1, 0}, y, 0.7)).epsilon(1e-14));
  CHECK_THROWS_AS(randers_lagrangian(mk, {0, 0, 0, 0}, {0, 1, 0, 0}, 0.0), SingularEvaluation);
}

TEST_CASE("worldline right-hand side") {
  const auto mk = catalog("minkowski", {});
  for (double v : worldline_rhs(mk, {0, 1, 2, 3}, {1.5, 0.2, 0.3, 0.1}, 0.0)) CHECK(v == 0.0);
  const auto uf = catalog("uniform_field", {{"E0", 0.1}});
  const auto a = worldline_rhs(uf, {0, 1, 0, 0}, {1, 0, 0, 0}, 1.0);
  CHECK(a[1] == doctest::Approx(0.1).epsilon(1e-15));

  Rng rng(11);
  const auto m = with_alpha(rn(), 0.5);
  for (int n = 0; n < 20; ++n) {
    const Point4 x = sample_base_point(m, sampling_box(m, std::nullopt), rng);
    const Point4 y = sample_timelike(m, x, rng);
    const auto r = worldline_rhs(m, x, y, 0.5);
    const auto G = spray(m, {x, y});
    for (int i = 0; i < 4; ++i) CHECK(std::abs(r[i] + 2 * G[i]) < 1e-12 * std::max(1.0, std::abs(r[i])));
  }
}

TEST_CASE("worldlines") {
  SUBCASE("straight lines") {
    const auto mk = catalog("minkowski", {});
    const auto tr = integrate_worldline(mk, {0, {1, 2, 3, 4}, {2, 0.5, -0.3, 0.1}}, 0.0, 7.0);
    const auto y0 = tr.y.front();
    CHECK(norm_sq(mk, {}, y0) == doctest::Approx(1.0).epsilon(1e-15));
    for (std::size_t k = 0; k < tr.t.size(); ++k)
      for (int i = 0; i < 4; ++i) {
        const double expect = Point4{1, 2, 3, 4}[i] + y0[i] * tr.t[k];
        CHECK(std::abs(tr.x[k][i] - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
      }
    CHECK(tr.t.size() == 101);
    CHECK(tr.t.back() == 7.0);
  }
  SUBCASE("circular orbit") {
    const auto s = catalog("schwarzschild", {{"M", 1.0}});
    const double r = 10, omega = std::sqrt(1 / (r * r * r));
    const double period = 2 * kPi / omega * std::sqrt(1 - 3 / r);
    const auto tr = integrate_worldline(s, {0, {0, r, kPi / 2, 0}, {1, 0, 0, omega}}, 0.0, period);
    for (const auto& x : tr.x) CHECK(std::abs(x[1] - r) < 1e-6);
    CHECK(std::abs(std::remainder(tr.x.back()[3], 2 * kPi)) < 1e-6);
  }
  SUBCASE("hyperbolic motion") {
    const auto uf = catalog("uniform_field", {{"E0", 0.1}});
    const double a = 0.1;
    const auto tr = integrate_worldline(uf, {0, {0, 1, 0, 0}, {1, 0, 0, 0}}, 1.0, 20.0);
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
      const double s = tr.t[k];
      CHECK(tr.x[k][0] == doctest::Approx(std::sinh(a * s) / a).epsilon(1e-8));
      CHECK(tr.x[k][1] == doctest::Approx(1 + (std::cosh(a * s) - 1) / a).epsilon(1e-8));
      CHECK(tr.y[k][1] == doctest::Approx(std::sinh(a * s)).epsilon(1e-8).scale(1));
    }
  }
  SUBCASE("norm drift over long runs") {
    const auto m = with_alpha(rn(), 0.5);
    const auto tr = integrate_worldline(m, bound_orbit(), 0.5, 100.0);
    CHECK(tr.max_norm_drift <= 1e-8);
    const auto s = catalog("schwarzschild", {{"M", 1.0}});
    CHECK(integrate_worldline(s, bound_orbit(), 0.0, 100.0).max_norm_drift <= 1e-8);
    const auto uf = catalog("uniform_field", {{"E0", 0.1}});
    // at alpha = 1 the rapidity reaches 10 and g(y,y) cancels two 1e8-sized
    // squares, which is past what doubles resolve at 1e-8; alpha = 0.5 keeps it at 5
    CHECK(integrate_worldline(uf, {0, {0, 0, 0, 0}, {1, 0.1, 0.2, 0}}, 0.5, 100.0).max_norm_drift <= 1e-8);
  }
  SUBCASE("agreement with an independent fixed-step integration") {
    const auto m = with_alpha(rn(), 0.5);
    WorldlineOptions opt;
    opt.samples = 20;
    const auto tr = integrate_worldline(m, bound_orbit(), 0.5, 20.0, opt);
    double worst = 0;
    for (std::size_t k = 0; k + 1 < tr.t.size(); ++k) {
      State s{};
      for (int i = 0; i < 4; ++i) {
        s[i] = tr.x[k][i];
        s[4 + i] = tr.y[k][i];
      }
      const State e = rk4(m, 0.5, s, tr.t[k + 1] - tr.t[k], 200);
      for (int i = 0; i < 4; ++i) {
        worst = std::max(worst, std::abs(e[i] - tr.x[k + 1][i]) / std::max(1.0, std::abs(e[i])));
        worst = std::max(worst, std::abs(e[4 + i] - tr.y[k + 1][i]) / std::max(1.0, std::abs(e[4 + i])));
      }
    }
    CHECK(worst <= 1e-9);
  }
  SUBCASE("failures") {
    const auto s = catalog("schwarzschild", {{"M", 1.0}});
    // dropped from rest close to the horizon: leaves the chart
    CHECK_THROWS_AS(integrate_worldline(s, {0, {0, 3, 1.0, 0}, {1, 0, 0, 0}}, 0.0, 100.0), SingularEvaluation);
    const auto mk = catalog("minkowski", {});
    CHECK_THROWS_AS(integrate_worldline(mk, {0, {0, 0, 0, 0}, {1, 1, 0, 0}}, 0.0, 1.0), SingularEvaluation);
  }
}

TEST_CASE("classical comparison") {
  const auto uf = catalog("uniform_field", {{"E0", 0.1}});
  CHECK(compare_classical(uf, {0, {0, 0, 0, 0}, {1, 0.2, 0, 0.1}}, 1.0, 10.0).max_deviation <= 1e-8);
  CHECK(compare_classical(with_alpha(rn(), 0.5), bound_orbit(), 0.5, 10.0).max_deviation <= 1e-8);
  CHECK(compare_classical(catalog("schwarzschild", {{"M", 1.0}}), bound_orbit(), 0.0, 10.0).max_deviation ==
        0.0);
}

TEST_CASE("deviation") {
  SUBCASE("flat space") {
    const auto mk = catalog("minkowski", {});
    const Point4 w0{0.1, 0.2, -0.3, 0.4}, W0{0, 0.01, 0.02, -0.03};
    const auto d = integrate_deviation(mk, {0, {0, 0, 0, 0}, {1, 0.3, 0, 0}}, 0.0, w0, W0, 5.0);
    for (std::size_t k = 0; k < d.w.size(); ++k)
      for (int i = 0; i < 4; ++i) CHECK(std::abs(d.w[k][i] - (w0[i] + W0[i] * d.base.t[k])) < 1e-14);
  }
  SUBCASE("tidal stretching and compression") {
    const auto s = catalog("schwarzschild", {{"M", 1.0}});
    const WorldlineState init{0, {0, 10, kPi / 2, 0}, {1, 0, 0, 0}};
    const auto radial = integrate_deviation(s, init, 0.0, {0, 1e-3, 0, 0}, {0, 0, 0, 0}, 5.0);
    const auto transverse = integrate_deviation(s, init, 0.0, {0, 0, 1e-4, 0}, {0, 0, 0, 0}, 5.0);
    // proper separations
    const double f0 = 0.8;
    const double rad0 = radial.w.front()[1] / std::sqrt(f0);
    const double r1 = radial.base.x.back()[1];
    const double rad1 = radial.w.back()[1] / std::sqrt(1 - 2 / r1);
    CHECK(rad1 > rad0);
    const double tr0 = 10 * transverse.w.front()[2];
    const double tr1 = transverse.base.x.back()[1] * transverse.w.back()[2];
    CHECK(tr1 < tr0);
  }
  SUBCASE("linearity and rate conventions") {
    const auto m = with_alpha(rn(), 0.5);
    const Point4 w0{0.01, 0.02, -0.001, 0.003}, W0{0, 0.001, 0.0005, -0.0002};
    Point4 w2 = w0, W2 = W0;
    for (int i = 0; i < 4; ++i) {
      w2[i] *= 2;
      W2[i] *= 2;
    }
    const auto a = integrate_deviation(m, bound_orbit(), 0.5, w0, W0, 20.0);
    const auto b = integrate_deviation(m, bound_orbit(), 0.5, w2, W2, 20.0);
    for (std::size_t k = 0; k < a.w.size(); ++k)
      for (int i = 0; i < 4; ++i) CHECK(std::abs(b.w[k][i] - 2 * a.w[k][i]) < 1e-12);

    // the same initial data expressed as a coordinate rate
    Point4 y0 = bound_orbit().y;
    const double n = std::sqrt(norm_sq(m, bound_orbit().x, y0));
    for (auto& v : y0) v /= n;
    const auto N = nonlinear_connection(m, {bound_orbit().x, y0});
    Point4 wdot{};
    for (int i = 0; i < 4; ++i) {
      wdot[i] = W0[i];
      for (int j = 0; j < 4; ++j) wdot[i] -= N[i][j] * w0[j];
    }
    const auto c = integrate_deviation(m, bound_orbit(), 0.5, w0, wdot, 20.0, DeviationRate::kCoordinate);
    for (std::size_t k = 0; k < a.w.size(); ++k)
      for (int i = 0; i < 4; ++i) CHECK(std::abs(c.w[k][i] - a.w[k][i]) < 1e-13);
  }
}

TEST_CASE("neighbouring worldlines") {
  SUBCASE("flat space is exactly linear") {
    const auto mk = catalog("minkowski", {});
    const auto r = neighbor_oracle(mk, {0, {0, 0, 0, 0}, {1, 0.3, 0, 0}}, 0.0, {0, 1, 0, 0}, {0, 0, 0.1, 0},
                                   1e-4, 10.0);
    CHECK(r.max_error < 1e-10);
  }
  SUBCASE("first-order convergence") {
    const auto s = catalog("schwarzschild", {{"M", 1.0}});
    const Point4 w0{0, 1, 0.05, 0.02}, W0{0, 0.01, 0, 0.005};
    const auto a = neighbor_oracle(s, bound_orbit(), 0.0, w0, W0, 1e-4, 20.0);
    const auto b = neighbor_oracle(s, bound_orbit(), 0.0, w0, W0, 5e-5, 20.0);
    CHECK(a.max_error / b.max_error >= 1.7);
    CHECK(a.max_error / b.max_error <= 2.3);

    const auto m = with_alpha(rn(), 0.5);
    const auto c = neighbor_oracle(m, bound_orbit(), 0.5, w0, W0, 1e-4, 20.0);
    const auto d = neighbor_oracle(m, bound_orbit(), 0.5, w0, W0, 5e-5, 20.0);
    CHECK(c.max_error / d.max_error >= 1.7);
    CHECK(c.max_error / d.max_error <= 2.3);
  }
}

TEST_CASE("csv export") {
  const auto mk = catalog("minkowski", {});
  WorldlineOptions opt;
  opt.samples = 4;
  const auto d = integrate_deviation(mk, {0, {0, 0, 0, 0}, {1, 0, 0, 0}}, 0.0, {0, 1, 0, 0}, {0, 0, 0, 0}, 1.0,
                                     DeviationRate::kCovariant, opt);
  std::ostringstream a, b;
  write_trajectory_csv(a, d.base);
  write_deviation_csv(b, d);
  std::istringstream in(a.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x0,x1,x2,x3,y0,y1,y2,y3");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 8);
  }
  CHECK(rows == 5);
  CHECK(b.str().substr(0, b.str().find('\n')) == "t,x0,x1,x2,x3,y0,y1,y2,y3,w0,w1,w2,w3,W0,W1,W2,W3");
  // 17 significant digits survive a round trip
  const auto tr = integrate_worldline(mk, {0, {0.1, 0, 0, 0}, {1, 0, 0, 0}}, 0.0, 1.0 / 3, opt);
  std::ostringstream c;
  write_trajectory_csv(c, tr);
  std::istringstream cin2(c.str());
  std::getline(cin2, line);
  std::getline(cin2, line);
  std::getline(cin2, line);
  CHECK(std::stod(line.substr(0, line.find(','))) == tr.t[1]);
}
