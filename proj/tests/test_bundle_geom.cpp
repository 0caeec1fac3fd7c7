#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "tmu/bundle_geom.hpp"
#include "tmu/error.hpp"

using namespace tmu;

namespace {

const double kPi = std::numbers::pi;

// Reissner-Nordstrom spray built from closed forms and differenced Christoffels.
struct RnOracle {
  double M, Q, alpha;

  Mat4<double> Fmixed(const Point4& x) const {
    const Mat4<double> g = oracle::reissner_nordstrom(M, Q)(x);
    Mat4<double> F{};
    F[0][1] = Q / (x[1] * x[1]);
    F[1][0] = -F[0][1];
    Mat4<double> out{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) out[i][j] = F[i][j] / g[i][i];
    return out;
  }

  Vec4<double> spray(const Point4& x, const Point4& y) const {
    const Mat4<double> g = oracle::reissner_nordstrom(M, Q)(x);
    const Rank3<double> G = oracle::christoffel(oracle::reissner_nordstrom(M, Q), x);
    const Mat4<double> Fm = Fmixed(x);
    double n2 = 0;
    for (int i = 0; i < 4; ++i) n2 += g[i][i] * y[i] * y[i];
    const double n = std::sqrt(n2);
    Vec4<double> out{};
    for (int i = 0; i < 4; ++i) {
      double s = 0;
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) s += 0.5 * G[i][j][k] * y[j] * y[k];
      for (int j = 0; j < 4; ++j) s -= 0.5 * alpha * n * Fm[i][j] * y[j];
      out[i] = s;
    }
    return out;
  }

  Mat4<double> N(const Point4& x, const Point4& y, double h = 1e-6) const {
    Mat4<double> out{};
    for (int j = 0; j < 4; ++j) {
      const auto p = spray(x, oracle::shifted(y, j, h)), m = spray(x, oracle::shifted(y, j, -h));
      for (int i = 0; i < 4; ++i) out[i][j] = (p[i] - m[i]) / (2 * h);
    }
    return out;
  }

  // E^i_j = (delta_k N^i_j - delta_j N^i_k) y^k
  Mat4<double> E(const Point4& x, const Point4& y) const {
    const double h = 1e-4;
    std::array<Mat4<double>, 4> dx{}, dy{};
    for (int k = 0; k < 4; ++k) {
      const auto a = N(oracle::shifted(x, k, h), y), b = N(oracle::shifted(x, k, -h), y);
      const auto c = N(x, oracle::shifted(y, k, h)), d = N(x, oracle::shifted(y, k, -h));
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          dx[k][i][j] = (a[i][j] - b[i][j]) / (2 * h);
          dy[k][i][j] = (c[i][j] - d[i][j]) / (2 * h);
        }
    }
    const auto n = N(x, y);
    auto delta = [&](int k, int i, int j) {
      double s = dx[k][i][j];
      for (int m = 0; m < 4; ++m) s -= n[m][k] * dy[m][i][j];
      return s;
    };
    Mat4<double> out{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) out[i][j] += (delta(k, i, j) - delta(j, i, k)) * y[k];
    return out;
  }
};

SpacetimeModel sourced_probe() {
  return load_model(R"js({"name":"probe","coords":["t","r","theta","phi"],"params":{"M":1},
   "metric":[["1-2*M/r","0","0","0"],[null,"-1/(1-2*M/r)","0","0"],[null,null,"-r^2","0"],
             [null,null,null,"-r^2*sin(theta)^2"]],
   "potential":["0.3/r^2 + 0.01*r*sin(theta)","0","0","0.05*r^2*cos(theta)"],"alpha":0.7})js");
}

double max_abs(const Mat4<double>& a) {
  double m = 0;
  for (const auto& row : a)
    for (double v : row) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("spray and connection against difference oracle") {
  const RnOracle o{1.0, 0.6, 0.8};
  const auto m = with_alpha(catalog("reissner_nordstrom", {{"M", 1.0}, {"Q", 0.6}}), 0.8);
  const BundlePoint p{{0.1, 4.0, 1.1, 0.5}, {1.6, 0.3, -0.05, 0.08}};
  const auto G = spray(m, p);
  const auto Go = o.spray(p.x, p.y);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(G[i] - Go[i]) < 1e-9);
  const auto N = nonlinear_connection(m, p);
  const auto No = o.N(p.x, p.y);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(std::abs(N[i][j] - No[i][j]) < 1e-8);
  const auto E = tidal_tensor(m, p);
  const auto Eo = o.E(p.x, p.y);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(std::abs(E[i][j] - Eo[i][j]) < 1e-6);
}

TEST_CASE("B and its fiber derivatives") {
  const auto m = catalog("reissner_nordstrom", {{"M", 1.0}, {"Q", 0.3}});
  const BundlePoint p{{0, 5, 1.0, 0}, {1.2, 0.1, 0.02, -0.01}};
  const RnOracle o{1.0, 0.3, m.alpha};
  const auto B = spray_B(m, p);
  const auto g = metric_value(m, p.x);
  double n2 = 0;
  for (int i = 0; i < 4; ++i) n2 += g[i][i] * p.y[i] * p.y[i];
  const auto Fm = o.Fmixed(p.x);
  for (int i = 0; i < 4; ++i) {
    double s = 0;
    for (int j = 0; j < 4; ++j) s += Fm[i][j] * p.y[j];
    CHECK(B[i] == doctest::Approx(-0.5 * m.alpha * std::sqrt(n2) * s).epsilon(1e-13));
  }
  const auto jet = fiber_derivs_B(m, p);
  const auto closed = fiber_derivs_B_closed_form(m, p);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      CHECK(std::abs(jet.Bj[i][j] - closed.Bj[i][j]) < 1e-15);
      for (int k = 0; k < 4; ++k) {
        CHECK(std::abs(jet.Bjk[i][j][k] - closed.Bjk[i][j][k]) < 1e-14);
        CHECK(std::abs(jet.Bjk[i][j][k] - jet.Bjk[i][k][j]) < 1e-16);
      }
    }
  // Euler: B^i_j y^j = 2 B^i, B^i_jk y^k = B^i_j
  for (int i = 0; i < 4; ++i) {
    double s = 0;
    for (int j = 0; j < 4; ++j) s += jet.Bj[i][j] * p.y[j];
    CHECK(s == doctest::Approx(2 * B[i]).epsilon(1e-13));
    for (int j = 0; j < 4; ++j) {
      double t = 0;
      for (int k = 0; k < 4; ++k) t += jet.Bjk[i][j][k] * p.y[k];
      CHECK(std::abs(t - jet.Bj[i][j]) < 1e-16);
    }
  }
}

TEST_CASE("homogeneity in the fiber") {
  const auto m = sourced_probe();
  const BundlePoint p{{0, 5, 1.1, 0.3}, {1.3, 0.2, 0.01, -0.02}};
  BundlePoint q = p;
  for (auto& v : q.y) v *= 2.5;
  const auto G1 = spray(m, p), G2 = spray(m, q);
  const auto N1 = nonlinear_connection(m, p), N2 = nonlinear_connection(m, q);
  const auto E1 = tidal_tensor(m, p), E2 = tidal_tensor(m, q);
  const auto b1 = berwald_coeffs(m, p), b2 = berwald_coeffs(m, q);
  for (int i = 0; i < 4; ++i) {
    CHECK(G2[i] == doctest::Approx(6.25 * G1[i]).epsilon(1e-12));
    for (int j = 0; j < 4; ++j) {
      CHECK(std::abs(N2[i][j] - 2.5 * N1[i][j]) < 1e-14);
      CHECK(std::abs(E2[i][j] - 6.25 * E1[i][j]) < 1e-14);
      for (int k = 0; k < 4; ++k) CHECK(std::abs(b2[i][j][k] - b1[i][j][k]) < 1e-14);
    }
  }
  const auto s1 = b_scalar_and_hessian(m, p), s2 = b_scalar_and_hessian(m, q);
  // the B-scalar scales with degree two; its Hessian is scale free
  CHECK(s2.value == doctest::Approx(6.25 * s1.value).epsilon(1e-12));
  CHECK(std::abs(s1.value) > 1e-6);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(std::abs(s2.hessian[i][j] - s1.hessian[i][j]) < 1e-14);
  const auto d1 = d_curvature(m, p), d2 = d_curvature(m, q);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(std::abs(d2.ricci[i][j] - d1.ricci[i][j]) < 1e-13);
}

TEST_CASE("zero coupling collapses to the levi-civita geometry") {
  const auto m = with_alpha(catalog("reissner_nordstrom", {{"M", 1.0}, {"Q", 0.6}}), 0.0);
  const BundlePoint p{{0, 4.5, 0.9, 1.0}, {1.4, -0.2, 0.03, 0.04}};
  const auto r = riemann(m, p.x);
  const auto R = n_curvature(m, p);
  const auto E = tidal_tensor(m, p);
  const auto G = christoffel(m, p.x);
  const auto N = nonlinear_connection(m, p);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double n = 0, e = 0;
      for (int k = 0; k < 4; ++k) n += G[i][j][k] * p.y[k];
      CHECK(std::abs(N[i][j] - n) < 1e-15);
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) e -= r[i][k][j][l] * p.y[k] * p.y[l];
      CHECK(std::abs(E[i][j] - e) < 1e-15);
      for (int k = 0; k < 4; ++k) {
        double s = 0;
        for (int h = 0; h < 4; ++h) s -= r[i][h][j][k] * p.y[h];
        CHECK(std::abs(R[i][j][k] - s) < 1e-15);
      }
    }
  const auto d = d_curvature(m, p);
  const auto ric = ricci(m, p.x);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(std::abs(d.ricci[i][j] - ric[i][j]) < 1e-15);
  CHECK(std::abs(d.scalar - ricci_scalar(m, p.x)) < 1e-15);
}

TEST_CASE("tidal tensor of a static observer") {
  const auto s = catalog("schwarzschild", {{"M", 1.0}});
  const double r = 10, f = 0.8;
  const auto E = tidal_tensor(s, {{0, r, 1.2, 0}, {1 / std::sqrt(f), 0, 0, 0}});
  CHECK(E[1][1] == doctest::Approx(2.0 / (r * r * r)).epsilon(1e-13));
  CHECK(E[2][2] == doctest::Approx(-1.0 / (r * r * r)).epsilon(1e-13));
  CHECK(E[3][3] == doctest::Approx(-1.0 / (r * r * r)).epsilon(1e-13));
  CHECK(std::abs(E[0][0]) < 1e-17);
}

TEST_CASE("scalar decomposition") {
  SUBCASE("uniform field") {
    const auto m = with_alpha(catalog("uniform_field", {{"E0", 0.1}}), 1.0);
    const auto t = theorem1_decomposition(m, {{0, 0.5, 0, 0}, {2, 0, 0, 0}});
    CHECK(t.R == doctest::Approx(-0.03).epsilon(1e-13));
    CHECK(t.quad_term == doctest::Approx(-0.03).epsilon(1e-13));
    CHECK(t.quad_expected == doctest::Approx(-0.03).epsilon(1e-13));
    CHECK(std::abs(t.residual) < 1e-15);
  }
  SUBCASE("reissner-nordstrom at the coupling star value") {
    const auto m = catalog("reissner_nordstrom", {{"M", 1.0}, {"Q", 0.3}});
    for (const Point4& y : {Point4{1.2, 0, 0, 0}, Point4{1.5, 0.3, 0.02, 0.05}}) {
      const auto t = theorem1_decomposition(m, {{0, 5, 1.0, 0}, y});
      CHECK(t.quad_term == doctest::Approx(-0.000288).epsilon(1e-12));
      CHECK(quad_term(m, {{0, 5, 1.0, 0}, y}) == doctest::Approx(-0.000288).epsilon(1e-12));
      CHECK(std::abs(t.residual) < 1e-15);
    }
  }
  SUBCASE("sourced probe pins the divergence term") {
    const auto m = sourced_probe();
    const BundlePoint p{{0, 5, 1.1, 0.3}, {1.3, 0.2, 0.01, -0.02}};
    const auto lc = theorem1_decomposition(m, p, DivTermVariant::kLeviCivitaReference);
    CHECK(lc.R == doctest::Approx(0.0075212836673007825).epsilon(1e-10));
    CHECK(lc.div_term == doctest::Approx(0.0016367406763347614).epsilon(1e-10));
    CHECK(lc.quad_term == doctest::Approx(lc.quad_expected).epsilon(1e-12));
    CHECK(std::abs(lc.r) < 1e-15);
    CHECK(std::abs(lc.residual) < 1e-15);
    CHECK(std::abs(theorem1_decomposition(m, p, DivTermVariant::kRandersReference).residual) > 1e-3);
    CHECK(std::abs(theorem1_decomposition(m, p, DivTermVariant::kTraceFirstIndex).residual) > 1e-3);
    // with a source present only the quadratic term is fiber independent
    BundlePoint q{p.x, {2.0, -0.4, 0.05, 0.03}};
    const auto lq = theorem1_decomposition(m, q);
    CHECK(lq.quad_term == doctest::Approx(lc.quad_term).epsilon(1e-12));
    CHECK(std::abs(lq.residual) < 1e-15);
    CHECK(std::abs(lq.R - lc.R) > 1e-4);
  }
}

TEST_CASE("generalized einstein tensor") {
  const auto rn = catalog("reissner_nordstrom", {{"M", 1.0}, {"Q", 0.6}});
  const BundlePoint p{{0, 4.0, 1.0, 0}, {1.6, 0.2, 0.01, 0.02}};
  const auto ge = generalized_einstein(rn, p);
  CHECK(max_abs(ge.variational) < 1e-14);
  CHECK(ge.variational_vs_classical < 1e-14);
  // the literal combination carries an extra fiber-Hessian piece
  CHECK(ge.literal_vs_variational > 1e-4);
  const auto gt = generalized_einstein_tensor(rn, p.x);
  CHECK(max_abs(gt) < 1e-14);
  for (double v : covariant_divergence(rn, p.x, generalized_einstein_field())) CHECK(std::abs(v) < 1e-13);

  // away from the star value the equations differ from Einstein-Maxwell
  const auto off = with_alpha(rn, 0.5);
  CHECK(generalized_einstein(off, p).variational_vs_classical > 1e-4);
}

TEST_CASE("null and chart errors") {
  const auto s = catalog("schwarzschild", {{"M", 1.0}});
  const double f = 1 - 2.0 / 6;
  // light-like direction: |y| = 0
  const BundlePoint null_p{{0, 6, 1.0, 0}, {1, f, 0, 0}};
  CHECK_THROWS_AS(nonlinear_connection(with_alpha(catalog("reissner_nordstrom", {{"M", 1.0}, {"Q", 0.3}}), 0.5),
                                       {{0, 6, 1.0, 0}, {1, 1 - 2.0 / 6 + 0.09 / 36, 0, 0}}),
                  SingularEvaluation);
  CHECK_THROWS_AS(supporting_element(s, null_p), SingularEvaluation);
  CHECK_THROWS_AS(tidal_tensor(s, {{0, 1.5, 1.0, 0}, {1, 0, 0, 0}}), ChartViolation);
}
