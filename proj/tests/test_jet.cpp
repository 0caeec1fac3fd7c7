#include <doctest.h>

#include <cmath>
#include <random>

#include "tmu/error.hpp"
#include "tmu/jet.hpp"

using namespace tmu;

namespace {

Exponents ex(std::initializer_list<int> e) {
  Exponents out{};
  int i = 0;
  for (int v : e) out[i++] = static_cast<std::uint8_t>(v);
  return out;
}

}  // namespace

TEST_CASE("seeded variable carries value and unit gradient") {
  const Jet x = Jet::seed(0, 3.0, 2, 1);
  CHECK(x.coefficient(ex({0})) == 3.0);
  CHECK(x.coefficient(ex({1})) == 1.0);
  CHECK(x.coefficient(ex({2})) == 0.0);

  const Jet sq = x * x;
  CHECK(sq.value() == 9.0);
  CHECK(sq.partial({0}) == 6.0);
  CHECK(sq.partial({0, 0}) == 2.0);

  const Jet a = Jet::seed(0, 1.0, 1, 4), b = Jet::seed(1, 0.5, 1, 4);
  const Jet s = a + b;
  CHECK(s.partial({0}) == 1.0);
  CHECK(s.partial({1}) == 1.0);
  CHECK(s.partial({2}) == 0.0);
  CHECK(s.partial({3}) == 0.0);

  CHECK_THROWS_AS(Jet::seed(4, 1.0, 1, 4), UsageError);
}

TEST_CASE("arithmetic rules") {
  const Jet x = Jet::seed(0, 2.0, 2, 1);
  const Jet p = x * x;
  CHECK(p.value() == 4.0);
  CHECK(p.partial({0}) == 4.0);
  CHECK(p.partial({0, 0}) == 2.0);

  const Jet r = 1.0 / x;
  CHECK(r.value() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r.partial({0}) == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(r.partial({0, 0}) == doctest::Approx(0.25).epsilon(1e-15));

  const Jet y = Jet::seed(0, 5.0, 3, 1);
  const Jet one = y / y;
  CHECK(one.value() == doctest::Approx(1.0));
  for (int k = 1; k <= 3; ++k) CHECK(std::abs(one.derivative(ex({k}))) < 1e-15);

  const Jet z = x - x;
  CHECK_THROWS_AS(1.0 / z, SingularEvaluation);
  CHECK_THROWS_AS(x / z, SingularEvaluation);
}

TEST_CASE("mismatched layouts are rejected") {
  const Jet a = Jet::seed(0, 1.0, 2, 1), b = Jet::seed(0, 1.0, 3, 1);
  CHECK_THROWS_AS(a + b, UsageError);
  CHECK_THROWS_AS(a * b, UsageError);
}

TEST_CASE("elementary functions") {
  const Jet x = Jet::seed(0, 4.0, 2, 1);
  const Jet s = sqrt(x);
  CHECK(s.value() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s.partial({0}) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(s.partial({0, 0}) == doctest::Approx(-1.0 / 32).epsilon(1e-15));

  const Jet z = Jet::seed(0, 0.0, 3, 1);
  const Jet sn = sin(z);
  CHECK(sn.value() == 0.0);
  CHECK(sn.partial({0}) == doctest::Approx(1.0));
  CHECK(sn.partial({0, 0}) == doctest::Approx(0.0));
  CHECK(sn.partial({0, 0, 0}) == doctest::Approx(-1.0));
  CHECK(cos(z).partial({0, 0}) == doctest::Approx(-1.0));

  const Jet t = Jet::seed(0, 3.0, 3, 1);
  const Jet back = exp(log(t));
  for (int k = 0; k <= 3; ++k) {
    CHECK(back.derivative(ex({k})) == doctest::Approx(t.derivative(ex({k}))).epsilon(1e-14));
  }

  const Jet p = pow(t, 2.5);
  CHECK(p.value() == doctest::Approx(std::pow(3.0, 2.5)).epsilon(1e-14));
  CHECK(p.partial({0}) == doctest::Approx(2.5 * std::pow(3.0, 1.5)).epsilon(1e-14));
  CHECK(p.partial({0, 0}) == doctest::Approx(2.5 * 1.5 * std::pow(3.0, 0.5)).epsilon(1e-14));
  const Jet neg = Jet::seed(0, -2.0, 2, 1);
  CHECK(pow(neg, 3.0).partial({0}) == doctest::Approx(12.0));
  CHECK_THROWS_AS(pow(neg, 0.5), SingularEvaluation);

  CHECK(abs(neg).value() == 2.0);
  CHECK(abs(neg).partial({0}) == -1.0);
  CHECK_THROWS_AS(abs(z), SingularEvaluation);
}

TEST_CASE("domain errors carry the offending value") {
  const Jet x = Jet::seed(0, -1.5, 1, 1);
  try {
    (void)sqrt(x);
    FAIL("sqrt of a negative value must throw");
  } catch (const SingularEvaluation& e) {
    CHECK(e.offending_value() == -1.5);
  }
  CHECK_THROWS_AS(log(x), SingularEvaluation);
  CHECK_THROWS_AS(log(x - x), SingularEvaluation);
}

TEST_CASE("derivative extraction") {
  const Jet x = Jet::seed(0, 3.0, 2, 1);
  CHECK((x * x).derivative(ex({2})) == 2.0);
  const Jet c(JetLayout::get(3, 2), 7.0);
  CHECK(c.partial({0}) == 0.0);
  CHECK(c.partial({0, 1, 1}) == 0.0);
  const Jet a = Jet::seed(0, 1.2, 2, 2), b = Jet::seed(1, -0.7, 2, 2);
  CHECK((a * b).partial({0, 1}) == 1.0);
  CHECK_THROWS_AS(x.partial({0, 0, 0}), UsageError);
}

TEST_CASE("layouts: sizes, order limits, graded prefix") {
  CHECK(JetLayout::get(3, 8).size() == 165);
  CHECK(JetLayout::get(0, 1).size() == 1);
  CHECK_THROWS_AS(JetLayout::get(JetLayout::kMaxOrder + 1, 2), UsageError);
  CHECK_THROWS_AS(JetLayout::get(2, JetLayout::kMaxVars + 1), UsageError);
  const JetLayout& L = JetLayout::get(3, 3);
  for (std::size_t i = 1; i < L.size(); ++i) CHECK(L.degree(i - 1) <= L.degree(i));
  CHECK(JetLayout::get(2, 3).size() == L.graded_size(2));
}

namespace {

// Random cubic polynomial in 3 variables with its exact derivatives.
struct Poly {
  std::vector<std::pair<std::array<int, 3>, double>> terms;

  double deriv(const std::array<int, 3>& d, const std::array<double, 3>& x) const {
    double s = 0;
    for (const auto& [e, c] : terms) {
      double t = c;
      for (int v = 0; v < 3; ++v) {
        if (d[v] > e[v]) {
          t = 0;
          break;
        }
        for (int k = 0; k < d[v]; ++k) t *= e[v] - k;
        t *= std::pow(x[v], e[v] - d[v]);
      }
      s += t;
    }
    return s;
  }
};

}  // namespace

TEST_CASE("polynomials differentiate exactly") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 25; ++trial) {
    Poly p;
    for (int a = 0; a <= 3; ++a)
      for (int b = 0; a + b <= 3; ++b)
        for (int c = 0; a + b + c <= 3; ++c) p.terms.push_back({{a, b, c}, u(rng)});
    const std::array<double, 3> x{u(rng), u(rng), u(rng)};
    const JetLayout& L = JetLayout::get(3, 3);
    std::array<Jet, 3> v{Jet::variable(L, 0, x[0]), Jet::variable(L, 1, x[1]), Jet::variable(L, 2, x[2])};
    Jet f(L, 0.0);
    for (const auto& [e, c] : p.terms) {
      Jet t(L, c);
      for (int k = 0; k < 3; ++k)
        for (int n = 0; n < e[k]; ++n) t = t * v[k];
      f = f + t;
    }
    for (std::size_t i = 0; i < L.size(); ++i) {
      const Exponents& e = L.exponents(i);
      const double want = p.deriv({e[0], e[1], e[2]}, x);
      CHECK(std::abs(f.derivative(e) - want) <= 1e-13 * std::max(1.0, std::abs(want)));
    }
  }
}

namespace {

template <class T>
T smooth(const T& x, const T& y, const T& z) {
  using std::exp;
  using std::sin;
  using std::sqrt;
  return sin(x * y) + exp(z) / (1.0 + x * x) + sqrt(2.0 + y * y) * z;
}

}  // namespace

TEST_CASE("smooth expressions agree with central differences") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::array<double, 3> p{u(rng), u(rng), u(rng)};
    const JetLayout& L = JetLayout::get(2, 3);
    const Jet f = smooth(Jet::variable(L, 0, p[0]), Jet::variable(L, 1, p[1]), Jet::variable(L, 2, p[2]));
    auto at = [&](std::array<double, 3> q) { return smooth(q[0], q[1], q[2]); };
    for (int i = 0; i < 3; ++i) {
      const double h = 1e-5;
      auto qp = p, qm = p;
      qp[i] += h;
      qm[i] -= h;
      const double fd1 = (at(qp) - at(qm)) / (2 * h);
      CHECK(std::abs(f.partial({i}) - fd1) <= 1e-7 * std::max(1.0, std::abs(fd1)));
      const double h2 = 1e-4;
      auto rp = p, rm = p;
      rp[i] += h2;
      rm[i] -= h2;
      const double fd2 = (at(rp) - 2 * at(p) + at(rm)) / (h2 * h2);
      CHECK(std::abs(f.partial({i, i}) - fd2) <= 1e-4 * std::max(1.0, std::abs(fd2)));
    }
  }
}

TEST_CASE("products associate and commute to round-off") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const JetLayout& L = JetLayout::get(3, 8);
  auto random_jet = [&] {
    Jet j(L, u(rng));
    for (int s = 0; s < 8; ++s) j = j + u(rng) * Jet::variable(L, s, 0.0) * (1.0 + u(rng) * Jet::variable(L, (s + 3) % 8, 0.0));
    return j;
  };
  for (int trial = 0; trial < 10; ++trial) {
    const Jet a = random_jet(), b = random_jet(), c = random_jet();
    const Jet l = (a * b) * c, r = a * (b * c), ab = a * b, ba = b * a;
    for (std::size_t i = 0; i < L.size(); ++i) {
      const double s = std::max(1.0, std::abs(l.coefficients()[i]));
      CHECK(std::abs(l.coefficients()[i] - r.coefficients()[i]) <= 1e-13 * s);
      CHECK(std::abs(ab.coefficients()[i] - ba.coefficients()[i]) <= 1e-13 * s);
    }
  }
}

TEST_CASE("capped layouts keep the shared coefficients exact") {
  const JetLayout& full = JetLayout::get(4, 8);
  const JetLayout& capped = JetLayout::get(4, 8, 4, 1);
  CHECK(capped.size() < full.size());
  std::array<double, 8> p{0.3, 1.2, -0.4, 0.8, 1.1, 0.2, -0.3, 0.5};
  auto build = [&](const JetLayout& L) {
    std::array<Jet, 8> v;
    for (int s = 0; s < 8; ++s) v[s] = Jet::variable(L, s, p[s]);
    return sqrt(v[4] * v[4] * (1.0 + v[1] * v[1]) + v[5] * v[6] * sin(v[0]) + exp(v[7] * v[3]) + 2.0 * v[2] * v[6]);
  };
  const Jet a = build(full), b = build(capped);
  const Jet a_as_b = a.transfer(capped);
  for (std::size_t i = 0; i < capped.size(); ++i) {
    CHECK(std::abs(a_as_b.coefficients()[i] - b.coefficients()[i]) <=
          1e-13 * std::max(1.0, std::abs(b.coefficients()[i])));
  }
  // embedding into a wider layout zero-fills foreign slots
  const Jet x = Jet::seed(0, 2.0, 2, 1);
  const Jet w = (x * x).transfer(JetLayout::get(2, 3));
  CHECK(w.partial({0, 0}) == 2.0);
  CHECK(w.partial({1}) == 0.0);
  // truncation to higher order is impossible
  CHECK_THROWS_AS(x.transfer(JetLayout::get(3, 1)), UsageError);
}

TEST_CASE("d() lowers the order by one") {
  const JetLayout& L = JetLayout::get(3, 2);
  const Jet x = Jet::variable(L, 0, 0.5), y = Jet::variable(L, 1, 2.0);
  const Jet f = x * x * y + sin(y);
  const Jet fx = f.d(0);
  CHECK(fx.order() == 2);
  CHECK(fx.value() == doctest::Approx(2 * 0.5 * 2.0));
  CHECK(fx.partial({1}) == doctest::Approx(1.0));
  CHECK(f.d(1).partial({1}) == doctest::Approx(-std::sin(2.0)));
}
