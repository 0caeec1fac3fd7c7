#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tmu/error.hpp"
#include "tmu/spacetime.hpp"

using namespace tmu;

namespace {
const double kPi = std::numbers::pi;

const char* kFileModel = R"js({
  "name": "rn_file",
  "coords": ["t", "r", "theta", "phi"],
  "params": {"M": 1.0, "Q": 0.3},
  "metric": [["1 - 2*M/r + Q^2/r^2", "0", "0", "0"],
             [null, "-1/(1 - 2*M/r + Q^2/r^2)", "0", "0"],
             [null, null, "-r^2", "0"],
             [null, null, null, "-r^2*sin(theta)^2"]],
  "potential": ["Q/r", "0", "0", "0"],
  "alpha": 0.5,
  "chart_guard": "r - 2*M"
})js";
}  // namespace

TEST_CASE("catalog values") {
  const auto s = catalog("schwarzschild", {{"M", 1.0}});
  CHECK(metric_value(s, {0, 10, kPi / 2, 0})[0][0] == doctest::Approx(0.8));
  const auto mk = catalog("minkowski", {});
  const Mat4<double> g = metric_value(mk, {0.3, -1, 2, 5});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(g[i][j] == (i != j ? 0.0 : (i == 0 ? 1.0 : -1.0)));
  const Mat4<Jet> gj = metric_jet(mk, {0, 0, 0, 0}, 2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) CHECK(gj[i][j].partial({k}) == 0.0);
  for (const auto& a : potential_jet(mk, {0, 0, 0, 0}, 1)) CHECK(a.value() == 0.0);

  const auto rn = catalog("reissner_nordstrom", {{"M", 1.0}, {"Q", 0.3}});
  const Vec4<Jet> A = potential_jet(rn, {0, 5, 1, 0}, 1);
  CHECK(A[0].value() == doctest::Approx(0.06));
  CHECK(A[0].partial({1}) == doctest::Approx(-0.012));
  CHECK(rn.alpha == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(rn.alpha_is_star);
  CHECK(rn.electrovacuum);

  const auto uf = catalog("uniform_field", {{"E0", 0.1}});
  CHECK(potential_value(uf, {0, 2, 0, 0})[0] == doctest::Approx(-0.2));
  const auto wf = catalog("weak_field", {{"M", 1.0}});
  CHECK(metric_value(wf, {0, 3, 0, 4})[0][0] == doctest::Approx(1 - 2.0 / 5));
  CHECK(metric_value(wf, {0, 3, 0, 4})[2][2] == doctest::Approx(-(1 + 2.0 / 5)));
  CHECK(!wf.electrovacuum);
}

TEST_CASE("catalog validation") {
  CHECK_THROWS_AS(catalog("kerr", {}), UsageError);
  CHECK_THROWS_AS(catalog("schwarzschild", {}), ConfigurationError);
  CHECK_THROWS_AS(catalog("schwarzschild", {{"M", 0.0}}), ConfigurationError);
  CHECK_THROWS_AS(catalog("schwarzschild", {{"M", -1.0}}), ConfigurationError);
  CHECK_THROWS_AS(catalog("schwarzschild", {{"M", 1.0}, {"Q", 0.1}}), ConfigurationError);
  CHECK_THROWS_AS(catalog("reissner_nordstrom", {{"M", 1.0}, {"Q", 1.0}}), ConfigurationError);
  CHECK_THROWS_AS(catalog("minkowski", {{"M", 1.0}}), ConfigurationError);
  CHECK(catalog_names().size() == 5);
}

TEST_CASE("chart guard and signature") {
  const auto s = catalog("schwarzschild", {{"M", 1.0}});
  CHECK(in_chart(s, {0, 3, 1, 0}));
  CHECK(!in_chart(s, {0, 1.5, 1, 0}));
  CHECK(!in_chart(s, {0, 3, 0, 0}));
  CHECK(!in_chart(s, {0, 3, kPi + 0.1, 0}));
  CHECK_THROWS_AS(metric_jet(s, {0, 1.5, 1, 0}, 1), ChartViolation);
  const auto rn = catalog("reissner_nordstrom", {{"M", 1.0}, {"Q", 0.6}});
  CHECK(!in_chart(rn, {0, 1.79, 1, 0}));
  CHECK(in_chart(rn, {0, 1.81, 1, 0}));
  const auto wf = catalog("weak_field", {{"M", 1.0}});
  CHECK(!in_chart(wf, {0, 1, 1, 0}));

  Mat4<double> bad{};
  bad[0][0] = -1;
  bad[1][1] = bad[2][2] = bad[3][3] = -1;
  CHECK_THROWS_AS(check_signature(bad), SingularEvaluation);
  bad[0][0] = 1;
  CHECK_NOTHROW(check_signature(bad));
  bad[1][2] = bad[2][1] = 2;  // eigenvalues -1 +- 2 in that block
  CHECK_THROWS_AS(check_signature(bad), SingularEvaluation);
}

TEST_CASE("alpha star") {
  CHECK(alpha_star(1, 1) == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
  CHECK(alpha_star(2, 3) == doctest::Approx(std::sqrt(2.0 * 3 / (3 * 16))).epsilon(1e-15));
  const auto m = with_alpha(catalog("minkowski", {}), 0.25);
  CHECK(m.alpha == 0.25);
  CHECK(!m.alpha_is_star);
}

TEST_CASE("model files") {
  const auto m = load_model(kFileModel);
  CHECK(m.name == "rn_file");
  CHECK(m.alpha == 0.5);
  CHECK(!m.alpha_is_star);
  CHECK(!m.electrovacuum);
  CHECK(!m.sample_box);
  const auto rn = catalog("reissner_nordstrom", {{"M", 1.0}, {"Q", 0.3}});
  const Point4 x{0.1, 5, 1.2, 0.4};
  const auto a = metric_value(m, x), b = metric_value(rn, x);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(a[i][j] == doctest::Approx(b[i][j]).epsilon(1e-15));
  CHECK(!in_chart(m, {0, 1.9, 1, 0}));

  // print/load is a fixed point after one pass
  const std::string once = print_model(m);
  const auto m2 = load_model(once);
  CHECK(print_model(m2) == once);
  const std::string cat = print_model(rn);
  CHECK(print_model(load_model(cat)) == cat);
  CHECK(load_model(cat).alpha_is_star);
  CHECK(load_model(cat).electrovacuum);
}

TEST_CASE("model file errors") {
  auto bad = [](std::string doc) { CHECK_THROWS_AS(load_model(doc), ConfigurationError); };
  bad("not json");
  bad("[1,2]");
  bad(R"({"coords":["t","x","y","z"],"metric":[]})");  // no name
  bad(R"({"name":"a","coords":["t","x","y","z"],"metric":[["1","0","0","0"],[null,"-1","0","0"],[null,null,"-1","0"]]})");
  // asymmetric triangle
  bad(R"({"name":"a","coords":["t","x","y","z"],
          "metric":[["1","x","0","0"],["y","-1","0","0"],[null,null,"-1","0"],[null,null,null,"-1"]]})");
  // unbound symbol
  bad(R"({"name":"a","coords":["t","x","y","z"],
          "metric":[["1+w","0","0","0"],[null,"-1","0","0"],[null,null,"-1","0"],[null,null,null,"-1"]]})");
  // parse error inside a component
  bad(R"({"name":"a","coords":["t","x","y","z"],
          "metric":[["1+","0","0","0"],[null,"-1","0","0"],[null,null,"-1","0"],[null,null,null,"-1"]]})");
  // unknown key
  bad(R"({"name":"a","coords":["t","x","y","z"],"colour":1,
          "metric":[["1","0","0","0"],[null,"-1","0","0"],[null,null,"-1","0"],[null,null,null,"-1"]]})");
  // parameter shadowing a coordinate
  bad(R"({"name":"a","coords":["t","x","y","z"],"params":{"x":1},
          "metric":[["1","0","0","0"],[null,"-1","0","0"],[null,null,"-1","0"],[null,null,null,"-1"]]})");
  bad(R"({"name":"a","coords":["t","x","y","z"],"electrovacuum":"yes",
          "metric":[["1","0","0","0"],[null,"-1","0","0"],[null,null,"-1","0"],[null,null,null,"-1"]]})");
  bad(R"({"name":"a","coords":["t","x","y","z"],"k":-1,
          "metric":[["1","0","0","0"],[null,"-1","0","0"],[null,null,"-1","0"],[null,null,null,"-1"]]})");
}

TEST_CASE("wrong signature at evaluation") {
  const auto m = load_model(R"({"name":"euclid","coords":["t","x","y","z"],
      "metric":[["1","0","0","0"],[null,"1","0","0"],[null,null,"-1","0"],[null,null,null,"-1"]]})");
  CHECK_THROWS_AS(metric_jet(m, {0, 0, 0, 0}, 1), SingularEvaluation);
}

