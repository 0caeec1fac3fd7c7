#include "tmu/sampling.hpp"

#include <cmath>
#include <numbers>

#include "tmu/error.hpp"

namespace tmu {

std::array<Vec4<double>, kDim> orthonormal_frame(const Mat4<double>& g) {
  std::array<Vec4<double>, kDim> e{};
  const double eta[kDim] = {1.0, -1.0, -1.0, -1.0};
  for (int a = 0; a < kDim; ++a) {
    Vec4<double> v{};
    v[a] = 1.0;
    for (int b = 0; b < a; ++b) {
      const double p = quadratic_form(g, v, e[b]) * eta[b];
      for (int i = 0; i < kDim; ++i) v[i] -= p * e[b][i];
    }
    const double q = quadratic_form(g, v, v) * eta[a];
    if (!(q > 0.0)) throw SingularEvaluation("cannot build an orthonormal frame here", q);
    const double n = std::sqrt(q);
    for (int i = 0; i < kDim; ++i) e[a][i] = v[i] / n;
  }
  return e;
}

Point4 sample_base_point(const SpacetimeModel& m, const Box4& box, Rng& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Point4 x{};
    for (int i = 0; i < kDim; ++i) x[i] = rng.uniform(box[i].first, box[i].second);
    if (in_chart(m, x)) return x;
  }
  throw ConfigurationError("sampling box lies outside the chart");
}

Point4 sample_timelike(const SpacetimeModel& m, const Point4& x, Rng& rng, const TimelikeSampling& s) {
  const auto e = orthonormal_frame(metric_value(m, x));
  const double psi = rng.uniform(0.0, s.max_rapidity);
  const double cz = rng.uniform(-1.0, 1.0);
  const double ph = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double sz = std::sqrt(1.0 - cz * cz);
  const double n[3] = {sz * std::cos(ph), sz * std::sin(ph), cz};
  const double scale = rng.uniform(s.min_scale, s.max_scale);
  Point4 y{};
  for (int i = 0; i < kDim; ++i) {
    double v = std::cosh(psi) * e[0][i];
    for (int a = 0; a < 3; ++a) v += std::sinh(psi) * n[a] * e[a + 1][i];
    y[i] = scale * v;
  }
  return y;
}

Box4 sampling_box(const SpacetimeModel& m, const std::optional<Box4>& override_box) {
  if (override_box) return *override_box;
  if (m.sample_box) return *m.sample_box;
  throw ConfigurationError("model '" + m.name + "' has no sampling box; supply one explicitly");
}

}  // namespace tmu
