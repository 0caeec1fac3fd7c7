#pragma once

// Spacetime models: coordinates, parameters, metric and potential component
// expressions, the Randers coupling alpha and the constants c, k.
//
// Signature is (+,-,-,-): g(y,y) > 0 for timelike y.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tmu/expr.hpp"
#include "tmu/tensor.hpp"

namespace tmu {

using ParamMap = std::map<std::string, double, std::less<>>;
using Box4 = std::array<std::pair<double, double>, kDim>;

struct SpacetimeModel {
  std::string name;
  std::array<std::string, kDim> coords;
  ParamMap params;
  Mat4<Expr> metric;  // symmetric: metric[i][j] and metric[j][i] are the same tree
  Vec4<Expr> potential;
  double alpha = 0.0;
  bool alpha_is_star = true;  // alpha was derived from (c, k)
  double c = 1.0;
  double k = 1.0;
  std::optional<Expr> chart_guard;
  // Region used by the point sampler; catalog models ship one, file models
  // take it from the caller.
  std::optional<Box4> sample_box;
  // Declared exact solution of the source-free Einstein-Maxwell system; the
  // verify suite only asserts the field equations for these.
  bool electrovacuum = false;
};

// The alpha for which the bundle field equations reproduce Einstein-Maxwell:
// 3 alpha^2 / 2 = k / c^4.
double alpha_star(double c, double k);

std::vector<std::string> catalog_names();
SpacetimeModel catalog(std::string_view name, const ParamMap& params);

SpacetimeModel load_model(std::string_view json_document);
std::string print_model(const SpacetimeModel& m);

// Returns a copy with a different alpha (not the star value).
SpacetimeModel with_alpha(SpacetimeModel m, double alpha);

bool in_chart(const SpacetimeModel& m, const Point4& x);
// Throws ChartViolation outside the guard region.
void check_chart(const SpacetimeModel& m, const Point4& x);

// Jet-valued components with the base coordinates seeded in slots 0..3 of
// the layout (which must have at least 4 variables). Checks the chart guard
// and that the metric is Lorentzian with signature (+,-,-,-).
Mat4<Jet> metric_jet(const SpacetimeModel& m, const Point4& x, const JetLayout& layout);
Vec4<Jet> potential_jet(const SpacetimeModel& m, const Point4& x, const JetLayout& layout);
Mat4<Jet> metric_jet(const SpacetimeModel& m, const Point4& x, int order);
Vec4<Jet> potential_jet(const SpacetimeModel& m, const Point4& x, int order);

Mat4<double> metric_value(const SpacetimeModel& m, const Point4& x);
Vec4<double> potential_value(const SpacetimeModel& m, const Point4& x);

// Throws SingularEvaluation unless g has one positive and three negative
// eigenvalues.
void check_signature(const Mat4<double>& g);

}  // namespace tmu
