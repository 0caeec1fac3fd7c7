#pragma once

// Metric structure on the tangent bundle: a Riemannian fiber metric v built
// from g and a unit timelike field u, the unit-volume fiber ball, fiber and
// product (base x fiber) integration, and the divergence of horizontal
// vector fields.

#include <functional>
#include <optional>

#include "tmu/bundle_geom.hpp"

namespace tmu {

struct FiberMetric {
  Point4 x{};
  Mat4<double> g{};
  Mat4<double> v{};      // v_ij = 2 u_i u_j - g_ij
  Vec4<double> u{};      // unit timelike vector used (upper index)
  double det_g = 0.0;
  double det_v = 0.0;
};

// Default u is d/dx^0 normalised, which needs g_00 > 0.
FiberMetric fiber_metric(const SpacetimeModel& m, const Point4& x,
                         std::optional<Vec4<double>> u = std::nullopt);

// Bound c with pi^2 c^2 / 2 = 1, i.e. unit 4-volume of {v(y,y) <= c}.
double default_ball_bound();

struct FiberBall {
  FiberMetric metric;
  double bound = 0.0;
  bool contains(const Point4& y) const;
};
FiberBall fiber_ball(const SpacetimeModel& m, const Point4& x,
                     std::optional<double> bound = std::nullopt,
                     std::optional<Vec4<double>> u = std::nullopt);
// Closed-form Euclidean volume in v-orthonormal coordinates.
double ball_volume(const FiberBall& ball);

// Tensor Gauss-Legendre rule in 4D spherical coordinates (radius, two polar
// angles, azimuth) of the v-orthonormal frame.
struct FiberQuadrature {
  int radial = 16;
  int polar1 = 16;
  int polar2 = 16;
  int azimuth = 32;
};

using FiberScalar = std::function<double(const Point4& y)>;

struct FiberIntegral {
  double value = 0.0;
  // Nodes where f was singular and the node was pushed outward by a
  // relative 1e-9 radial shift.
  int perturbed_nodes = 0;
};

// Integral of f over the ball with measure sqrt(det v) d^4y.
FiberIntegral fiber_integral(const FiberBall& ball, const FiberScalar& f,
                             const FiberQuadrature& q = {});

using TMScalar = std::function<double(const Point4& x, const Point4& y)>;
using BaseScalar = std::function<double(const Point4& x)>;

struct ProductQuadrature {
  int base = 6;  // nodes per base coordinate
  FiberQuadrature fiber{8, 12, 12, 16};
  std::optional<double> bound;
};

// Integral over box x ball with density sqrt(-g) sqrt(det v).
double tm_integral(const SpacetimeModel& m, const Box4& box, const TMScalar& f,
                   const ProductQuadrature& q = {});
// Integral over the box with density sqrt(-g), same base rule.
double base_integral(const SpacetimeModel& m, const Box4& box, const BaseScalar& f, int base_nodes = 6);

// (1/sqrt(-g)) delta_i (sqrt(-g) X^i) with delta taken from N at alpha_ref.
// The field must return 4 components.
double horizontal_divergence(const SpacetimeModel& m, const BundlePoint& p, const FiberField& X,
                             int field_order, double alpha_ref);

// A base vector field given as a function of the coordinate jets.
using BaseVectorField = std::function<Vec4<Jet>(const Vec4<Jet>& x)>;
FiberField horizontal_lift(BaseVectorField Y);
// (1/sqrt(-g)) d_i (sqrt(-g) Y^i)
double base_divergence(const SpacetimeModel& m, const Point4& x, const BaseVectorField& Y);

}  // namespace tmu
