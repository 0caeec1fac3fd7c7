#include "tmu/tm_metric.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "tmu/error.hpp"
#include "tmu/quadrature.hpp"

namespace tmu {

namespace {
constexpr double kPi = std::numbers::pi;
}

FiberMetric fiber_metric(const SpacetimeModel& m, const Point4& x, std::optional<Vec4<double>> u) {
  FiberMetric f;
  f.x = x;
  f.g = metric_value(m, x);
  Vec4<double> uu{};
  if (u) {
    uu = *u;
  } else {
    if (!(f.g[0][0] > 0.0)) {
      throw SingularEvaluation("default fiber metric needs g_00 > 0", f.g[0][0]);
    }
    uu = {1.0, 0.0, 0.0, 0.0};
  }
  const double q = quadratic_form(f.g, uu, uu);
  if (!(q > 0.0)) {
    std::ostringstream os;
    os << "fiber metric needs a timelike u: g(u,u) = " << q;
    throw SingularEvaluation(os.str(), q);
  }
  const double n = std::sqrt(q);
  for (double& c : uu) c /= n;
  f.u = uu;
  const Vec4<double> ul = mat_vec(f.g, uu);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) f.v[i][j] = 2.0 * ul[i] * ul[j] - f.g[i][j];
  f.det_g = determinant(f.g);
  f.det_v = determinant(f.v);
  return f;
}

double default_ball_bound() { return std::sqrt(2.0) / kPi; }

bool FiberBall::contains(const Point4& y) const { return quadratic_form(metric.v, y, y) <= bound; }

FiberBall fiber_ball(const SpacetimeModel& m, const Point4& x, std::optional<double> bound,
                     std::optional<Vec4<double>> u) {
  FiberBall b;
  b.metric = fiber_metric(m, x, u);
  b.bound = bound.value_or(default_ball_bound());
  if (!(b.bound > 0.0)) throw UsageError("fiber ball bound must be positive");
  return b;
}

double ball_volume(const FiberBall& ball) { return 0.5 * kPi * kPi * ball.bound * ball.bound; }

FiberIntegral fiber_integral(const FiberBall& ball, const FiberScalar& f, const FiberQuadrature& q) {
  // y = C^{-T} z with v = C C^T, so v(y,y) = |z|^2 and sqrt(det v) d^4y = d^4z.
  const Mat4<double> C = cholesky(ball.metric.v);
  auto to_fiber = [&](const Vec4<double>& z) {
    Vec4<double> y{};
    for (int i = kDim - 1; i >= 0; --i) {
      double s = z[i];
      for (int k = i + 1; k < kDim; ++k) s -= C[k][i] * y[k];
      y[i] = s / C[i][i];
    }
    return y;
  };
  const double R = std::sqrt(ball.bound);
  const QuadratureRule rr = gauss_legendre(q.radial, 0.0, R);
  const QuadratureRule p1 = gauss_legendre(q.polar1, 0.0, kPi);
  const QuadratureRule p2 = gauss_legendre(q.polar2, 0.0, kPi);
  const QuadratureRule az = gauss_legendre(q.azimuth, 0.0, 2.0 * kPi);

  FiberIntegral out;
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(q.radial) * q.polar1 * q.polar2 * q.azimuth);
  for (int a = 0; a < q.radial; ++a) {
    const double rho = rr.nodes[a];
    for (int b = 0; b < q.polar1; ++b) {
      const double psi = p1.nodes[b];
      const double s1 = std::sin(psi), c1 = std::cos(psi);
      for (int c = 0; c < q.polar2; ++c) {
        const double th = p2.nodes[c];
        const double s2 = std::sin(th), c2 = std::cos(th);
        const double w = rr.weights[a] * p1.weights[b] * p2.weights[c] * rho * rho * rho * s1 * s1 * s2;
        for (int d = 0; d < q.azimuth; ++d) {
          const double ph = az.nodes[d];
          const Vec4<double> dir{c1, s1 * c2, s1 * s2 * std::cos(ph), s1 * s2 * std::sin(ph)};
          Vec4<double> z{};
          for (int i = 0; i < kDim; ++i) z[i] = rho * dir[i];
          double val;
          try {
            val = f(to_fiber(z));
          } catch (const SingularEvaluation&) {
            for (int i = 0; i < kDim; ++i) z[i] = rho * (1.0 + 1e-9) * dir[i];
            val = f(to_fiber(z));
            ++out.perturbed_nodes;
          }
          terms.push_back(w * az.weights[d] * val);
        }
      }
    }
  }
  out.value = pairwise_sum(terms);
  return out;
}

namespace {

template <class Fn>
double box_rule(const Box4& box, int n, Fn&& fn) {
  std::array<QuadratureRule, kDim> rules;
  for (int i = 0; i < kDim; ++i) rules[i] = gauss_legendre(n, box[i].first, box[i].second);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(n) * n * n * n);
  Point4 x{};
  for (int a = 0; a < n; ++a) {
    x[0] = rules[0].nodes[a];
    for (int b = 0; b < n; ++b) {
      x[1] = rules[1].nodes[b];
      for (int c = 0; c < n; ++c) {
        x[2] = rules[2].nodes[c];
        for (int d = 0; d < n; ++d) {
          x[3] = rules[3].nodes[d];
          const double w = rules[0].weights[a] * rules[1].weights[b] * rules[2].weights[c] * rules[3].weights[d];
          terms.push_back(w * fn(x));
        }
      }
    }
  }
  return pairwise_sum(terms);
}

}  // namespace

double tm_integral(const SpacetimeModel& m, const Box4& box, const TMScalar& f,
                   const ProductQuadrature& q) {
  return box_rule(box, q.base, [&](const Point4& x) {
    const FiberBall ball = fiber_ball(m, x, q.bound);
    const double fiber = fiber_integral(ball, [&](const Point4& y) { return f(x, y); }, q.fiber).value;
    return std::sqrt(-ball.metric.det_g) * fiber;
  });
}

double base_integral(const SpacetimeModel& m, const Box4& box, const BaseScalar& f, int base_nodes) {
  return box_rule(box, base_nodes, [&](const Point4& x) {
    return std::sqrt(-determinant(metric_value(m, x))) * f(x);
  });
}

double horizontal_divergence(const SpacetimeModel& m, const BundlePoint& p, const FiberField& X,
                             int field_order, double alpha_ref) {
  const std::vector<Vec4<double>> dX = adapted_derivative(m, p, X, field_order, alpha_ref);
  if (dX.size() != kDim) throw UsageError("horizontal divergence needs a 4-component field");
  // delta_i ln sqrt(-g) = gamma^j_ji, and X values from a plain evaluation.
  const Rank3<double> gam = christoffel(m, p.x);
  const BundleFields b(m, p, std::max(field_order, 1), 1);
  const std::vector<Jet> Xv = X(b);
  double div = 0.0;
  for (int i = 0; i < kDim; ++i) {
    div += dX[i][i];
    for (int j = 0; j < kDim; ++j) div += gam[j][j][i] * Xv[i].value();
  }
  return div;
}

FiberField horizontal_lift(BaseVectorField Y) {
  return [Y = std::move(Y)](const BundleFields& b) {
    const Vec4<Jet> v = Y(b.x);
    return std::vector<Jet>(v.begin(), v.end());
  };
}

double base_divergence(const SpacetimeModel& m, const Point4& x, const BaseVectorField& Y) {
  const JetLayout& L = JetLayout::get(1, kDim);
  const Mat4<Jet> g = metric_jet(m, x, L);
  const Jet sg = sqrt(-determinant(g));
  Vec4<Jet> xs;
  for (int i = 0; i < kDim; ++i) xs[i] = Jet::variable(L, i, x[i]);
  const Vec4<Jet> y = Y(xs);
  double s = 0.0;
  for (int i = 0; i < kDim; ++i) s += (sg * y[i].transfer(L)).d(i).value();
  return s / sg.value();
}

}  // namespace tmu
