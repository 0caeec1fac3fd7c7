#include "tmu/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "tmu/error.hpp"

namespace tmu {

double randers_lagrangian(const SpacetimeModel& m, const Point4& x, const Point4& y, double alpha) {
  const Mat4<double> g = metric_value(m, x);
  const double q = quadratic_form(g, y, y);
  if (!(q > 0.0)) throw SingularEvaluation("Randers Lagrangian needs a timelike y", q);
  const Vec4<double> A = potential_value(m, x);
  double ay = 0.0;
  for (int i = 0; i < kDim; ++i) ay += A[i] * y[i];
  return std::sqrt(q) + alpha * ay;
}

namespace {

struct Forces {
  Mat4<double> g;
  Rank3<double> gamma;
  Mat4<double> F_mixed;
};

Forces forces_at(const SpacetimeModel& m, const Point4& x) {
  const BaseGeometry b = BaseGeometry::compute(m, x, 1, false);
  return {values(b.g), values(b.gamma), values(b.F_mixed)};
}

// -gamma y y + k F y; k = alpha |y| for the spray, q/m for the classical force.
Vec4<double> accel(const Forces& f, const Point4& y, double k) {
  Vec4<double> a{};
  for (int i = 0; i < kDim; ++i) {
    double s = 0.0;
    for (int j = 0; j < kDim; ++j)
      for (int l = 0; l < kDim; ++l) s -= f.gamma[i][j][l] * y[j] * y[l];
    for (int j = 0; j < kDim; ++j) s += k * f.F_mixed[i][j] * y[j];
    a[i] = s;
  }
  return a;
}

double norm_sq_guarded(const Mat4<double>& g, const Point4& y, double guard) {
  const double q = quadratic_form(g, y, y);
  if (!(q >= guard)) {
    std::ostringstream os;
    os << "worldline approached the null cone: g(y,y) = " << q;
    throw SingularEvaluation(os.str(), q);
  }
  return q;
}

Point4 slice(const std::vector<double>& s, int off) {
  return {s[off], s[off + 1], s[off + 2], s[off + 3]};
}

Point4 normalized(const SpacetimeModel& m, const Point4& x, Point4 y, double guard) {
  const double q = norm_sq_guarded(metric_value(m, x), y, guard);
  const double n = std::sqrt(q);
  for (double& c : y) c /= n;
  return y;
}

Trajectory run(const SpacetimeModel& m, const WorldlineState& init, double t_end,
               const WorldlineOptions& opt, bool spray_norm, double k) {
  if (!(t_end > init.t)) throw UsageError("t_end must be after the initial time");
  check_chart(m, init.x);
  Point4 y0 = init.y;
  if (opt.normalize) y0 = normalized(m, init.x, y0, opt.null_guard);
  const double q0 = norm_sq_guarded(metric_value(m, init.x), y0, opt.null_guard);

  OdeRhs rhs = [&](double, const std::vector<double>& s, std::vector<double>& ds) {
    const Point4 x = slice(s, 0), y = slice(s, 4);
    const Forces f = forces_at(m, x);
    const double kk = spray_norm ? k * std::sqrt(norm_sq_guarded(f.g, y, opt.null_guard)) : k;
    const Vec4<double> a = accel(f, y, kk);
    for (int i = 0; i < kDim; ++i) {
      ds[i] = y[i];
      ds[4 + i] = a[i];
    }
  };
  OdeCheck chk = [&](double, const std::vector<double>& s) {
    check_chart(m, slice(s, 0));
    norm_sq_guarded(metric_value(m, slice(s, 0)), slice(s, 4), opt.null_guard);
  };
  std::vector<double> s0(8);
  for (int i = 0; i < kDim; ++i) {
    s0[i] = init.x[i];
    s0[4 + i] = y0[i];
  }
  OdeResult r = integrate_ode(rhs, init.t, s0, linspace(init.t, t_end, opt.samples), opt.ode, chk);
  Trajectory tr;
  tr.t = r.t;
  tr.steps = r.accepted;
  for (const auto& s : r.y) {
    tr.x.push_back(slice(s, 0));
    tr.y.push_back(slice(s, 4));
    const double q = quadratic_form(metric_value(m, tr.x.back()), tr.y.back(), tr.y.back());
    tr.max_norm_drift = std::max(tr.max_norm_drift, std::abs(q - q0));
  }
  tr.dense = std::move(r.dense);
  return tr;
}

}  // namespace

Vec4<double> worldline_rhs(const SpacetimeModel& m, const Point4& x, const Point4& y, double alpha) {
  const Forces f = forces_at(m, x);
  const double q = quadratic_form(f.g, y, y);
  if (!(q > 0.0)) throw SingularEvaluation("worldline needs a timelike y", q);
  return accel(f, y, alpha * std::sqrt(q));
}

Trajectory integrate_worldline(const SpacetimeModel& m, WorldlineState init, double alpha, double t_end,
                               const WorldlineOptions& opt) {
  return run(m, init, t_end, opt, true, alpha);
}

ClassicalComparison compare_classical(const SpacetimeModel& m, WorldlineState init, double alpha,
                                      double t_end, const WorldlineOptions& opt) {
  WorldlineOptions o = opt;
  init.y = normalized(m, init.x, init.y, o.null_guard);
  o.normalize = false;
  ClassicalComparison c;
  c.randers = run(m, init, t_end, o, true, alpha);
  c.classical = run(m, init, t_end, o, false, alpha);
  for (std::size_t s = 0; s < c.randers.t.size(); ++s)
    for (int i = 0; i < kDim; ++i) {
      c.max_deviation = std::max(c.max_deviation, std::abs(c.randers.x[s][i] - c.classical.x[s][i]));
      c.max_deviation = std::max(c.max_deviation, std::abs(c.randers.y[s][i] - c.classical.y[s][i]));
    }
  return c;
}

DeviationTrajectory integrate_deviation(const SpacetimeModel& m, WorldlineState init, double alpha,
                                        const Point4& w0, const Point4& rate0, double t_end,
                                        DeviationRate rate_kind, const WorldlineOptions& opt) {
  if (!(t_end > init.t)) throw UsageError("t_end must be after the initial time");
  const SpacetimeModel ma = with_alpha(m, alpha);
  check_chart(ma, init.x);
  Point4 y0 = init.y;
  if (opt.normalize) y0 = normalized(ma, init.x, y0, opt.null_guard);
  const double q0 = norm_sq_guarded(metric_value(ma, init.x), y0, opt.null_guard);

  Point4 W0 = rate0;
  if (rate_kind == DeviationRate::kCoordinate) {
    const Mat4<double> N = nonlinear_connection(ma, {init.x, y0});
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) W0[i] += N[i][j] * w0[j];
  }

  OdeRhs rhs = [&](double, const std::vector<double>& s, std::vector<double>& ds) {
    const Point4 x = slice(s, 0), y = slice(s, 4), w = slice(s, 8), W = slice(s, 12);
    norm_sq_guarded(metric_value(ma, x), y, opt.null_guard);
    const BundleFields b(ma, {x, y}, 2, 1);
    const TidalJets tj = tidal_jets(b);
    const Mat4<double> N = values(tj.N), E = values(tj.E);
    const Vec4<double> G = values(b.G);
    for (int i = 0; i < kDim; ++i) {
      ds[i] = y[i];
      ds[4 + i] = -2.0 * G[i];
      double dw = W[i], dW = 0.0;
      for (int j = 0; j < kDim; ++j) {
        dw -= N[i][j] * w[j];
        dW += E[i][j] * w[j] - N[i][j] * W[j];
      }
      ds[8 + i] = dw;
      ds[12 + i] = dW;
    }
  };
  OdeCheck chk = [&](double, const std::vector<double>& s) { check_chart(ma, slice(s, 0)); };
  std::vector<double> s0(16);
  for (int i = 0; i < kDim; ++i) {
    s0[i] = init.x[i];
    s0[4 + i] = y0[i];
    s0[8 + i] = w0[i];
    s0[12 + i] = W0[i];
  }
  OdeResult r = integrate_ode(rhs, init.t, s0, linspace(init.t, t_end, opt.samples), opt.ode, chk);
  DeviationTrajectory d;
  d.base.t = r.t;
  d.base.steps = r.accepted;
  for (const auto& s : r.y) {
    d.base.x.push_back(slice(s, 0));
    d.base.y.push_back(slice(s, 4));
    d.w.push_back(slice(s, 8));
    d.W.push_back(slice(s, 12));
    const double q = quadratic_form(metric_value(ma, d.base.x.back()), d.base.y.back(), d.base.y.back());
    d.base.max_norm_drift = std::max(d.base.max_norm_drift, std::abs(q - q0));
  }
  d.base.dense = std::move(r.dense);
  return d;
}

NeighborResult neighbor_oracle(const SpacetimeModel& m, WorldlineState init, double alpha,
                               const Point4& w0, const Point4& W0, double eps, double t_end,
                               const WorldlineOptions& opt) {
  if (!(eps > 0.0)) throw UsageError("oracle epsilon must be positive");
  WorldlineOptions o = opt;
  if (o.normalize) init.y = normalized(m, init.x, init.y, o.null_guard);
  o.normalize = false;
  const DeviationTrajectory dev = integrate_deviation(m, init, alpha, w0, W0, t_end, DeviationRate::kCovariant, o);

  const Mat4<double> N = nonlinear_connection(with_alpha(m, alpha), {init.x, init.y});
  WorldlineState nb = init;
  for (int i = 0; i < kDim; ++i) {
    double wdot = W0[i];
    for (int j = 0; j < kDim; ++j) wdot -= N[i][j] * w0[j];
    nb.x[i] += eps * w0[i];
    nb.y[i] += eps * wdot;
  }
  const Trajectory near = integrate_worldline(m, nb, alpha, t_end, o);
  NeighborResult res;
  res.epsilon = eps;
  res.t = dev.base.t;
  for (std::size_t s = 0; s < res.t.size(); ++s) {
    double e = 0.0;
    for (int i = 0; i < kDim; ++i) {
      e = std::max(e, std::abs((near.x[s][i] - dev.base.x[s][i]) / eps - dev.w[s][i]));
    }
    res.error.push_back(e);
    res.max_error = std::max(res.max_error, e);
  }
  return res;
}

namespace {
void put(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}
void put4(std::ostream& os, const Point4& p) {
  for (double v : p) {
    os << ',';
    put(os, v);
  }
}
}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << "t,x0,x1,x2,x3,y0,y1,y2,y3\n";
  for (std::size_t s = 0; s < tr.t.size(); ++s) {
    put(os, tr.t[s]);
    put4(os, tr.x[s]);
    put4(os, tr.y[s]);
    os << '\n';
  }
}

void write_deviation_csv(std::ostream& os, const DeviationTrajectory& tr) {
  os << "t,x0,x1,x2,x3,y0,y1,y2,y3,w0,w1,w2,w3,W0,W1,W2,W3\n";
  for (std::size_t s = 0; s < tr.base.t.size(); ++s) {
    put(os, tr.base.t[s]);
    put4(os, tr.base.x[s]);
    put4(os, tr.base.y[s]);
    put4(os, tr.w[s]);
    put4(os, tr.W[s]);
    os << '\n';
  }
}

}  // namespace tmu
