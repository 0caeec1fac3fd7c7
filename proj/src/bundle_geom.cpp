#include "tmu/bundle_geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tmu/error.hpp"

namespace tmu {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr int kSlots = 2 * kDim;
}  // namespace

BundleFields::BundleFields(const SpacetimeModel& m, const BundlePoint& p, int order, int xcap)
    : model_(&m), point_(p), alpha_(m.alpha), layout_(&JetLayout::get(order, kSlots, kDim, xcap)) {
  const JetLayout& L = *layout_;
  const int base_order = std::min(xcap, order) + 1;
  const BaseGeometry b = BaseGeometry::compute(m, p.x, base_order, false);
  g = to_layout(b.g, L);
  ginv = to_layout(b.ginv, L);
  gamma = to_layout(b.gamma, L);
  F = to_layout(b.F, L);
  F_mixed = to_layout(b.F_mixed, L);
  for (int i = 0; i < kDim; ++i) {
    x[i] = Jet::variable(L, i, p.x[i]);
    y[i] = Jet::variable(L, kFiberSlot + i, p.y[i]);
  }
  norm_sq = quadratic_form(g, y, y);
  if (!(norm_sq.value() > 0.0)) {
    std::ostringstream os;
    os << "fiber vector is not timelike: g(y,y) = " << norm_sq.value();
    throw SingularEvaluation(os.str(), norm_sq.value());
  }
  norm = sqrt(norm_sq);
  Fy = mat_vec(F_mixed, y);
  for (int i = 0; i < kDim; ++i) {
    B[i] = (-0.5 * alpha_) * (norm * Fy[i]);
    Jet s(L, 0.0);
    for (int j = 0; j < kDim; ++j) {
      Jet gy(L, 0.0);
      for (int k = 0; k < kDim; ++k) gy += gamma[i][j][k] * y[k];
      s += gy * y[j];
    }
    G[i] = 0.5 * s + B[i];
  }
}

SupportingElement supporting_element(const SpacetimeModel& m, const BundlePoint& p) {
  const Mat4<double> g = metric_value(m, p.x);
  const double q = quadratic_form(g, p.y, p.y);
  if (!(q > 0.0)) {
    std::ostringstream os;
    os << "supporting element needs timelike y: g(y,y) = " << q;
    throw SingularEvaluation(os.str(), q);
  }
  SupportingElement s;
  s.norm = std::sqrt(q);
  for (int i = 0; i < kDim; ++i) s.l[i] = p.y[i] / s.norm;
  s.l_lower = mat_vec(g, s.l);
  return s;
}

Vec4<double> spray_B(const SpacetimeModel& m, const BundlePoint& p) {
  return values(BundleFields(m, p, 0, 0).B);
}

Vec4<double> spray(const SpacetimeModel& m, const BundlePoint& p) {
  return values(BundleFields(m, p, 0, 0).G);
}

Mat4<Jet> connection_jets(const BundleFields& b) {
  Mat4<Jet> N;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) N[i][j] = b.G[i].d(kFiberSlot + j);
  return N;
}

Mat4<double> nonlinear_connection(const SpacetimeModel& m, const BundlePoint& p) {
  return values(connection_jets(BundleFields(m, p, 1, 0)));
}

FiberDerivsB fiber_derivs_B(const SpacetimeModel& m, const BundlePoint& p) {
  const BundleFields b(m, p, 3, 0);
  FiberDerivsB out{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      const Jet bj = b.B[i].d(kFiberSlot + j);
      out.Bj[i][j] = bj.value();
      for (int k = 0; k < kDim; ++k) {
        const Jet bjk = bj.d(kFiberSlot + k);
        out.Bjk[i][j][k] = bjk.value();
        for (int l = 0; l < kDim; ++l) out.Bjkl[i][j][k][l] = bjk.d(kFiberSlot + l).value();
      }
    }
  return out;
}

FiberDerivsB fiber_derivs_B_closed_form(const SpacetimeModel& m, const BundlePoint& p) {
  const SupportingElement s = supporting_element(m, p);
  const Mat4<double> g = metric_value(m, p.x);
  const Mat4<double> Fm = faraday(m, p.x).mixed;
  const Vec4<double> Fy = mat_vec(Fm, p.y);
  const double a = m.alpha;
  FiberDerivsB out{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      out.Bj[i][j] = -0.5 * a * (Fy[i] * s.l_lower[j] + s.norm * Fm[i][j]);
      for (int k = 0; k < kDim; ++k) {
        const double ljk = (g[j][k] - s.l_lower[j] * s.l_lower[k]) / s.norm;
        out.Bjk[i][j][k] =
            -0.5 * a * (ljk * Fy[i] + s.l_lower[j] * Fm[i][k] + s.l_lower[k] * Fm[i][j]);
      }
    }
  return out;
}

Rank3<double> berwald_coeffs(const SpacetimeModel& m, const BundlePoint& p) {
  const BundleFields b(m, p, 2, 0);
  Rank3<double> out{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      const Jet gj = b.G[i].d(kFiberSlot + j);
      for (int k = 0; k < kDim; ++k) out[i][j][k] = gj.d(kFiberSlot + k).value();
    }
  return out;
}

std::vector<Vec4<double>> adapted_derivative(const SpacetimeModel& m, const BundlePoint& p,
                                             const FiberField& field, int field_order,
                                             double alpha_ref) {
  if (!field) throw UsageError("adapted_derivative needs a field");
  const BundleFields b(m, p, std::max(field_order, 1), 1);
  const std::vector<Jet> f = field(b);
  const Mat4<double> N = nonlinear_connection(with_alpha(m, alpha_ref), p);
  std::vector<Vec4<double>> out;
  out.reserve(f.size());
  for (const Jet& c : f) {
    if (!c.has_layout()) {
      out.push_back({});
      continue;
    }
    if (c.order() < 1) throw UsageError("field jets carry no first derivatives");
    Vec4<double> dv{};
    for (int i = 0; i < kDim; ++i) {
      double v = c.d(i).value();
      for (int mm = 0; mm < kDim; ++mm) v -= N[mm][i] * c.d(kFiberSlot + mm).value();
      dv[i] = v;
    }
    out.push_back(dv);
  }
  return out;
}

TidalJets tidal_jets(const BundleFields& b) {
  if (b.layout().order() < 2) throw UsageError("tidal tensor needs a context of order >= 2");
  if (b.layout().capped_vars() != 0 && b.layout().cap() < 1) {
    throw UsageError("tidal tensor needs x-derivatives of the connection");
  }
  TidalJets t;
  t.N = connection_jets(b);
  std::array<Mat4<Jet>, kDim> dNx, dNy;
  for (int k = 0; k < kDim; ++k) {
    dNx[k] = d_slot(t.N, k);
    dNy[k] = d_slot(t.N, kFiberSlot + k);
  }
  const JetLayout& LX = dNx[0][0][0].layout();
  const JetLayout& LY = dNy[0][0][0].layout();
  const Mat4<Jet> Nt = to_layout(t.N, LY);
  std::array<Mat4<Jet>, kDim> delta;  // delta[k][i][j] = delta_k N^i_j
  for (int k = 0; k < kDim; ++k)
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) {
        Jet s(LY, 0.0);
        for (int mm = 0; mm < kDim; ++mm) s += Nt[mm][k] * dNy[mm][i][j];
        delta[k][i][j] = dNx[k][i][j] - s.transfer(LX);
      }
  const Vec4<Jet> y = to_layout(b.y, LX);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      Jet e(LX, 0.0);
      t.R[i][j][j] = Jet(LX, 0.0);
      for (int k = 0; k < kDim; ++k) {
        if (k > j) {
          t.R[i][j][k] = delta[k][i][j] - delta[j][i][k];
          t.R[i][k][j] = -t.R[i][j][k];
        }
      }
      t.E[i][j] = e;
    }
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k) t.E[i][j] += t.R[i][j][k] * y[k];
  return t;
}

Rank3<double> n_curvature(const SpacetimeModel& m, const BundlePoint& p) {
  return values(tidal_jets(BundleFields(m, p, 2, 1)).R);
}

Mat4<double> tidal_tensor(const SpacetimeModel& m, const BundlePoint& p) {
  return values(tidal_jets(BundleFields(m, p, 2, 1)).E);
}

namespace {

DCurvature d_curvature_from(const BundleFields& b) {
  const TidalJets t = tidal_jets(b);
  DCurvature d{};
  d.tidal = values(t.E);
  Jet trace;
  for (int i = 0; i < kDim; ++i) trace += t.E[i][i];
  for (int i = 0; i < kDim; ++i)
    for (int k = 0; k < kDim; ++k)
      for (int j = 0; j < kDim; ++j) {
        const Jet ej = t.E[i][k].d(kFiberSlot + j);
        for (int l = 0; l < kDim; ++l) d.curvature[j][i][k][l] = 0.5 * ej.d(kFiberSlot + l).value();
      }
  for (int j = 0; j < kDim; ++j) {
    const Jet tj = trace.d(kFiberSlot + j);
    for (int l = 0; l < kDim; ++l) d.ricci[j][l] = -0.5 * tj.d(kFiberSlot + l).value();
  }
  const Mat4<double> gi = values(b.ginv);
  for (int j = 0; j < kDim; ++j)
    for (int l = 0; l < kDim; ++l) {
      d.scalar += gi[j][l] * d.ricci[j][l];
      double c = 0.0;
      for (int i = 0; i < kDim; ++i) c += d.curvature[j][i][l][i];
      d.contraction[j][l] = c;
    }
  return d;
}

double quad_term_from(const BundleFields& b) {
  std::array<Vec4<Jet>, kDim> Bh;  // Bh[i][h] = B^i.h
  for (int i = 0; i < kDim; ++i)
    for (int h = 0; h < kDim; ++h) Bh[i][h] = b.B[i].d(kFiberSlot + h);
  Jet S;
  for (int i = 0; i < kDim; ++i)
    for (int h = 0; h < kDim; ++h) S += Bh[i][h] * Bh[h][i];
  const Mat4<double> gi = values(b.ginv);
  double q = 0.0;
  for (int j = 0; j < kDim; ++j) {
    const Jet sj = S.d(kFiberSlot + j);
    for (int k = 0; k < kDim; ++k) q += gi[j][k] * sj.d(kFiberSlot + k).value();
  }
  return -0.5 * q;
}

double div_term_from(const BundleFields& b, DivTermVariant variant) {
  const SpacetimeModel& m = b.model();
  // B^i.jk as jets with one more derivative available in x and y.
  std::array<std::array<Vec4<Jet>, kDim>, kDim> Bjk;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      const Jet bj = b.B[i].d(kFiberSlot + j);
      for (int k = 0; k < kDim; ++k) Bjk[i][j][k] = bj.d(kFiberSlot + k);
    }
  const JetLayout& L = Bjk[0][0][0].layout();
  if (L.order() < 1 || (L.capped_vars() != 0 && L.cap() < 1)) {
    throw UsageError("divergence term needs first derivatives of B^i.jk");
  }
  const Mat4<Jet> gi = to_layout(b.ginv, L);
  Vec4<Jet> X;
  for (int i = 0; i < kDim; ++i) {
    Jet s(L, 0.0);
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k) {
        if (variant == DivTermVariant::kTraceFirstIndex) {
          s += gi[i][j] * Bjk[k][j][k];
        } else {
          s += gi[j][k] * Bjk[i][j][k];
        }
      }
    X[i] = s;
  }
  const double a_ref = variant == DivTermVariant::kRandersReference ? m.alpha : 0.0;
  const Mat4<double> N = nonlinear_connection(with_alpha(m, a_ref), b.point());
  const Rank3<double> gam = values(b.gamma);
  double div = 0.0;
  for (int i = 0; i < kDim; ++i) {
    div += X[i].d(i).value();
    for (int mm = 0; mm < kDim; ++mm) div -= N[mm][i] * X[i].d(kFiberSlot + mm).value();
    for (int k = 0; k < kDim; ++k) div += gam[i][i][k] * X[k].value();
  }
  return div;
}

double faraday_square_from(const BundleFields& b) {
  const Mat4<double> F = values(b.F);
  const Mat4<double> Fm = values(b.F_mixed);
  const Mat4<double> gi = values(b.ginv);
  double s = 0.0;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      double up = 0.0;
      for (int c = 0; c < kDim; ++c) up += Fm[i][c] * gi[c][j];
      s += F[i][j] * up;
    }
  return s;
}

}  // namespace

DCurvature d_curvature(const SpacetimeModel& m, const BundlePoint& p) {
  return d_curvature_from(BundleFields(m, p, 4, 1));
}

Theorem1Terms theorem1_decomposition(const SpacetimeModel& m, const BundlePoint& p,
                                     DivTermVariant variant) {
  const BundleFields b(m, p, 4, 1);
  Theorem1Terms t;
  t.R = d_curvature_from(b).scalar;
  t.r = ricci_scalar(m, p.x);
  t.div_term = div_term_from(b, variant);
  t.quad_term = quad_term_from(b);
  t.quad_expected = 1.5 * m.alpha * m.alpha * faraday_square_from(b);
  t.residual = t.R - t.r - t.div_term - t.quad_term;
  return t;
}

double quad_term(const SpacetimeModel& m, const BundlePoint& p) {
  return quad_term_from(BundleFields(m, p, 3, 0));
}

BScalar b_scalar_and_hessian(const SpacetimeModel& m, const BundlePoint& p) {
  const BundleFields b(m, p, 3, 0);
  std::array<Vec4<Jet>, kDim> Bh;
  for (int i = 0; i < kDim; ++i)
    for (int h = 0; h < kDim; ++h) Bh[i][h] = b.B[i].d(kFiberSlot + h);
  const JetLayout& L = Bh[0][0].layout();
  const Vec4<Jet> B = to_layout(b.B, L);
  const Mat4<Jet> g = to_layout(b.g, L);
  const Jet nsq = b.norm_sq.transfer(L);
  Jet BB(L, 0.0), S(L, 0.0);
  for (int l = 0; l < kDim; ++l)
    for (int mm = 0; mm < kDim; ++mm) BB += g[l][mm] * B[l] * B[mm];
  for (int i = 0; i < kDim; ++i)
    for (int h = 0; h < kDim; ++h) S += Bh[i][h] * Bh[h][i];
  const Jet scalar = 1.5 * (BB / nsq) + 0.5 * S;
  BScalar out;
  out.value = scalar.value();
  for (int i = 0; i < kDim; ++i) {
    const Jet si = scalar.d(kFiberSlot + i);
    for (int j = 0; j < kDim; ++j) out.hessian[i][j] = si.d(kFiberSlot + j).value();
  }
  return out;
}

namespace {

Mat4<Jet> variational_jets(const SpacetimeModel& m, const BaseGeometry& b) {
  const JetLayout& L = b.ricci[0][0].layout();
  const Mat4<Jet> g = to_layout(b.g, L);
  const Mat4<Jet> T = to_layout(stress_energy_jets(b.g, b.ginv, b.F), L);
  const double coupling = 8.0 * kPi * 1.5 * m.alpha * m.alpha;
  Mat4<Jet> out;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      out[i][j] = b.ricci[i][j] - 0.5 * (b.scalar * g[i][j]) - coupling * T[i][j];
  return out;
}

}  // namespace

Mat4<double> generalized_einstein_tensor(const SpacetimeModel& m, const Point4& x) {
  return values(variational_jets(m, BaseGeometry::compute(m, x, 2)));
}

SymmetricField generalized_einstein_field() {
  return [](const SpacetimeModel& m, const Point4& x, int order) {
    const BaseGeometry b = BaseGeometry::compute(m, x, order + 2);
    const Mat4<Jet> low = variational_jets(m, b);
    const JetLayout& L = low[0][0].layout();
    const Mat4<Jet> gi = to_layout(b.ginv, L);
    Mat4<Jet> up;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) {
        Jet s(L, 0.0);
        for (int a = 0; a < kDim; ++a)
          for (int c = 0; c < kDim; ++c) s += gi[i][a] * gi[j][c] * low[a][c];
        up[i][j] = s;
      }
    return up;
  };
}

GeneralizedEinstein generalized_einstein(const SpacetimeModel& m, const BundlePoint& p) {
  GeneralizedEinstein out;
  const BaseGeometry base = BaseGeometry::compute(m, p.x, 2);
  out.variational = values(variational_jets(m, base));
  out.classical = classical_einstein_maxwell(m, p.x);

  const BundleFields b(m, p, 4, 1);
  const DCurvature d = d_curvature_from(b);
  const BScalar bs = b_scalar_and_hessian(m, p);
  const double r = base.scalar.value();
  const double Rt = r + 1.5 * m.alpha * m.alpha * faraday_square_from(b);
  const Mat4<double> g = values(base.g);
  for (int j = 0; j < kDim; ++j)
    for (int l = 0; l < kDim; ++l)
      out.literal[j][l] = 0.5 * (d.ricci[j][l] + d.ricci[l][j]) - 0.5 * Rt * g[j][l] + bs.hessian[j][l];
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      out.variational_vs_classical =
          std::max(out.variational_vs_classical, std::abs(out.variational[i][j] - out.classical[i][j]));
      out.literal_vs_variational =
          std::max(out.literal_vs_variational, std::abs(out.literal[i][j] - out.variational[i][j]));
    }
  return out;
}

}  // namespace tmu
