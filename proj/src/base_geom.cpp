#include "tmu/base_geom.hpp"

#include <cmath>
#include <numbers>

#include "tmu/error.hpp"

namespace tmu {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

Rank3<Jet> christoffel_jets(const Mat4<Jet>& g, const Mat4<Jet>& ginv) {
  // dg[k][i][j] = d_k g_ij
  std::array<Mat4<Jet>, kDim> dg;
  for (int k = 0; k < kDim; ++k) dg[k] = d_slot(g, k);
  const JetLayout& L = dg[0][0][0].layout();
  const Mat4<Jet> gi = to_layout(ginv, L);
  Rank3<Jet> first;  // Gamma_{h jk}
  for (int h = 0; h < kDim; ++h)
    for (int j = 0; j < kDim; ++j)
      for (int k = j; k < kDim; ++k) {
        first[h][j][k] = 0.5 * (dg[k][h][j] + dg[j][h][k] - dg[h][j][k]);
        first[h][k][j] = first[h][j][k];
      }
  Rank3<Jet> gamma;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = j; k < kDim; ++k) {
        Jet s(L, 0.0);
        for (int h = 0; h < kDim; ++h) s += gi[i][h] * first[h][j][k];
        gamma[i][j][k] = s;
        gamma[i][k][j] = s;
      }
  return gamma;
}

Rank4<Jet> riemann_jets(const Rank3<Jet>& gamma) {
  std::array<Rank3<Jet>, kDim> dgam;  // dgam[k][i][j][l] = d_k gamma^i_jl
  for (int k = 0; k < kDim; ++k) dgam[k] = d_slot(gamma, k);
  const JetLayout& L = dgam[0][0][0][0].layout();
  const Rank3<Jet> G = to_layout(gamma, L);
  Rank4<Jet> R;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k) {
        R[i][j][k][k] = Jet(L, 0.0);
        for (int l = k + 1; l < kDim; ++l) {
          Jet s = dgam[k][i][j][l] - dgam[l][i][j][k];
          for (int m = 0; m < kDim; ++m) s += G[i][m][k] * G[m][j][l] - G[i][m][l] * G[m][j][k];
          R[i][j][k][l] = s;
          R[i][j][l][k] = -s;
        }
      }
  return R;
}

Mat4<Jet> ricci_jets(const Rank4<Jet>& R) {
  Mat4<Jet> ric;
  for (int j = 0; j < kDim; ++j)
    for (int l = 0; l < kDim; ++l) {
      Jet s;
      for (int i = 0; i < kDim; ++i) s += R[i][j][i][l];
      ric[j][l] = s;
    }
  // Symmetric up to round-off; store the symmetric part.
  for (int j = 0; j < kDim; ++j)
    for (int l = j + 1; l < kDim; ++l) {
      Jet s = 0.5 * (ric[j][l] + ric[l][j]);
      ric[j][l] = s;
      ric[l][j] = s;
    }
  return ric;
}

Mat4<Jet> faraday_jets(const Vec4<Jet>& A) {
  std::array<Vec4<Jet>, kDim> dA;  // dA[i][j] = d_i A_j
  for (int i = 0; i < kDim; ++i) dA[i] = d_slot(A, i);
  const JetLayout& L = dA[0][0].layout();
  Mat4<Jet> F;
  for (int i = 0; i < kDim; ++i) {
    F[i][i] = Jet(L, 0.0);
    for (int j = i + 1; j < kDim; ++j) {
      F[i][j] = dA[i][j] - dA[j][i];
      F[j][i] = -F[i][j];
    }
  }
  return F;
}

Mat4<Jet> raise_first(const Mat4<Jet>& ginv, const Mat4<Jet>& t) {
  const Mat4<Jet> gi = to_layout(ginv, t[0][0].layout());
  Mat4<Jet> out;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      Jet s;
      for (int h = 0; h < kDim; ++h) s += gi[i][h] * t[h][j];
      out[i][j] = s;
    }
  return out;
}

Mat4<Jet> stress_energy_jets(const Mat4<Jet>& g_in, const Mat4<Jet>& ginv_in, const Mat4<Jet>& F,
                             StressEnergySign sign) {
  const JetLayout& L = F[0][0].layout();
  const Mat4<Jet> g = to_layout(g_in, L);
  const Mat4<Jet> gi = to_layout(ginv_in, L);
  Mat4<Jet> Fup_second;  // F_i^m = F_il g^lm
  for (int i = 0; i < kDim; ++i)
    for (int m = 0; m < kDim; ++m) {
      Jet s(L, 0.0);
      for (int l = 0; l < kDim; ++l) s += F[i][l] * gi[l][m];
      Fup_second[i][m] = s;
    }
  Jet F2(L, 0.0);  // F_lm F^lm
  for (int l = 0; l < kDim; ++l)
    for (int m = 0; m < kDim; ++m) {
      Jet up(L, 0.0);
      for (int a = 0; a < kDim; ++a) up += gi[l][a] * Fup_second[a][m];
      F2 += F[l][m] * up;
    }
  const double s = (sign == StressEnergySign::kLandau ? 1.0 : -1.0) / (4.0 * kPi);
  Mat4<Jet> T;
  for (int i = 0; i < kDim; ++i)
    for (int j = i; j < kDim; ++j) {
      Jet v(L, 0.0);
      for (int m = 0; m < kDim; ++m) v -= Fup_second[i][m] * F[j][m];
      v += 0.25 * (g[i][j] * F2);
      T[i][j] = s * v;
      T[j][i] = T[i][j];
    }
  return T;
}

BaseGeometry BaseGeometry::compute(const SpacetimeModel& m, const Point4& x, int order,
                                   bool curvature) {
  BaseGeometry b;
  b.order = order;
  const JetLayout& L = JetLayout::get(order, kDim);
  b.g = metric_jet(m, x, L);
  b.ginv = inverse(b.g);
  b.A = potential_jet(m, x, L);
  if (order >= 1) {
    b.gamma = christoffel_jets(b.g, b.ginv);
    b.F = faraday_jets(b.A);
    b.F_mixed = raise_first(b.ginv, b.F);
  }
  if (curvature && order >= 2) {
    b.riemann = riemann_jets(b.gamma);
    b.ricci = ricci_jets(b.riemann);
    const Mat4<Jet> gi = to_layout(b.ginv, b.ricci[0][0].layout());
    Jet s(b.ricci[0][0].layout(), 0.0);
    for (int j = 0; j < kDim; ++j)
      for (int l = 0; l < kDim; ++l) s += gi[j][l] * b.ricci[j][l];
    b.scalar = s;
  }
  return b;
}

Rank3<double> christoffel(const SpacetimeModel& m, const Point4& x) {
  return values(BaseGeometry::compute(m, x, 1).gamma);
}

Rank4<double> riemann(const SpacetimeModel& m, const Point4& x) {
  return values(BaseGeometry::compute(m, x, 2).riemann);
}

Mat4<double> ricci(const SpacetimeModel& m, const Point4& x) {
  return values(BaseGeometry::compute(m, x, 2).ricci);
}

double ricci_scalar(const SpacetimeModel& m, const Point4& x) {
  return BaseGeometry::compute(m, x, 2).scalar.value();
}

Rank4<double> riemann_lowered(const SpacetimeModel& m, const Point4& x) {
  const BaseGeometry b = BaseGeometry::compute(m, x, 2);
  const Mat4<double> g = values(b.g);
  const Rank4<double> R = values(b.riemann);
  Rank4<double> out{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) {
          double s = 0.0;
          for (int a = 0; a < kDim; ++a) s += g[i][a] * R[a][j][k][l];
          out[i][j][k][l] = s;
        }
  return out;
}

Faraday faraday(const SpacetimeModel& m, const Point4& x) {
  const BaseGeometry b = BaseGeometry::compute(m, x, 1, false);
  return {values(b.F), values(b.F_mixed)};
}

double faraday_square(const SpacetimeModel& m, const Point4& x) {
  const Faraday f = faraday(m, x);
  const Mat4<double> gi = inverse(metric_value(m, x));
  double s = 0.0;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      double up = 0.0;  // F^ij = g^jb F^i_b... via F^i_b g^bj
      for (int b = 0; b < kDim; ++b) up += f.mixed[i][b] * gi[b][j];
      s += f.lower[i][j] * up;
    }
  return s;
}

MaxwellResiduals maxwell_residuals(const SpacetimeModel& m, const Point4& x) {
  const BaseGeometry b = BaseGeometry::compute(m, x, 2, false);
  MaxwellResiduals out{};

  // Covariant derivatives nabla_i F_jk at the point.
  std::array<Mat4<Jet>, kDim> dF;
  for (int i = 0; i < kDim; ++i) dF[i] = d_slot(b.F, i);
  const Rank3<double> gam = values(b.gamma);
  const Mat4<double> F = values(b.F);
  auto nabla = [&](int i, int j, int k) {
    double v = dF[i][j][k].value();
    for (int mm = 0; mm < kDim; ++mm) v -= gam[mm][i][j] * F[mm][k] + gam[mm][i][k] * F[j][mm];
    return v;
  };
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        out.homogeneous[i][j][k] = nabla(i, j, k) + nabla(k, i, j) + nabla(j, k, i);

  // Densitised divergence of F^ij; everything at order 1.
  const JetLayout& L1 = b.F[0][0].layout();
  const Mat4<Jet> gi = to_layout(b.ginv, L1);
  const Jet sqrt_g = sqrt(-determinant(to_layout(b.g, L1)));
  Mat4<Jet> dens;  // sqrt(-g) F^ij
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      Jet s(L1, 0.0);
      for (int a = 0; a < kDim; ++a)
        for (int c = 0; c < kDim; ++c) s += gi[i][a] * gi[j][c] * b.F[a][c];
      dens[i][j] = sqrt_g * s;
    }
  for (int i = 0; i < kDim; ++i) {
    double div = 0.0;
    for (int j = 0; j < kDim; ++j) div += dens[i][j].d(j).value();
    out.current[i] = -(m.c / (4.0 * kPi)) * div / sqrt_g.value();
  }
  return out;
}

Mat4<double> em_stress_energy(const SpacetimeModel& m, const Point4& x, StressEnergySign sign) {
  const BaseGeometry b = BaseGeometry::compute(m, x, 1, false);
  return values(stress_energy_jets(b.g, b.ginv, b.F, sign));
}

namespace {

Mat4<Jet> einstein_jets(const BaseGeometry& b) {
  const JetLayout& L = b.ricci[0][0].layout();
  const Mat4<Jet> g = to_layout(b.g, L);
  Mat4<Jet> G;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) G[i][j] = b.ricci[i][j] - 0.5 * (b.scalar * g[i][j]);
  return G;
}

Mat4<Jet> einstein_maxwell_jets(const SpacetimeModel& m, const BaseGeometry& b,
                                StressEnergySign sign) {
  Mat4<Jet> G = einstein_jets(b);
  const JetLayout& L = G[0][0].layout();
  const Mat4<Jet> T = to_layout(stress_energy_jets(b.g, b.ginv, b.F, sign), L);
  const double kappa = 8.0 * kPi * m.k / std::pow(m.c, 4);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) G[i][j] -= kappa * T[i][j];
  return G;
}

Mat4<Jet> raise_both(const Mat4<Jet>& ginv_in, const Mat4<Jet>& t) {
  const JetLayout& L = t[0][0].layout();
  const Mat4<Jet> gi = to_layout(ginv_in, L);
  Mat4<Jet> half;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      Jet s(L, 0.0);
      for (int a = 0; a < kDim; ++a) s += gi[i][a] * t[a][j];
      half[i][j] = s;
    }
  Mat4<Jet> out;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      Jet s(L, 0.0);
      for (int c = 0; c < kDim; ++c) s += half[i][c] * gi[c][j];
      out[i][j] = s;
    }
  return out;
}

}  // namespace

Mat4<double> einstein_tensor(const SpacetimeModel& m, const Point4& x) {
  return values(einstein_jets(BaseGeometry::compute(m, x, 2)));
}

Mat4<double> classical_einstein_maxwell(const SpacetimeModel& m, const Point4& x,
                                        StressEnergySign sign) {
  return values(einstein_maxwell_jets(m, BaseGeometry::compute(m, x, 2), sign));
}

SymmetricField inverse_metric_field() {
  return [](const SpacetimeModel& m, const Point4& x, int order) {
    return inverse(metric_jet(m, x, order));
  };
}

SymmetricField einstein_field() {
  return [](const SpacetimeModel& m, const Point4& x, int order) {
    const BaseGeometry b = BaseGeometry::compute(m, x, order + 2);
    return raise_both(b.ginv, einstein_jets(b));
  };
}

SymmetricField stress_energy_field(StressEnergySign sign) {
  return [sign](const SpacetimeModel& m, const Point4& x, int order) {
    const BaseGeometry b = BaseGeometry::compute(m, x, order + 1, false);
    return raise_both(b.ginv, stress_energy_jets(b.g, b.ginv, b.F, sign));
  };
}

SymmetricField einstein_maxwell_field(StressEnergySign sign) {
  return [sign](const SpacetimeModel& m, const Point4& x, int order) {
    const BaseGeometry b = BaseGeometry::compute(m, x, order + 2);
    return raise_both(b.ginv, einstein_maxwell_jets(m, b, sign));
  };
}

Vec4<double> covariant_divergence(const SpacetimeModel& m, const Point4& x,
                                  const SymmetricField& field) {
  if (!field) throw UsageError("covariant_divergence needs a jet-evaluable field");
  const Mat4<Jet> S = field(m, x, 1);
  if (!S[0][0].has_layout() || S[0][0].order() < 1) {
    throw UsageError("field did not return first-order jets");
  }
  const Rank3<double> gam = christoffel(m, x);
  const Mat4<double> Sv = values(S);
  Vec4<double> out{};
  for (int i = 0; i < kDim; ++i) {
    double v = 0.0;
    for (int j = 0; j < kDim; ++j) v += S[i][j].d(j).value();
    for (int mm = 0; mm < kDim; ++mm)
      for (int j = 0; j < kDim; ++j) v += gam[i][mm][j] * Sv[mm][j] + gam[j][mm][j] * Sv[i][mm];
    out[i] = v;
  }
  return out;
}

Vec4<double> classical_lorentz_rhs(const SpacetimeModel& m, const Point4& x, const Point4& y,
                                   double q_over_m) {
  const BaseGeometry b = BaseGeometry::compute(m, x, 1, false);
  const Mat4<double> g = values(b.g);
  if (!(quadratic_form(g, y, y) > 0.0)) {
    throw SingularEvaluation("classical Lorentz force needs timelike y", quadratic_form(g, y, y));
  }
  const Rank3<double> gam = values(b.gamma);
  const Mat4<double> Fm = values(b.F_mixed);
  Vec4<double> a{};
  for (int i = 0; i < kDim; ++i) {
    double s = 0.0;
    for (int j = 0; j < kDim; ++j) {
      for (int k = 0; k < kDim; ++k) s -= gam[i][j][k] * y[j] * y[k];
      s += q_over_m * Fm[i][j] * y[j];
    }
    a[i] = s;
  }
  return a;
}

}  // namespace tmu
