#pragma once

// Independent finite-difference oracles and closed-form metrics shared by
// the tests. Nothing here calls the jet engine.

#include <cmath>
#include <functional>

#include "tmu/tensor.hpp"

namespace oracle {

using tmu::kDim;
using tmu::Mat4;
using tmu::Point4;
using tmu::Rank3;
using tmu::Rank4;
using MetricFn = std::function<Mat4<double>(const Point4&)>;

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline Mat4<double> diag(double a, double b, double c, double d) {
  Mat4<double> g{};
  g[0][0] = a;
  g[1][1] = b;
  g[2][2] = c;
  g[3][3] = d;
  return g;
}

inline MetricFn schwarzschild(double M) {
  return [M](const Point4& x) {
    const double r = x[1], s = std::sin(x[2]), f = 1 - 2 * M / r;
    return diag(f, -1 / f, -r * r, -r * r * s * s);
  };
}

inline MetricFn reissner_nordstrom(double M, double Q) {
  return [M, Q](const Point4& x) {
    const double r = x[1], s = std::sin(x[2]), f = 1 - 2 * M / r + Q * Q / (r * r);
    return diag(f, -1 / f, -r * r, -r * r * s * s);
  };
}

inline MetricFn weak_field(double M) {
  return [M](const Point4& x) {
    const double phi = -M / std::sqrt(x[1] * x[1] + x[2] * x[2] + x[3] * x[3]);
    return diag(1 + 2 * phi, -(1 - 2 * phi), -(1 - 2 * phi), -(1 - 2 * phi));
  };
}

// Plain Gauss-Jordan inverse.
inline Mat4<double> inv(Mat4<double> a) {
  Mat4<double> b{};
  for (int i = 0; i < kDim; ++i) b[i][i] = 1;
  for (int c = 0; c < kDim; ++c) {
    int p = c;
    for (int r = c + 1; r < kDim; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    std::swap(a[c], a[p]);
    std::swap(b[c], b[p]);
    const double d = a[c][c];
    for (int k = 0; k < kDim; ++k) {
      a[c][k] /= d;
      b[c][k] /= d;
    }
    for (int r = 0; r < kDim; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      for (int k = 0; k < kDim; ++k) {
        a[r][k] -= f * a[c][k];
        b[r][k] -= f * b[c][k];
      }
    }
  }
  return b;
}

inline Point4 shifted(Point4 x, int k, double h) {
  x[k] += h;
  return x;
}

// gamma^i_jk by central differences of g.
inline Rank3<double> christoffel(const MetricFn& g, const Point4& x, double h = 1e-5) {
  std::array<Mat4<double>, kDim> dg{};
  for (int k = 0; k < kDim; ++k) {
    const Mat4<double> p = g(shifted(x, k, h)), m = g(shifted(x, k, -h));
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b) dg[k][a][b] = (p[a][b] - m[a][b]) / (2 * h);
  }
  const Mat4<double> gi = inv(g(x));
  Rank3<double> G{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k) {
        double s = 0;
        for (int l = 0; l < kDim; ++l) s += gi[i][l] * (dg[k][l][j] + dg[j][l][k] - dg[l][j][k]);
        G[i][j][k] = 0.5 * s;
      }
  return G;
}

// r^i_jkl = d_k G^i_jl - d_l G^i_jk + G^i_mk G^m_jl - G^i_ml G^m_jk
inline Rank4<double> riemann(const MetricFn& g, const Point4& x, double h = 1e-3) {
  std::array<Rank3<double>, kDim> dG{};
  for (int k = 0; k < kDim; ++k) {
    // five-point stencil
    const Rank3<double> p1 = christoffel(g, shifted(x, k, h)), m1 = christoffel(g, shifted(x, k, -h));
    const Rank3<double> p2 = christoffel(g, shifted(x, k, 2 * h)), m2 = christoffel(g, shifted(x, k, -2 * h));
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b)
        for (int c = 0; c < kDim; ++c)
          dG[k][a][b][c] = (8 * (p1[a][b][c] - m1[a][b][c]) - (p2[a][b][c] - m2[a][b][c])) / (12 * h);
  }
  const Rank3<double> G = christoffel(g, x);
  Rank4<double> R{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) {
          double s = dG[k][i][j][l] - dG[l][i][j][k];
          for (int m = 0; m < kDim; ++m) s += G[i][m][k] * G[m][j][l] - G[i][m][l] * G[m][j][k];
          R[i][j][k][l] = s;
        }
  return R;
}

inline double ricci_scalar(const MetricFn& g, const Point4& x) {
  const Rank4<double> R = riemann(g, x);
  const Mat4<double> gi = inv(g(x));
  double s = 0;
  for (int j = 0; j < kDim; ++j)
    for (int l = 0; l < kDim; ++l)
      for (int i = 0; i < kDim; ++i) s += gi[j][l] * R[i][j][i][l];
  return s;
}

}  // namespace oracle
