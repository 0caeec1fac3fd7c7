#pragma once

// Fixed 4-dimensional tensor algebra over double or Jet components.
//
// Index order in the nested arrays follows the written index order, upper
// indices first where a mixed tensor is written that way: gamma[i][j][k] is
// gamma^i_jk, riemann[i][j][k][l] is r^i_{jkl}.

#include <array>
#include <cstddef>
#include <optional>
#include <type_traits>
#include <string>
#include <utility>
#include <vector>

#include "tmu/jet.hpp"

namespace tmu {

constexpr int kDim = 4;

template <class T>
using Vec4 = std::array<T, kDim>;
template <class T>
using Mat4 = std::array<Vec4<T>, kDim>;
template <class T>
using Rank3 = std::array<Mat4<T>, kDim>;
template <class T>
using Rank4 = std::array<Rank3<T>, kDim>;

using Point4 = Vec4<double>;

// ---- scalar extraction ---------------------------------------------------

inline double value_of(double v) { return v; }
inline double value_of(const Jet& j) { return j.value(); }

template <class T>
Vec4<double> values(const Vec4<T>& v) {
  Vec4<double> out{};
  for (int i = 0; i < kDim; ++i) out[i] = value_of(v[i]);
  return out;
}

template <class T>
Mat4<double> values(const Mat4<T>& m) {
  Mat4<double> out{};
  for (int i = 0; i < kDim; ++i) out[i] = values(m[i]);
  return out;
}

template <class T>
Rank3<double> values(const Rank3<T>& m) {
  Rank3<double> out{};
  for (int i = 0; i < kDim; ++i) out[i] = values(m[i]);
  return out;
}

template <class T>
Rank4<double> values(const Rank4<T>& m) {
  Rank4<double> out{};
  for (int i = 0; i < kDim; ++i) out[i] = values(m[i]);
  return out;
}

// ---- layout changes for jet tensors ---------------------------------------

inline Jet to_layout(const Jet& j, const JetLayout& L) { return j.transfer(L); }

template <class A>
auto to_layout(const std::array<A, kDim>& a, const JetLayout& L) {
  std::array<A, kDim> out;
  for (int i = 0; i < kDim; ++i) out[i] = to_layout(a[i], L);
  return out;
}

// Componentwise partial derivative in one jet slot.
inline Jet d_slot(const Jet& j, int slot) { return j.d(slot); }

template <class A>
auto d_slot(const std::array<A, kDim>& a, int slot) {
  std::array<A, kDim> out;
  for (int i = 0; i < kDim; ++i) out[i] = d_slot(a[i], slot);
  return out;
}

// ---- linear algebra -------------------------------------------------------

template <class T>
T determinant(const Mat4<T>& a) {
  T s0 = a[0][0] * a[1][1] - a[1][0] * a[0][1];
  T s1 = a[0][0] * a[1][2] - a[1][0] * a[0][2];
  T s2 = a[0][0] * a[1][3] - a[1][0] * a[0][3];
  T s3 = a[0][1] * a[1][2] - a[1][1] * a[0][2];
  T s4 = a[0][1] * a[1][3] - a[1][1] * a[0][3];
  T s5 = a[0][2] * a[1][3] - a[1][2] * a[0][3];
  T c5 = a[2][2] * a[3][3] - a[3][2] * a[2][3];
  T c4 = a[2][1] * a[3][3] - a[3][1] * a[2][3];
  T c3 = a[2][1] * a[3][2] - a[3][1] * a[2][2];
  T c2 = a[2][0] * a[3][3] - a[3][0] * a[2][3];
  T c1 = a[2][0] * a[3][2] - a[3][0] * a[2][2];
  T c0 = a[2][0] * a[3][1] - a[3][0] * a[2][1];
  return s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0;
}

// Adjugate / determinant. Throws SingularEvaluation on a zero determinant.
Mat4<double> inverse(const Mat4<double>& a);
Mat4<Jet> inverse(const Mat4<Jet>& a);

template <class T>
Mat4<T> adjugate(const Mat4<T>& a) {
  T s0 = a[0][0] * a[1][1] - a[1][0] * a[0][1];
  T s1 = a[0][0] * a[1][2] - a[1][0] * a[0][2];
  T s2 = a[0][0] * a[1][3] - a[1][0] * a[0][3];
  T s3 = a[0][1] * a[1][2] - a[1][1] * a[0][2];
  T s4 = a[0][1] * a[1][3] - a[1][1] * a[0][3];
  T s5 = a[0][2] * a[1][3] - a[1][2] * a[0][3];
  T c5 = a[2][2] * a[3][3] - a[3][2] * a[2][3];
  T c4 = a[2][1] * a[3][3] - a[3][1] * a[2][3];
  T c3 = a[2][1] * a[3][2] - a[3][1] * a[2][2];
  T c2 = a[2][0] * a[3][3] - a[3][0] * a[2][3];
  T c1 = a[2][0] * a[3][2] - a[3][0] * a[2][2];
  T c0 = a[2][0] * a[3][1] - a[3][0] * a[2][1];
  Mat4<T> b;
  b[0][0] = a[1][1] * c5 - a[1][2] * c4 + a[1][3] * c3;
  b[0][1] = -(a[0][1] * c5) + a[0][2] * c4 - a[0][3] * c3;
  b[0][2] = a[3][1] * s5 - a[3][2] * s4 + a[3][3] * s3;
  b[0][3] = -(a[2][1] * s5) + a[2][2] * s4 - a[2][3] * s3;
  b[1][0] = -(a[1][0] * c5) + a[1][2] * c2 - a[1][3] * c1;
  b[1][1] = a[0][0] * c5 - a[0][2] * c2 + a[0][3] * c1;
  b[1][2] = -(a[3][0] * s5) + a[3][2] * s2 - a[3][3] * s1;
  b[1][3] = a[2][0] * s5 - a[2][2] * s2 + a[2][3] * s1;
  b[2][0] = a[1][0] * c4 - a[1][1] * c2 + a[1][3] * c0;
  b[2][1] = -(a[0][0] * c4) + a[0][1] * c2 - a[0][3] * c0;
  b[2][2] = a[3][0] * s4 - a[3][1] * s2 + a[3][3] * s0;
  b[2][3] = -(a[2][0] * s4) + a[2][1] * s2 - a[2][3] * s0;
  b[3][0] = -(a[1][0] * c3) + a[1][1] * c1 - a[1][2] * c0;
  b[3][1] = a[0][0] * c3 - a[0][1] * c1 + a[0][2] * c0;
  b[3][2] = -(a[3][0] * s3) + a[3][1] * s1 - a[3][2] * s0;
  b[3][3] = a[2][0] * s3 - a[2][1] * s1 + a[2][2] * s0;
  return b;
}

template <class T, class U>
auto quadratic_form(const Mat4<T>& m, const Vec4<U>& a, const Vec4<U>& b) {
  decltype(m[0][0] * a[0]) s{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) s += m[i][j] * a[i] * b[j];
  return s;
}

template <class T, class U>
auto mat_vec(const Mat4<T>& m, const Vec4<U>& v) {
  Vec4<decltype(m[0][0] * v[0])> out{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) out[i] += m[i][j] * v[j];
  return out;
}

template <class T>
Mat4<T> mat_mul(const Mat4<T>& a, const Mat4<T>& b) {
  Mat4<T> out{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k) out[i][j] += a[i][k] * b[k][j];
  return out;
}

// Eigenvalues of a symmetric matrix (cyclic Jacobi), ascending.
Vec4<double> symmetric_eigenvalues(const Mat4<double>& a);
// Lower-triangular L with a = L L^T. Throws SingularEvaluation if a is not
// positive definite.
Mat4<double> cholesky(const Mat4<double>& a);

template <class T>
double max_abs(const T& v) {
  if constexpr (std::is_arithmetic_v<T>) {
    return v < 0 ? -v : v;
  } else if constexpr (std::is_same_v<T, Jet>) {
    double x = v.value();
    return x < 0 ? -x : x;
  } else {
    double m = 0.0;
    for (const auto& e : v) {
      double a = max_abs(e);
      if (a > m || a != a) m = a;
    }
    return m;
  }
}

// ---- runtime tensor value -------------------------------------------------

enum class Variance { kUpper, kLower };

// Dense real tensor with explicit index variance and evaluation point,
// used at the library boundary (inspection, reports, CLI output).
class TensorValue {
 public:
  struct Symmetry {
    int a;
    int b;
    bool anti;
  };

  TensorValue() = default;
  TensorValue(std::string name, std::vector<Variance> variance, std::vector<double> components,
              Point4 x, std::optional<Point4> y = std::nullopt,
              std::vector<Symmetry> symmetries = {});

  static TensorValue scalar(std::string name, double v, Point4 x,
                            std::optional<Point4> y = std::nullopt);
  static TensorValue from(std::string name, const Vec4<double>& v, Variance var, Point4 x,
                          std::optional<Point4> y = std::nullopt);
  static TensorValue from(std::string name, const Mat4<double>& m, std::vector<Variance> var,
                          Point4 x, std::optional<Point4> y = std::nullopt,
                          std::vector<Symmetry> symmetries = {});
  static TensorValue from(std::string name, const Rank3<double>& m, std::vector<Variance> var,
                          Point4 x, std::optional<Point4> y = std::nullopt,
                          std::vector<Symmetry> symmetries = {});
  static TensorValue from(std::string name, const Rank4<double>& m, std::vector<Variance> var,
                          Point4 x, std::optional<Point4> y = std::nullopt,
                          std::vector<Symmetry> symmetries = {});

  const std::string& name() const { return name_; }
  int rank() const { return static_cast<int>(variance_.size()); }
  const std::vector<Variance>& variance() const { return variance_; }
  const std::vector<double>& components() const { return c_; }
  const Point4& x() const { return x_; }
  const std::optional<Point4>& y() const { return y_; }
  const std::vector<Symmetry>& symmetries() const { return sym_; }

  double at(std::initializer_list<int> idx) const;

  // e.g. "^_" for a (1,1) tensor.
  std::string variance_string() const;

 private:
  std::string name_;
  std::vector<Variance> variance_;
  std::vector<double> c_;
  Point4 x_{};
  std::optional<Point4> y_;
  std::vector<Symmetry> sym_;
};

}  // namespace tmu
