#include "tmu/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tmu/error.hpp"

namespace tmu {

Mat4<double> inverse(const Mat4<double>& a) {
  const double det = determinant(a);
  if (det == 0.0 || !std::isfinite(det)) {
    throw SingularEvaluation("singular 4x4 matrix (det = " + std::to_string(det) + ")", det);
  }
  Mat4<double> b = adjugate(a);
  const double inv = 1.0 / det;
  for (auto& row : b)
    for (auto& v : row) v *= inv;
  return b;
}

Mat4<Jet> inverse(const Mat4<Jet>& a) {
  const Jet det = determinant(a);
  if (det.value() == 0.0) throw SingularEvaluation("singular metric (det = 0)", 0.0);
  const Jet inv = reciprocal(det);
  Mat4<Jet> b = adjugate(a);
  for (auto& row : b)
    for (auto& v : row) v = v * inv;
  return b;
}

Vec4<double> symmetric_eigenvalues(const Mat4<double>& m) {
  Mat4<double> a = m;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < kDim; ++p)
      for (int q = p + 1; q < kDim; ++q) off += a[p][q] * a[p][q];
    if (off == 0.0) break;
    for (int p = 0; p < kDim; ++p) {
      for (int q = p + 1; q < kDim; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < kDim; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < kDim; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  Vec4<double> ev{a[0][0], a[1][1], a[2][2], a[3][3]};
  std::sort(ev.begin(), ev.end());
  return ev;
}

Mat4<double> cholesky(const Mat4<double>& a) {
  Mat4<double> L{};
  for (int j = 0; j < kDim; ++j) {
    double d = a[j][j];
    for (int k = 0; k < j; ++k) d -= L[j][k] * L[j][k];
    if (!(d > 0.0)) throw SingularEvaluation("matrix is not positive definite", d);
    L[j][j] = std::sqrt(d);
    for (int i = j + 1; i < kDim; ++i) {
      double s = a[i][j];
      for (int k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
      L[i][j] = s / L[j][j];
    }
  }
  return L;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t flat_index(const std::vector<int>& idx) {
  std::size_t f = 0;
  for (int i : idx) f = f * kDim + static_cast<std::size_t>(i);
  return f;
}

}  // namespace

TensorValue::TensorValue(std::string name, std::vector<Variance> variance,
                         std::vector<double> components, Point4 x, std::optional<Point4> y,
                         std::vector<Symmetry> symmetries)
    : name_(std::move(name)),
      variance_(std::move(variance)),
      c_(std::move(components)),
      x_(x),
      y_(y),
      sym_(std::move(symmetries)) {
  std::size_t expect = 1;
  for (std::size_t r = 0; r < variance_.size(); ++r) expect *= kDim;
  if (c_.size() != expect) {
    throw UsageError("tensor " + name_ + ": " + std::to_string(c_.size()) +
                     " components for rank " + std::to_string(variance_.size()));
  }
  const int R = rank();
  double scale = 0.0;
  for (double v : c_) scale = std::max(scale, std::abs(v));
  const double tol = 1e-12 * std::max(1.0, scale);
  for (const auto& s : sym_) {
    if (s.a < 0 || s.b < 0 || s.a >= R || s.b >= R || s.a == s.b) {
      throw UsageError("tensor " + name_ + ": bad symmetry index pair");
    }
    if (variance_[s.a] != variance_[s.b]) {
      throw UsageError("tensor " + name_ + ": symmetry between indices of different variance");
    }
    std::vector<int> idx(R, 0);
    for (std::size_t f = 0; f < c_.size(); ++f) {
      std::size_t rem = f;
      for (int r = R - 1; r >= 0; --r) {
        idx[r] = static_cast<int>(rem % kDim);
        rem /= kDim;
      }
      std::vector<int> sw = idx;
      std::swap(sw[s.a], sw[s.b]);
      const double other = c_[flat_index(sw)];
      const double diff = s.anti ? c_[f] + other : c_[f] - other;
      if (std::abs(diff) > tol) {
        std::ostringstream os;
        os << "tensor " << name_ << " violates declared " << (s.anti ? "anti" : "")
           << "symmetry in indices " << s.a << "," << s.b << " (|diff| = " << std::abs(diff)
           << ")";
        throw UsageError(os.str());
      }
    }
  }
}

TensorValue TensorValue::scalar(std::string name, double v, Point4 x, std::optional<Point4> y) {
  return TensorValue(std::move(name), {}, {v}, x, y);
}

TensorValue TensorValue::from(std::string name, const Vec4<double>& v, Variance var, Point4 x,
                              std::optional<Point4> y) {
  return TensorValue(std::move(name), {var}, std::vector<double>(v.begin(), v.end()), x, y);
}

TensorValue TensorValue::from(std::string name, const Mat4<double>& m, std::vector<Variance> var,
                              Point4 x, std::optional<Point4> y, std::vector<Symmetry> sym) {
  std::vector<double> c;
  c.reserve(16);
  for (const auto& r : m) c.insert(c.end(), r.begin(), r.end());
  return TensorValue(std::move(name), std::move(var), std::move(c), x, y, std::move(sym));
}

TensorValue TensorValue::from(std::string name, const Rank3<double>& m, std::vector<Variance> var,
                              Point4 x, std::optional<Point4> y, std::vector<Symmetry> sym) {
  std::vector<double> c;
  c.reserve(64);
  for (const auto& a : m)
    for (const auto& r : a) c.insert(c.end(), r.begin(), r.end());
  return TensorValue(std::move(name), std::move(var), std::move(c), x, y, std::move(sym));
}

TensorValue TensorValue::from(std::string name, const Rank4<double>& m, std::vector<Variance> var,
                              Point4 x, std::optional<Point4> y, std::vector<Symmetry> sym) {
  std::vector<double> c;
  c.reserve(256);
  for (const auto& b : m)
    for (const auto& a : b)
      for (const auto& r : a) c.insert(c.end(), r.begin(), r.end());
  return TensorValue(std::move(name), std::move(var), std::move(c), x, y, std::move(sym));
}

double TensorValue::at(std::initializer_list<int> idx) const {
  if (static_cast<int>(idx.size()) != rank()) throw UsageError("tensor " + name_ + ": wrong index count");
  std::vector<int> v(idx);
  for (int i : v) {
    if (i < 0 || i >= kDim) throw UsageError("tensor " + name_ + ": index out of range");
  }
  return c_[flat_index(v)];
}

std::string TensorValue::variance_string() const {
  std::string s;
  for (auto v : variance_) s += v == Variance::kUpper ? '^' : '_';
  return s;
}

}  // namespace tmu
