#pragma once

// Truncated multivariate Taylor expansions ("jets").
//
// A jet stores Taylor coefficients c_e (partial derivative / e!) for every
// multi-index e in a JetLayout. Layouts are graded: all monomials of total
// degree <= order in nvars slots, ordered by degree and then reverse
// lexicographically, so truncating to a lower order keeps a prefix.
//
// A layout may additionally cap the combined degree of the first
// `capped_vars` slots. The bundle computations put base coordinates x in
// slots 0..3 and fiber coordinates y in slots 4..7 and only ever need a few
// x-derivatives of high y-derivatives; the cap keeps those jets small. The
// dropped monomials form an ideal, so arithmetic on the remaining
// coefficients is still exact.

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "tmu/simd/kernels.hpp"

namespace tmu {

using Exponents = std::array<std::uint8_t, 8>;

class JetLayout {
 public:
  static constexpr int kMaxOrder = 4;
  static constexpr int kMaxVars = 8;

  static const JetLayout& get(int order, int nvars);
  static const JetLayout& get(int order, int nvars, int capped_vars, int cap);

  int order() const { return order_; }
  int nvars() const { return nvars_; }
  // 0 when no cap applies; cap() then equals order().
  int capped_vars() const { return capped_vars_; }
  int cap() const { return cap_; }

  std::size_t size() const { return exps_.size(); }
  const Exponents& exponents(std::size_t i) const { return exps_[i]; }
  int degree(std::size_t i) const { return degrees_[i]; }
  int capped_degree(const Exponents& e) const;
  // Number of monomials with total degree <= d.
  std::size_t graded_size(int d) const;
  // Index of e, or -1.
  std::ptrdiff_t find(const Exponents& e) const;
  bool contains(const Exponents& e) const;
  double multi_factorial(std::size_t i) const { return factorials_[i]; }

  const simd::ProductPlan& product_plan() const { return plan_; }

  // Layout of d/d(slot) of a jet in this layout; nullptr when the slot's
  // degree budget is exhausted.
  const JetLayout* derivative_layout(int slot) const { return deriv_layout_[slot]; }
  std::span<const std::int32_t> derivative_source(int slot) const { return deriv_src_[slot]; }
  std::span<const double> derivative_factor(int slot) const { return deriv_fac_[slot]; }

  JetLayout(const JetLayout&) = delete;
  JetLayout& operator=(const JetLayout&) = delete;

 private:
  JetLayout(int order, int nvars, int capped_vars, int cap);
  friend struct LayoutRegistry;

  int order_;
  int nvars_;
  int capped_vars_;
  int cap_;
  std::vector<Exponents> exps_;
  std::vector<int> degrees_;
  std::vector<double> factorials_;
  std::vector<std::uint32_t> keys_;     // sorted encodings for find()
  std::vector<std::int32_t> key_index_;  // parallel to keys_
  simd::ProductPlan plan_;
  std::array<const JetLayout*, kMaxVars> deriv_layout_{};
  std::array<std::vector<std::int32_t>, kMaxVars> deriv_src_;
  std::array<std::vector<double>, kMaxVars> deriv_fac_;
};

class Jet {
 public:
  // Exact zero without a layout. It adopts the layout of whatever it is
  // combined with, which keeps tensor accumulation loops simple.
  Jet() = default;
  Jet(const JetLayout& layout, double value);

  // value + (x_slot - value): the identity function of one slot.
  static Jet variable(const JetLayout& layout, int slot, double value);
  static Jet seed(int slot, double value, int order, int nvars);

  bool has_layout() const { return layout_ != nullptr; }
  const JetLayout& layout() const;
  int order() const;

  double value() const { return c_.empty() ? 0.0 : c_[0]; }
  std::span<const double> coefficients() const { return c_; }
  double coefficient(const Exponents& e) const;

  // Partial derivative for the multi-index e (exponent per slot).
  double derivative(const Exponents& e) const;
  // Partial derivative over a list of slots, e.g. {0, 0, 5} = d^3/dx0^2 dx5.
  double partial(std::initializer_list<int> slots) const;

  // Jet of the partial derivative d/d(slot); order drops by one.
  Jet d(int slot) const;

  // Re-expresses the same function in another layout: coefficients present
  // in both are copied, monomials in slots this jet does not have are zero.
  // Throws if the target needs a coefficient this jet does not carry.
  Jet transfer(const JetLayout& to) const;

  Jet operator-() const;
  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator/=(const Jet& o);
  Jet& operator+=(double v);
  Jet& operator-=(double v);
  Jet& operator*=(double v);
  Jet& operator/=(double v);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator+(Jet a, double v) { return a += v; }
  friend Jet operator+(double v, Jet a) { return a += v; }
  friend Jet operator-(Jet a, double v) { return a -= v; }
  friend Jet operator-(double v, const Jet& a) { return (-a) += v; }
  friend Jet operator*(Jet a, double v) { return a *= v; }
  friend Jet operator*(double v, Jet a) { return a *= v; }
  friend Jet operator/(Jet a, double v) { return a /= v; }
  friend Jet operator/(double v, const Jet& a);

  // f(a) from the scaled derivatives taylor[n] = f^(n)(a0) / n!.
  friend Jet compose(const Jet& a, std::span<const double> taylor);

 private:
  const JetLayout* layout_ = nullptr;
  std::vector<double> c_;
};

Jet reciprocal(const Jet& a);
Jet sqrt(const Jet& a);
Jet pow(const Jet& a, double exponent);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
// Smooth only away from zero; a zero value is an error unless the jet
// carries no derivatives.
Jet abs(const Jet& a);

}  // namespace tmu
