#include "tmu/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <utility>

#include "tmu/error.hpp"

namespace tmu {
namespace {

std::uint32_t encode(const Exponents& e) {
  std::uint32_t key = 0;
  for (int v = JetLayout::kMaxVars - 1; v >= 0; --v) key = key * 5 + e[v];
  return key;
}

int total_degree(const Exponents& e) {
  int d = 0;
  for (auto x : e) d += x;
  return d;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void enumerate(int slot, int nvars, int remaining, Exponents& cur, std::vector<Exponents>& out) {
  if (slot == nvars) {
    out.push_back(cur);
    return;
  }
  for (int p = 0; p <= remaining; ++p) {
    cur[slot] = static_cast<std::uint8_t>(p);
    enumerate(slot + 1, nvars, remaining - p, cur, out);
  }
  cur[slot] = 0;
}

}  // namespace

struct LayoutRegistry {
  using Key = std::tuple<int, int, int, int>;
  std::mutex mu;
  std::map<Key, std::unique_ptr<JetLayout>> layouts;

  std::mutex transfer_mu;
  std::map<std::pair<const JetLayout*, const JetLayout*>, std::vector<std::int32_t>> transfers;

  static LayoutRegistry& instance() {
    static LayoutRegistry r;
    return r;
  }

  const JetLayout& get(int order, int nvars, int capped, int cap) {
    if (order < 0 || order > JetLayout::kMaxOrder) {
      throw UsageError("jet order " + std::to_string(order) + " outside 0.." +
                       std::to_string(JetLayout::kMaxOrder));
    }
    if (nvars < 1 || nvars > JetLayout::kMaxVars) {
      throw UsageError("jet nvars " + std::to_string(nvars) + " outside 1..8");
    }
    if (capped < 0 || capped > nvars || cap < 0) {
      throw UsageError("invalid jet degree cap");
    }
    if (capped == 0 || cap >= order) {
      capped = 0;
      cap = order;
    }
    const Key key{order, nvars, capped, cap};
    {
      std::lock_guard<std::mutex> lock(mu);
      auto it = layouts.find(key);
      if (it != layouts.end()) return *it->second;
    }
    // Built outside the lock: the constructor recursively requests the
    // derivative layouts.
    std::unique_ptr<JetLayout> fresh(new JetLayout(order, nvars, capped, cap));
    std::lock_guard<std::mutex> lock(mu);
    auto [it, inserted] = layouts.emplace(key, std::move(fresh));
    return *it->second;
  }

  const std::vector<std::int32_t>& transfer_map(const JetLayout& from, const JetLayout& to) {
    std::lock_guard<std::mutex> lock(transfer_mu);
    auto key = std::make_pair(&from, &to);
    auto it = transfers.find(key);
    if (it != transfers.end()) return it->second;
    std::vector<std::int32_t> map(to.size());
    for (std::size_t k = 0; k < to.size(); ++k) {
      const Exponents& e = to.exponents(k);
      bool foreign = false;
      for (int v = from.nvars(); v < JetLayout::kMaxVars; ++v) foreign |= e[v] != 0;
      if (foreign) {
        map[k] = -1;
      } else {
        auto idx = from.find(e);
        map[k] = idx >= 0 ? static_cast<std::int32_t>(idx) : -2;
      }
    }
    return transfers.emplace(key, std::move(map)).first->second;
  }
};

JetLayout::JetLayout(int order, int nvars, int capped_vars, int cap)
    : order_(order), nvars_(nvars), capped_vars_(capped_vars), cap_(cap) {
  std::vector<Exponents> all;
  Exponents cur{};
  enumerate(0, nvars, order, cur, all);
  for (const auto& e : all) {
    if (capped_degree(e) <= cap_) exps_.push_back(e);
  }
  std::stable_sort(exps_.begin(), exps_.end(), [](const Exponents& a, const Exponents& b) {
    int da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    return a > b;
  });
  degrees_.reserve(exps_.size());
  factorials_.reserve(exps_.size());
  std::vector<std::pair<std::uint32_t, std::int32_t>> keyed;
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    degrees_.push_back(total_degree(exps_[i]));
    double f = 1.0;
    for (auto p : exps_[i]) f *= factorial(p);
    factorials_.push_back(f);
    keyed.emplace_back(encode(exps_[i]), static_cast<std::int32_t>(i));
  }
  std::sort(keyed.begin(), keyed.end());
  for (auto& [k, i] : keyed) {
    keys_.push_back(k);
    key_index_.push_back(i);
  }

  // Product plan grouped by output monomial.
  std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> pairs(exps_.size());
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    for (std::size_t j = 0; j < exps_.size(); ++j) {
      if (degrees_[i] + degrees_[j] > order_) continue;
      Exponents s{};
      for (int v = 0; v < kMaxVars; ++v) s[v] = static_cast<std::uint8_t>(exps_[i][v] + exps_[j][v]);
      auto k = find(s);
      if (k >= 0) pairs[k].emplace_back(static_cast<std::int32_t>(i), static_cast<std::int32_t>(j));
    }
  }
  plan_.offsets.push_back(0);
  for (auto& list : pairs) {
    for (auto [i, j] : list) {
      plan_.lhs.push_back(i);
      plan_.rhs.push_back(j);
    }
    plan_.offsets.push_back(static_cast<std::int32_t>(plan_.lhs.size()));
  }

  if (order_ == 0) return;
  for (int s = 0; s < nvars_; ++s) {
    const bool capped = s < capped_vars_;
    if (capped && cap_ == 0) continue;
    const JetLayout& target =
        LayoutRegistry::instance().get(order_ - 1, nvars_, capped_vars_, capped ? cap_ - 1 : cap_);
    deriv_layout_[s] = &target;
    auto& src = deriv_src_[s];
    auto& fac = deriv_fac_[s];
    src.reserve(target.size());
    fac.reserve(target.size());
    for (std::size_t k = 0; k < target.size(); ++k) {
      Exponents e = target.exponents(k);
      fac.push_back(static_cast<double>(e[s] + 1));
      e[s] += 1;
      src.push_back(static_cast<std::int32_t>(find(e)));
    }
  }
}

const JetLayout& JetLayout::get(int order, int nvars) {
  return LayoutRegistry::instance().get(order, nvars, 0, order);
}

const JetLayout& JetLayout::get(int order, int nvars, int capped_vars, int cap) {
  return LayoutRegistry::instance().get(order, nvars, capped_vars, cap);
}

int JetLayout::capped_degree(const Exponents& e) const {
  int d = 0;
  for (int v = 0; v < capped_vars_; ++v) d += e[v];
  return d;
}

std::size_t JetLayout::graded_size(int d) const {
  if (d >= order_) return exps_.size();
  if (d < 0) return 0;
  return static_cast<std::size_t>(
      std::upper_bound(degrees_.begin(), degrees_.end(), d) - degrees_.begin());
}

std::ptrdiff_t JetLayout::find(const Exponents& e) const {
  for (int v = nvars_; v < kMaxVars; ++v) {
    if (e[v] != 0) return -1;
  }
  if (total_degree(e) > order_ || capped_degree(e) > cap_) return -1;
  auto key = encode(e);
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return -1;
  return key_index_[it - keys_.begin()];
}

bool JetLayout::contains(const Exponents& e) const { return find(e) >= 0; }

// ---------------------------------------------------------------------------

Jet::Jet(const JetLayout& layout, double value) : layout_(&layout), c_(layout.size(), 0.0) {
  c_[0] = value;
}

Jet Jet::variable(const JetLayout& layout, int slot, double value) {
  if (slot < 0 || slot >= layout.nvars()) {
    throw UsageError("jet slot " + std::to_string(slot) + " out of range for " +
                     std::to_string(layout.nvars()) + " variables");
  }
  Jet j(layout, value);
  if (layout.order() >= 1) {
    Exponents e{};
    e[slot] = 1;
    auto idx = layout.find(e);
    if (idx >= 0) j.c_[idx] = 1.0;
  }
  return j;
}

Jet Jet::seed(int slot, double value, int order, int nvars) {
  return variable(JetLayout::get(order, nvars), slot, value);
}

const JetLayout& Jet::layout() const {
  if (!layout_) throw UsageError("jet has no layout (uninitialised zero)");
  return *layout_;
}

int Jet::order() const { return layout_ ? layout_->order() : 0; }

double Jet::coefficient(const Exponents& e) const {
  if (!layout_) return 0.0;
  if (total_degree(e) > layout_->order()) {
    throw UsageError("coefficient degree exceeds jet order");
  }
  auto idx = layout_->find(e);
  if (idx < 0) throw UsageError("coefficient not carried by this jet layout");
  return c_[idx];
}

double Jet::derivative(const Exponents& e) const {
  if (!layout_) return 0.0;
  double f = 1.0;
  for (auto p : e) f *= factorial(p);
  return coefficient(e) * f;
}

double Jet::partial(std::initializer_list<int> slots) const {
  Exponents e{};
  for (int s : slots) {
    if (s < 0 || s >= JetLayout::kMaxVars) throw UsageError("derivative slot out of range");
    e[s] += 1;
  }
  return derivative(e);
}

Jet Jet::d(int slot) const {
  if (!layout_) return {};
  if (slot < 0 || slot >= layout_->nvars()) throw UsageError("derivative slot out of range");
  const JetLayout* target = layout_->derivative_layout(slot);
  if (!target) {
    throw UsageError("derivative in slot " + std::to_string(slot) +
                     " exceeds the degree carried by this jet");
  }
  Jet out;
  out.layout_ = target;
  out.c_.resize(target->size());
  auto src = layout_->derivative_source(slot);
  auto fac = layout_->derivative_factor(slot);
  for (std::size_t k = 0; k < out.c_.size(); ++k) out.c_[k] = fac[k] * c_[src[k]];
  return out;
}

Jet Jet::transfer(const JetLayout& to) const {
  if (!layout_) return Jet(to, 0.0);
  if (layout_ == &to) return *this;
  const auto& map = LayoutRegistry::instance().transfer_map(*layout_, to);
  Jet out(to, 0.0);
  for (std::size_t k = 0; k < map.size(); ++k) {
    if (map[k] == -2) {
      throw UsageError("jet transfer needs coefficients beyond the source order");
    }
    out.c_[k] = map[k] >= 0 ? c_[map[k]] : 0.0;
  }
  return out;
}

namespace {
void check_same(const JetLayout* a, const JetLayout* b) {
  if (a != b) {
    throw UsageError("jet arithmetic on mismatched layouts (order " +
                     std::to_string(a->order()) + "/" + std::to_string(a->nvars()) + " vs " +
                     std::to_string(b->order()) + "/" + std::to_string(b->nvars()) + ")");
  }
}
}  // namespace

Jet Jet::operator-() const {
  Jet out = *this;
  if (layout_) simd::kernels().scale(c_.size(), -1.0, c_.data(), out.c_.data());
  return out;
}

Jet& Jet::operator+=(const Jet& o) {
  if (!o.layout_) return *this;
  if (!layout_) return *this = o;
  check_same(layout_, o.layout_);
  simd::kernels().axpby(c_.size(), 1.0, c_.data(), 1.0, o.c_.data(), c_.data());
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  if (!o.layout_) return *this;
  if (!layout_) return *this = -o;
  check_same(layout_, o.layout_);
  simd::kernels().axpby(c_.size(), 1.0, c_.data(), -1.0, o.c_.data(), c_.data());
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  if (!a.layout_ && !b.layout_) return {};
  if (!a.layout_) return Jet(*b.layout_, 0.0);
  if (!b.layout_) return Jet(*a.layout_, 0.0);
  check_same(a.layout_, b.layout_);
  Jet out;
  out.layout_ = a.layout_;
  out.c_.resize(a.c_.size());
  simd::kernels().product(a.layout_->product_plan(), a.c_.data(), b.c_.data(), out.c_.data());
  return out;
}

Jet& Jet::operator*=(const Jet& o) { return *this = *this * o; }

Jet operator/(const Jet& a, const Jet& b) {
  if (!b.layout_) throw SingularEvaluation("division by a zero-valued jet", 0.0);
  if (!a.layout_) return Jet(*b.layout_, 0.0) * reciprocal(b);
  return a * reciprocal(b);
}

Jet& Jet::operator/=(const Jet& o) { return *this = *this / o; }

Jet& Jet::operator+=(double v) {
  if (!layout_) throw UsageError("cannot add a scalar to a jet without layout");
  c_[0] += v;
  return *this;
}

Jet& Jet::operator-=(double v) { return *this += -v; }

Jet& Jet::operator*=(double v) {
  if (layout_) simd::kernels().scale(c_.size(), v, c_.data(), c_.data());
  return *this;
}

Jet& Jet::operator/=(double v) {
  if (v == 0.0) throw SingularEvaluation("division of a jet by zero", 0.0);
  return *this *= 1.0 / v;
}

Jet operator/(double v, const Jet& a) { return reciprocal(a) * v; }

Jet compose(const Jet& a, std::span<const double> taylor) {
  const JetLayout& L = a.layout();
  Jet h = a;
  h.c_[0] = 0.0;
  const int K = L.order();
  Jet result(L, taylor[K]);
  for (int n = K - 1; n >= 0; --n) {
    result = result * h;
    result.c_[0] += taylor[n];
  }
  return result;
}

namespace {

// f^(n)(x)/n! for the binomial series of x^p.
std::array<double, JetLayout::kMaxOrder + 1> power_series(double x, double p, int K) {
  std::array<double, JetLayout::kMaxOrder + 1> t{};
  double falling = 1.0;
  for (int n = 0; n <= K; ++n) {
    t[n] = falling == 0.0 ? 0.0 : falling * std::pow(x, p - n) / factorial(n);
    falling *= (p - n);
  }
  return t;
}

}  // namespace

Jet reciprocal(const Jet& a) {
  const double v = a.value();
  if (v == 0.0 || !a.has_layout()) throw SingularEvaluation("division by a zero-valued jet", v);
  const int K = a.order();
  std::array<double, JetLayout::kMaxOrder + 1> t{};
  double p = 1.0 / v;
  for (int n = 0; n <= K; ++n) {
    t[n] = (n % 2 == 0 ? 1.0 : -1.0) * p;
    p /= v;
  }
  return compose(a, std::span<const double>(t.data(), K + 1));
}

Jet sqrt(const Jet& a) {
  const double v = a.value();
  const int K = a.order();
  if (v < 0.0 || (v == 0.0 && K > 0)) {
    throw SingularEvaluation("sqrt of non-positive value " + std::to_string(v), v);
  }
  if (!a.has_layout()) return {};
  auto t = power_series(v, 0.5, K);
  return compose(a, std::span<const double>(t.data(), K + 1));
}

Jet pow(const Jet& a, double p) {
  const double v = a.value();
  const int K = a.order();
  const bool integral = p == std::floor(p);
  if (!integral && v <= 0.0) {
    throw SingularEvaluation("non-integer power of non-positive value " + std::to_string(v), v);
  }
  if (integral && v == 0.0 && p < K) {
    // Some derivative of x^p is singular or needs 0^negative.
    if (p < 0) throw SingularEvaluation("negative power of zero", v);
  }
  if (!a.has_layout()) {
    if (p == 0.0) throw UsageError("pow of an uninitialised jet");
    return {};
  }
  std::array<double, JetLayout::kMaxOrder + 1> t{};
  if (integral && v == 0.0) {
    // Only the p-th coefficient survives.
    if (p >= 0 && p <= K) t[static_cast<int>(p)] = 1.0;
  } else {
    t = power_series(v, p, K);
  }
  return compose(a, std::span<const double>(t.data(), K + 1));
}

Jet exp(const Jet& a) {
  if (!a.has_layout()) throw UsageError("exp of an uninitialised jet");
  const int K = a.order();
  const double e = std::exp(a.value());
  std::array<double, JetLayout::kMaxOrder + 1> t{};
  for (int n = 0; n <= K; ++n) t[n] = e / factorial(n);
  return compose(a, std::span<const double>(t.data(), K + 1));
}

Jet log(const Jet& a) {
  const double v = a.value();
  if (v <= 0.0) throw SingularEvaluation("ln of non-positive value " + std::to_string(v), v);
  const int K = a.order();
  std::array<double, JetLayout::kMaxOrder + 1> t{};
  t[0] = std::log(v);
  double p = 1.0;
  for (int n = 1; n <= K; ++n) {
    p /= v;
    t[n] = (n % 2 == 1 ? 1.0 : -1.0) * p / n;
  }
  return compose(a, std::span<const double>(t.data(), K + 1));
}

Jet sin(const Jet& a) {
  if (!a.has_layout()) return {};
  const int K = a.order();
  const double s = std::sin(a.value()), c = std::cos(a.value());
  const double cyc[4] = {s, c, -s, -c};
  std::array<double, JetLayout::kMaxOrder + 1> t{};
  for (int n = 0; n <= K; ++n) t[n] = cyc[n % 4] / factorial(n);
  return compose(a, std::span<const double>(t.data(), K + 1));
}

Jet cos(const Jet& a) {
  if (!a.has_layout()) throw UsageError("cos of an uninitialised jet");
  const int K = a.order();
  const double s = std::sin(a.value()), c = std::cos(a.value());
  const double cyc[4] = {c, -s, -c, s};
  std::array<double, JetLayout::kMaxOrder + 1> t{};
  for (int n = 0; n <= K; ++n) t[n] = cyc[n % 4] / factorial(n);
  return compose(a, std::span<const double>(t.data(), K + 1));
}

Jet abs(const Jet& a) {
  const double v = a.value();
  if (v > 0.0) return a;
  if (v < 0.0) return -a;
  if (a.order() == 0) return a;
  throw SingularEvaluation("abs is not differentiable at zero", v);
}

}  // namespace tmu
