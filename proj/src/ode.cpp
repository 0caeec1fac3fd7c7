#include "tmu/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tmu {

void DenseSolution::push(double t, std::vector<double> y, std::vector<double> dydt) {
  if (!t_.empty() && t == t_.back()) return;
  t_.push_back(t);
  y_.push_back(std::move(y));
  f_.push_back(std::move(dydt));
}

std::vector<double> DenseSolution::operator()(double t) const {
  if (t_.empty()) throw UsageError("dense solution is empty");
  if (t < t_.front() || t > t_.back()) throw UsageError("dense solution evaluated outside its range");
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t k = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
  if (k + 1 >= t_.size()) return y_.back();
  const double h = t_[k + 1] - t_[k];
  const double s = (t - t_[k]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  std::vector<double> out(y_[k].size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = h00 * y_[k][i] + h10 * h * f_[k][i] + h01 * y_[k + 1][i] + h11 * h * f_[k + 1][i];
  }
  return out;
}

std::vector<double> linspace(double t0, double t1, int n) {
  if (n < 1) throw UsageError("linspace needs at least one interval");
  std::vector<double> t(n + 1);
  for (int i = 0; i <= n; ++i) t[i] = t0 + (t1 - t0) * i / n;
  t[n] = t1;
  return t;
}

namespace {

// Dormand-Prince tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

double err_norm(const std::vector<double>& e, const std::vector<double>& y0, const std::vector<double>& y1,
                const OdeOptions& o) {
  double s = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double sc = o.atol + o.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = e[i] / sc;
    s += r * r;
  }
  return std::sqrt(s / static_cast<double>(e.size()));
}

}  // namespace

OdeResult integrate_ode(const OdeRhs& f, double t0, std::vector<double> y0,
                        const std::vector<double>& samples, const OdeOptions& opt, const OdeCheck& check) {
  if (samples.empty()) throw UsageError("no sample times requested");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i] < t0 || (i > 0 && samples[i] <= samples[i - 1])) {
      throw UsageError("sample times must be increasing and start at or after t0");
    }
  }
  if (!(opt.rtol > 0) || !(opt.atol > 0)) throw UsageError("tolerances must be positive");
  const std::size_t n = y0.size();
  OdeResult res;
  double t = t0;
  std::vector<double> y = std::move(y0), k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y1(n), e(n);
  f(t, y, k1);
  if (check) check(t, y);
  res.dense.push(t, y, k1);
  std::size_t next = 0;
  if (samples[0] == t0) {
    res.t.push_back(t);
    res.y.push_back(y);
    ++next;
  }
  const double t_final = samples.back();

  double h = opt.initial_step;
  if (h <= 0.0 && t_final > t) {
    // Hairer's starting step heuristic
    double d0 = 0, d1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = opt.atol + opt.rtol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1 += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / n);
    d1 = std::sqrt(d1 / n);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, t_final - t);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h0 * k1[i];
    f(t + h0, tmp, k2);
    double d2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = opt.atol + opt.rtol * std::abs(y[i]);
      d2 += ((k2[i] - k1[i]) / sc) * ((k2[i] - k1[i]) / sc);
    }
    d2 = std::sqrt(d2 / n) / h0;
    const double m = std::max(d1, d2);
    const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
    h = std::min(100 * h0, h1);
  }
  if (opt.max_step > 0) h = std::min(h, opt.max_step);

  while (next < samples.size()) {
    if (res.accepted + res.rejected >= opt.max_steps) throw Error("integrator exceeded its step budget");
    const double target = samples[next];
    bool lands = false;
    double hs = h;
    if (t + hs >= target) {
      hs = target - t;
      lands = true;
    }
    if (hs <= 16 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
      if (lands) {
        // Sample coincides with t up to round-off.
        res.t.push_back(target);
        res.y.push_back(y);
        ++next;
        continue;
      }
      std::ostringstream os;
      os << "step size underflow at t = " << t;
      throw StepUnderflow(os.str(), hs);
    }
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * a21 * k1[i];
    f(t + c2 * hs, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * hs, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * hs, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(t + c5 * hs, tmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(t + hs, tmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      y1[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    const double t1 = lands ? target : t + hs;
    f(t1, y1, k7);
    for (std::size_t i = 0; i < n; ++i)
      e[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    const double err = err_norm(e, y, y1, opt);
    if (!std::isfinite(err)) {
      ++res.rejected;
      h = hs * 0.2;
      continue;
    }
    const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    if (err <= 1.0) {
      ++res.accepted;
      t = t1;
      y.swap(y1);
      k1.swap(k7);  // FSAL
      if (check) check(t, y);
      res.dense.push(t, y, k1);
      if (lands) {
        res.t.push_back(t);
        res.y.push_back(y);
        ++next;
        // Keep the unclipped step as the proposal.
        h = std::max(h, hs) * (hs < h ? 1.0 : fac);
      } else {
        h = hs * fac;
      }
      if (opt.max_step > 0) h = std::min(h, opt.max_step);
    } else {
      ++res.rejected;
      h = hs * std::max(0.2, fac);
    }
  }
  return res;
}

}  // namespace tmu
