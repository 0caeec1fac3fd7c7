#pragma once

// Adaptive Dormand-Prince 5(4) integrator with cubic Hermite dense output.

#include <functional>
#include <vector>

#include "tmu/error.hpp"

namespace tmu {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  double initial_step = 0.0;  // 0 picks one automatically
  double max_step = 0.0;      // 0 means unbounded
  long max_steps = 5'000'000;
};

using OdeRhs = std::function<void(double t, const std::vector<double>& y, std::vector<double>& dydt)>;
// Called on every accepted state; throw to abort (e.g. chart exit).
using OdeCheck = std::function<void(double t, const std::vector<double>& y)>;

class StepUnderflow : public SingularEvaluation {
 public:
  StepUnderflow(const std::string& what, double step) : SingularEvaluation(what, step) {}
};

class DenseSolution {
 public:
  void push(double t, std::vector<double> y, std::vector<double> dydt);
  std::vector<double> operator()(double t) const;
  double t_begin() const { return t_.empty() ? 0.0 : t_.front(); }
  double t_end() const { return t_.empty() ? 0.0 : t_.back(); }
  std::size_t knots() const { return t_.size(); }

 private:
  std::vector<double> t_;
  std::vector<std::vector<double>> y_, f_;
};

struct OdeResult {
  std::vector<double> t;               // sample times actually reached
  std::vector<std::vector<double>> y;  // states at those times
  DenseSolution dense;
  long accepted = 0;
  long rejected = 0;
};

// Integrates from t0 to the last sample time. Samples must be increasing and
// >= t0; steps are clipped to land exactly on each sample.
OdeResult integrate_ode(const OdeRhs& f, double t0, std::vector<double> y0,
                        const std::vector<double>& samples, const OdeOptions& opt = {},
                        const OdeCheck& check = {});

// n + 1 equally spaced times on [t0, t1].
std::vector<double> linspace(double t0, double t1, int n);

}  // namespace tmu
