#pragma once

// Charged test-particle worldlines as autoparallels of the Randers spray,
// the worldline-deviation equation, and brute-force oracles for both.

#include <iosfwd>
#include <optional>
#include <vector>

#include "tmu/bundle_geom.hpp"
#include "tmu/ode.hpp"

namespace tmu {

struct WorldlineState {
  double t = 0.0;
  Point4 x{};
  Point4 y{};
};

struct DeviationState {
  Point4 w{};
  Point4 W{};  // covariant rate Dw/dt
};

// sqrt(g(y,y)) + alpha A_i y^i
double randers_lagrangian(const SpacetimeModel& m, const Point4& x, const Point4& y, double alpha);
// dy/dt = -gamma^i_jk y^j y^k + alpha |y| F^i_j y^j
Vec4<double> worldline_rhs(const SpacetimeModel& m, const Point4& x, const Point4& y, double alpha);

struct WorldlineOptions {
  OdeOptions ode{};
  bool normalize = true;     // rescale y0 to g(y0,y0) = 1
  double null_guard = 1e-6;  // abort when g(y,y) drops below this
  int samples = 100;         // equal intervals on [t0, t_end]
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Point4> x, y;
  DenseSolution dense;  // state (x, y) as 8 components
  long steps = 0;
  double max_norm_drift = 0.0;  // max |g(y,y) - g(y0,y0)| over samples
};

Trajectory integrate_worldline(const SpacetimeModel& m, WorldlineState init, double alpha, double t_end,
                               const WorldlineOptions& opt = {});

struct ClassicalComparison {
  Trajectory randers;
  Trajectory classical;
  double max_deviation = 0.0;  // max over samples and components of x and y
};
// Classical Lorentz force with q/m = alpha against the Randers worldline,
// both from the unit-normalized initial state.
ClassicalComparison compare_classical(const SpacetimeModel& m, WorldlineState init, double alpha,
                                      double t_end, const WorldlineOptions& opt = {});

// Initial rate for the deviation: either W = Dw/dt or the coordinate rate
// dw/dt; they are related by W = dw/dt + N w.
enum class DeviationRate { kCovariant, kCoordinate };

struct DeviationTrajectory {
  Trajectory base;
  std::vector<Point4> w, W;
};

// Integrates the worldline jointly with
//   dw/dt = W - N w,   dW/dt = E w - N W
// where N and E are taken at the current (x, y).
DeviationTrajectory integrate_deviation(const SpacetimeModel& m, WorldlineState init, double alpha,
                                        const Point4& w0, const Point4& rate0, double t_end,
                                        DeviationRate rate_kind = DeviationRate::kCovariant,
                                        const WorldlineOptions& opt = {});

struct NeighborResult {
  double epsilon = 0.0;
  std::vector<double> t;
  std::vector<double> error;  // |(x_eps - x)/eps - w|_inf at each sample
  double max_error = 0.0;
};
// Integrates a neighbouring worldline starting at x0 + eps w0 with
// y0 + eps (W0 - N w0) and compares its displacement with the deviation.
// Normalization is applied once to y0 and then switched off for both curves.
NeighborResult neighbor_oracle(const SpacetimeModel& m, WorldlineState init, double alpha,
                               const Point4& w0, const Point4& W0, double eps, double t_end,
                               const WorldlineOptions& opt = {});

void write_trajectory_csv(std::ostream& os, const Trajectory& tr);
void write_deviation_csv(std::ostream& os, const DeviationTrajectory& tr);

}  // namespace tmu
