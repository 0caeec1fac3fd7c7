#pragma once

// Seeded point sampling: base points uniform in a box (inside the chart)
// and timelike fiber vectors from random boosts of an orthonormal frame.

#include <cstdint>
#include <random>
#include <vector>

#include "tmu/bundle_geom.hpp"

namespace tmu {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // Uniform in [0, 1) with 53 random bits; identical on every platform.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

// Orthonormal frame e_0..e_3 (g(e_a, e_b) = diag(1,-1,-1,-1)) from
// Gram-Schmidt on the coordinate basis; needs g_00 > 0.
std::array<Vec4<double>, kDim> orthonormal_frame(const Mat4<double>& g);

struct TimelikeSampling {
  double max_rapidity = 2.0;
  double min_scale = 0.5;
  double max_scale = 2.0;
};

Point4 sample_base_point(const SpacetimeModel& m, const Box4& box, Rng& rng);
Point4 sample_timelike(const SpacetimeModel& m, const Point4& x, Rng& rng, const TimelikeSampling& s = {});

// Box from the override, else the model's own; throws ConfigurationError
// when neither exists.
Box4 sampling_box(const SpacetimeModel& m, const std::optional<Box4>& override_box);

}  // namespace tmu
