#pragma once

// Classical geometry on spacetime: Levi-Civita connection, curvature,
// Faraday tensor, Maxwell residuals, electromagnetic stress-energy and the
// Einstein-Maxwell combination.
//
// Curvature conventions (fixed here and used everywhere):
//   gamma^i_jk = 1/2 g^ih (d_k g_hj + d_j g_hk - d_h g_jk)
//   r^i_{jkl}  = d_k gamma^i_jl - d_l gamma^i_jk
//                + gamma^i_mk gamma^m_jl - gamma^i_ml gamma^m_jk
//   r_jl       = r^i_{jil}
//   r          = g^jl r_jl
// With signature (+,-,-,-) this makes Reissner-Nordstrom satisfy
// G_ij = 8 pi T_ij with the stress-energy below. The weak-field metric with
// phi = -M/r has r < 0 in this convention.
//
// Electromagnetism: F_ij = d_i A_j - d_j A_i, F^i_j = g^ih F_hj,
//   T_ij = 1/(4 pi) (-F_il g^lm F_jm + 1/4 g_ij F_lm F^lm)   (Landau sign)
//   J^i  = -(c / 4 pi) (1/sqrt(-g)) d_j (sqrt(-g) F^ij)

#include <functional>

#include "tmu/spacetime.hpp"
#include "tmu/tensor.hpp"

namespace tmu {

enum class StressEnergySign { kLandau, kFlipped };

// Jet-level building blocks. Inputs are jets whose slots 0..3 are the base
// coordinates; each derivative lowers the order by one.
Rank3<Jet> christoffel_jets(const Mat4<Jet>& g, const Mat4<Jet>& ginv);
Rank4<Jet> riemann_jets(const Rank3<Jet>& gamma);
Mat4<Jet> ricci_jets(const Rank4<Jet>& riemann);
Mat4<Jet> faraday_jets(const Vec4<Jet>& A);
Mat4<Jet> raise_first(const Mat4<Jet>& ginv, const Mat4<Jet>& t);
Mat4<Jet> stress_energy_jets(const Mat4<Jet>& g, const Mat4<Jet>& ginv, const Mat4<Jet>& F,
                             StressEnergySign sign = StressEnergySign::kLandau);

// All classical fields at one point, from metric and potential jets of the
// given order. Members needing more derivatives than available stay empty.
struct BaseGeometry {
  int order = 0;
  Mat4<Jet> g, ginv;  // order
  Vec4<Jet> A;        // order
  Rank3<Jet> gamma;   // order - 1
  Mat4<Jet> F;        // F_ij, order - 1
  Mat4<Jet> F_mixed;  // F^i_j, order - 1
  Rank4<Jet> riemann; // order - 2
  Mat4<Jet> ricci;    // order - 2
  Jet scalar;         // order - 2

  static BaseGeometry compute(const SpacetimeModel& m, const Point4& x, int order,
                              bool curvature = true);
};

Rank3<double> christoffel(const SpacetimeModel& m, const Point4& x);
Rank4<double> riemann(const SpacetimeModel& m, const Point4& x);
Mat4<double> ricci(const SpacetimeModel& m, const Point4& x);
double ricci_scalar(const SpacetimeModel& m, const Point4& x);
// r_{ijkl} = g_im r^m_{jkl}
Rank4<double> riemann_lowered(const SpacetimeModel& m, const Point4& x);

struct Faraday {
  Mat4<double> lower;  // F_ij
  Mat4<double> mixed;  // F^i_j
};
Faraday faraday(const SpacetimeModel& m, const Point4& x);
// F_ij F^ij
double faraday_square(const SpacetimeModel& m, const Point4& x);

struct MaxwellResiduals {
  Rank3<double> homogeneous;  // cyclic sum of covariant derivatives of F
  Vec4<double> current;       // J^i
};
MaxwellResiduals maxwell_residuals(const SpacetimeModel& m, const Point4& x);

Mat4<double> em_stress_energy(const SpacetimeModel& m, const Point4& x,
                              StressEnergySign sign = StressEnergySign::kLandau);
Mat4<double> einstein_tensor(const SpacetimeModel& m, const Point4& x);
// G_ij - (8 pi k / c^4) T_ij
Mat4<double> classical_einstein_maxwell(const SpacetimeModel& m, const Point4& x,
                                        StressEnergySign sign = StressEnergySign::kLandau);

// A symmetric (2,0) tensor field that can be re-evaluated as jets of any
// order in the base layout (order, 4).
using SymmetricField =
    std::function<Mat4<Jet>(const SpacetimeModel& m, const Point4& x, int order)>;

SymmetricField inverse_metric_field();
SymmetricField einstein_field();
SymmetricField stress_energy_field(StressEnergySign sign = StressEnergySign::kLandau);
SymmetricField einstein_maxwell_field(StressEnergySign sign = StressEnergySign::kLandau);

// nabla_j S^ij
Vec4<double> covariant_divergence(const SpacetimeModel& m, const Point4& x,
                                  const SymmetricField& field);

// a^i = -gamma^i_jk y^j y^k + q_over_m F^i_j y^j (unit-speed parametrisation)
Vec4<double> classical_lorentz_rhs(const SpacetimeModel& m, const Point4& x, const Point4& y,
                                   double q_over_m);

}  // namespace tmu
