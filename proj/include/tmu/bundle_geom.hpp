#pragma once

// Tangent-bundle geometry of the Randers spray
//
//   G^i = 1/2 gamma^i_jk y^j y^k + B^i,   B^i = -(alpha/2) |y| F^i_j y^j
//
// with its nonlinear connection N^i_j = dG^i/dy^j, the adapted derivative
// delta_k = d_k - N^m_k d/dy^m, the N-curvature R^i_jk = delta_k N^i_j -
// delta_j N^i_k, the tidal tensor E^i_j = R^i_jk y^k, the curvature and
// Ricci tensor obtained from E by fiber differentiation, and the field
// equation objects built from them.
//
// Jets here use 8 slots: base coordinates x in 0..3, fiber coordinates y in
// 4..7. Fiber derivatives are marked ".j" in comments.

#include <functional>
#include <optional>
#include <vector>

#include "tmu/base_geom.hpp"

namespace tmu {

constexpr int kFiberSlot = 4;

struct BundlePoint {
  Point4 x{};
  Point4 y{};
};

// The spray and everything it is built from, as joint (x, y) jets of the
// requested total order with x-degree capped at xcap. The model's alpha is
// used for B.
class BundleFields {
 public:
  BundleFields(const SpacetimeModel& m, const BundlePoint& p, int order, int xcap);

  const SpacetimeModel& model() const { return *model_; }
  const BundlePoint& point() const { return point_; }
  const JetLayout& layout() const { return *layout_; }
  double alpha() const { return alpha_; }

  Vec4<Jet> x, y;
  Mat4<Jet> g, ginv;
  Rank3<Jet> gamma;
  Mat4<Jet> F, F_mixed;
  Jet norm_sq, norm;
  Vec4<Jet> Fy;  // F^i_j y^j
  Vec4<Jet> B;
  Vec4<Jet> G;

 private:
  const SpacetimeModel* model_;
  BundlePoint point_;
  double alpha_;
  const JetLayout* layout_;
};

// A fiber-dependent field: components as jets over a BundleFields context.
using FiberField = std::function<std::vector<Jet>(const BundleFields&)>;

struct SupportingElement {
  double norm = 0.0;
  Vec4<double> l{};        // l^i
  Vec4<double> l_lower{};  // l_i
};
SupportingElement supporting_element(const SpacetimeModel& m, const BundlePoint& p);

Vec4<double> spray_B(const SpacetimeModel& m, const BundlePoint& p);
Vec4<double> spray(const SpacetimeModel& m, const BundlePoint& p);
Mat4<double> nonlinear_connection(const SpacetimeModel& m, const BundlePoint& p);

struct FiberDerivsB {
  Mat4<double> Bj;    // B^i_j     [i][j]
  Rank3<double> Bjk;  // B^i_jk    [i][j][k]
  Rank4<double> Bjkl; // B^i_jkl   [i][j][k][l]
};
FiberDerivsB fiber_derivs_B(const SpacetimeModel& m, const BundlePoint& p);
// Closed forms for the first two fiber derivatives (Bjkl left zero).
FiberDerivsB fiber_derivs_B_closed_form(const SpacetimeModel& m, const BundlePoint& p);

// G^i_jk = G^i.jk, [i][j][k]
Rank3<double> berwald_coeffs(const SpacetimeModel& m, const BundlePoint& p);

// delta_i of each component of the field; N taken at alpha_ref. The field is
// evaluated on a context of the given order with x-degree cap 1, and must
// return jets with first derivatives in x and y.
std::vector<Vec4<double>> adapted_derivative(const SpacetimeModel& m, const BundlePoint& p,
                                             const FiberField& field, int field_order,
                                             double alpha_ref);

// Jet-level pieces, exposed for composition and tests.
Mat4<Jet> connection_jets(const BundleFields& b);
struct TidalJets {
  Mat4<Jet> N;      // N^i_j
  Rank3<Jet> R;     // R^i_jk
  Mat4<Jet> E;      // E^i_j, order drops by two, x-degree 0
};
TidalJets tidal_jets(const BundleFields& b);

Rank3<double> n_curvature(const SpacetimeModel& m, const BundlePoint& p);
Mat4<double> tidal_tensor(const SpacetimeModel& m, const BundlePoint& p);

struct DCurvature {
  Rank4<double> curvature;  // R_j^i_kl = 1/2 (E^i_k).jl, stored [j][i][k][l]
  Mat4<double> ricci;       // R_jl = -1/2 (E^i_i).jl
  double scalar = 0.0;      // g^jl R_jl
  Mat4<double> contraction; // R_j^i_li, diagnostic
  Mat4<double> tidal;       // E^i_k at the point
};
DCurvature d_curvature(const SpacetimeModel& m, const BundlePoint& p);

// Reference connection used for the divergence term of the scalar
// decomposition, and how B^i_jk is traced.
enum class DivTermVariant {
  kLeviCivitaReference,  // X^i = g^jk B^i_jk, delta from N at alpha = 0 (frozen choice)
  kRandersReference,     // same X, delta from N at the model's alpha
  kTraceFirstIndex,      // X^i = g^ij B^k_jk, delta from N at alpha = 0
};

struct Theorem1Terms {
  double R = 0.0;             // scalar from the spray
  double r = 0.0;             // Levi-Civita scalar
  double div_term = 0.0;
  double quad_term = 0.0;     // -1/2 g^jk (B^i_h B^h_i).jk
  double quad_expected = 0.0; // 3 alpha^2 / 2 F_ij F^ij
  double residual = 0.0;      // R - r - div_term - quad_term
};
Theorem1Terms theorem1_decomposition(
    const SpacetimeModel& m, const BundlePoint& p,
    DivTermVariant variant = DivTermVariant::kLeviCivitaReference);

// -1/2 g^jk (B^i_h B^h_i).jk alone (cheaper context).
double quad_term(const SpacetimeModel& m, const BundlePoint& p);

struct BScalar {
  double value = 0.0;
  Mat4<double> hessian{};
};
// 3/2 B^l B_l / |y|^2 + 1/2 B^i_h B^h_i and its fiber Hessian.
BScalar b_scalar_and_hessian(const SpacetimeModel& m, const BundlePoint& p);

struct GeneralizedEinstein {
  Mat4<double> variational{};  // G_ij - 8 pi (3 alpha^2 / 2) T_ij
  Mat4<double> classical{};    // G_ij - (8 pi k / c^4) T_ij
  Mat4<double> literal{};      // sym(R_jl) - 1/2 Rt g_jl + B.jl, Rt = r + 3 alpha^2/2 F^2
  double variational_vs_classical = 0.0;
  double literal_vs_variational = 0.0;
};
GeneralizedEinstein generalized_einstein(const SpacetimeModel& m, const BundlePoint& p);
// Variational form only (no fiber point needed).
Mat4<double> generalized_einstein_tensor(const SpacetimeModel& m, const Point4& x);
// Upper-index variational tensor as a re-evaluable field, for divergences.
SymmetricField generalized_einstein_field();

}  // namespace tmu
