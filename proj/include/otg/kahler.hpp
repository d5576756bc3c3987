#pragma once

#include "otg/hessian.hpp"

namespace otg {

// Curvature of the Kahler Sasaki metric on TM at a base point. With D flat
// and g Hessian the only nonzero blocks are, in affine coordinates,
//   hh_ijkl = R(du_i,du_j,du_k,du_l) = R(dv_i,dv_j,dv_k,dv_l)   (base Riemann)
//   hv_ijkl = R(du_i,dv_j,du_k,dv_l)
//           = -Psi_ijkl/2 + Psi^{rs}(Psi_iks Psi_jlr + Psi_jks Psi_ilr)/4
//   mixed_ijkl = hv_ijkl - hh_ijkl = -Psi_ijkl/2 + Psi^{rs} Psi_iks Psi_jlr / 2
// (holomorphic-frame components R_{i jbar k lbar}). The fiber coordinate never
// appears, so the curvature is a function of the base point only.
struct KahlerCurvPoint {
    MetricPoint metric;
    Riem4 hh;
    Tensor4 hv;
    Tensor4 mixed;

    int dim() const { return metric.n; }
};

KahlerCurvPoint kahler_curvature(const PotentialSpec& spec, std::span<const double> point);
KahlerCurvPoint kahler_curvature(const MetricPoint& mp);

// Sectional-type curvatures. Sign and scale convention: all four return the
// normalization in which the closed-form example values of the source
// catalog hold, i.e. twice the raw block contraction; in that normalization
// anti_bisectional(xi, eta) equals the MTW tensor / cross-curvature of the
// associated Psi-cost on the nose (no further factor). eta is a covector,
// sharped with the Hessian metric; all outputs are quartic (scale as c^4
// under xi -> c xi, eta -> c eta).
double anti_bisectional(const KahlerCurvPoint& K, const Vec& xi, const Vec& eta);

// anti_bisectional restricted to dual-pairing-orthogonal pairs
// (|eta(xi)| <= 1e-10 |xi| |eta|, Euclidean norms).
double orthogonal_anti_bisectional(const KahlerCurvPoint& K, const Vec& xi, const Vec& eta);

// Holomorphic sectional curvature along xi: the anti-bisectional contraction
// at the pair (xi, eta) with eta_i = xi^i (the Euclidean flat of xi, the
// pairing used by the source's closed-form example). Constant on the
// constant-holomorphic-curvature catalog entries for unit xi.
double holomorphic_sectional(const KahlerCurvPoint& K, const Vec& xi);

// Bisectional-type combination: sectional curvatures added instead of
// subtracted, 2*(hv(xi,eta#,xi,eta#) + hh(eta#,xi,eta#,xi)).
double bisectional(const KahlerCurvPoint& K, const Vec& xi, const Vec& eta);

}  // namespace otg
