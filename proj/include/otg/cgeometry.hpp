#pragma once

#include "otg/hessian.hpp"

namespace otg {

// c-exponential of a Psi-cost: c-exp_x(p) = y with p = -c_x(x,y), computed as
// y = x - from_dual(-p). `guess` seeds the gradient-map inversion; pass the
// sampling-box centre when in doubt.
Vec c_exp(const PotentialSpec& spec, const Vec& x, const Vec& p, const Vec& guess);
Vec c_exp(const PotentialSpec& spec, const Vec& x, const Vec& p);  // guess = sample-box centre

// Momentum covector -c_x(x,y) = -grad Psi(x-y), the inverse of c_exp.
Vec c_momentum(const PotentialSpec& spec, const Vec& x, const Vec& y);

// c-segment from y0 (t=0) to y1 (t=1) relative to x: theta-linear
// interpolation pushed through the c-exponential.
Vec c_segment(const PotentialSpec& spec, const Vec& x, const Vec& y0, const Vec& y1, double t);

enum class ConvexityMode { YRelativeToX, XRelativeToY };

struct ConvexityWitness {
    Vec base;      // the x (or y) the segment is relative to
    Vec end0, end1;
    double t = 0.0;
};

struct ConvexityReport {
    bool holds = false;
    ConvexityMode mode = ConvexityMode::YRelativeToX;
    double worst_violation = 0.0;  // max distance of a segment point outside the set
    ConvexityWitness witness;
    int segments_checked = 0;
};

// Either an ordered polygon boundary (2-D polytope, vertex list) or a bare
// finite point set whose convex hull is the membership region.
struct PointSet {
    std::vector<Vec> points;
    bool polytope = false;
};

// Relative c-convexity check via its dual-geodesic characterization: every
// c-segment between sampled points of Y (relative to each base point of X)
// must stay inside Y, with `resolution` interior samples per segment.
// Membership: 2-D polygon containment for polytopes, LP membership in the
// convex hull for point sets; tolerance 1e-9 on the violation distance.
ConvexityReport check_c_convexity(const PotentialSpec& spec, const std::vector<Vec>& X, const PointSet& Y,
                                  int resolution = 32, ConvexityMode mode = ConvexityMode::YRelativeToX);

// Convex membership utilities (exposed for tests).
// Distance from q to the polygon (0 if inside); vertices in boundary order.
double polygon_violation(const std::vector<Vec>& poly, const Vec& q);
// LP feasibility of q in conv(points); returns an l1 infeasibility gap
// (0 when the point is a convex combination).
double hull_violation(const std::vector<Vec>& points, const Vec& q);

}  // namespace otg
