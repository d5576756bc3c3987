#include "otg/cgeometry.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace otg {

namespace {

Vec box_centre(const PotentialSpec& spec) {
    Vec c(spec.n);
    for (int i = 0; i < spec.n; ++i) c(i) = 0.5 * (spec.sample_box[i].first + spec.sample_box[i].second);
    return c;
}

}  // namespace

Vec c_momentum(const PotentialSpec& spec, const Vec& x, const Vec& y) {
    const Vec z = x - y;
    return -to_dual(spec, std::span<const double>(z.data(), spec.n));
}

Vec c_exp(const PotentialSpec& spec, const Vec& x, const Vec& p, const Vec& guess) {
    return x - from_dual(spec, -p, guess);
}

Vec c_exp(const PotentialSpec& spec, const Vec& x, const Vec& p) { return c_exp(spec, x, p, box_centre(spec)); }

Vec c_segment(const PotentialSpec& spec, const Vec& x, const Vec& y0, const Vec& y1, double t) {
    // theta(x - y(t)) moves on the straight segment between theta(x-y0) and
    // theta(x-y1); equivalently y(t) = x - dual_geodesic(x-y0, x-y1, t).
    return x - dual_geodesic(spec, x - y0, x - y1, t);
}

// ---------------------------------------------------------------------------
// Membership tests
// ---------------------------------------------------------------------------

double polygon_violation(const std::vector<Vec>& poly, const Vec& q) {
    const std::size_t m = poly.size();
    if (m < 3) throw DimensionError("polygon needs at least 3 vertices");
    // crossing-number parity for containment
    int crossings = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const Vec& a = poly[i];
        const Vec& b = poly[(i + 1) % m];
        const bool up = a(1) <= q(1) && b(1) > q(1);
        const bool down = b(1) <= q(1) && a(1) > q(1);
        if (up || down) {
            const double t = (q(1) - a(1)) / (b(1) - a(1));
            if (q(0) < a(0) + t * (b(0) - a(0))) ++crossings;
        }
    }
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
        const Vec& a = poly[i];
        const Vec& b = poly[(i + 1) % m];
        const Vec ab = b - a;
        const double len2 = ab.squaredNorm();
        double t = len2 > 0 ? (q - a).dot(ab) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        dist = std::min(dist, (q - (a + t * ab)).norm());
    }
    if (crossings % 2 == 1) return 0.0;  // inside
    return dist;
}

namespace {

// Dense phase-1 simplex with Bland's rule: minimize sum of artificials in
// { A lam = b, lam >= 0 }. Returns the optimal artificial mass (0 = feasible).
double phase1_simplex(const Mat& A, const Vec& b) {
    const int rows = static_cast<int>(A.rows());
    const int cols = static_cast<int>(A.cols());
    Mat T(rows, cols + rows);  // [A | I] with rows sign-flipped so b >= 0
    Vec rhs = b;
    T.leftCols(cols) = A;
    T.rightCols(rows) = Mat::Identity(rows, rows);
    for (int r = 0; r < rows; ++r)
        if (rhs(r) < 0.0) {
            T.row(r).head(cols) *= -1.0;
            rhs(r) *= -1.0;
        }
    std::vector<int> basis(rows);
    for (int r = 0; r < rows; ++r) basis[r] = cols + r;

    // reduced costs for objective = sum of artificial variables
    Vec cost = Vec::Zero(cols + rows);
    cost.tail(rows).setOnes();

    const int max_iters = 50 * (rows + cols) + 1000;
    for (int iter = 0; iter < max_iters; ++iter) {
        // simplex multipliers y = c_B B^{-T}: maintain via direct solve (sizes are small)
        Mat B(rows, rows);
        for (int r = 0; r < rows; ++r) B.col(r) = T.col(basis[r]);
        Eigen::PartialPivLU<Mat> lu(B);
        Vec cb(rows);
        for (int r = 0; r < rows; ++r) cb(r) = cost(basis[r]);
        const Vec y = lu.transpose().solve(cb);
        int enter = -1;
        for (int j = 0; j < cols + rows; ++j) {
            const double rc = cost(j) - y.dot(T.col(j));
            if (rc < -1e-11) {  // Bland: lowest index
                enter = j;
                break;
            }
        }
        if (enter < 0) {
            const Vec xb = lu.solve(rhs);
            double art = 0.0;
            for (int r = 0; r < rows; ++r)
                if (basis[r] >= cols) art += std::max(0.0, xb(r));
            return art;
        }
        const Vec d = lu.solve(T.col(enter));
        const Vec xb = lu.solve(rhs);
        int leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int r = 0; r < rows; ++r) {
            if (d(r) > 1e-12) {
                const double ratio = xb(r) / d(r);
                if (ratio < best_ratio - 1e-15 ||
                    (ratio < best_ratio + 1e-15 && (leave < 0 || basis[r] < basis[leave]))) {
                    best_ratio = ratio;
                    leave = r;
                }
            }
        }
        if (leave < 0) return 0.0;  // unbounded cannot happen in phase 1
        basis[leave] = enter;
    }
    return std::numeric_limits<double>::infinity();  // stalled; treat as infeasible
}

}  // namespace

double hull_violation(const std::vector<Vec>& points, const Vec& q) {
    if (points.empty()) throw DimensionError("hull membership needs points");
    const int d = static_cast<int>(q.size());
    const int m = static_cast<int>(points.size());
    Mat A(d + 1, m);
    for (int j = 0; j < m; ++j) {
        A.col(j).head(d) = points[j];
        A(d, j) = 1.0;
    }
    Vec b(d + 1);
    b.head(d) = q;
    b(d) = 1.0;
    return phase1_simplex(A, b);
}

// ---------------------------------------------------------------------------
// Relative c-convexity
// ---------------------------------------------------------------------------

ConvexityReport check_c_convexity(const PotentialSpec& spec, const std::vector<Vec>& X, const PointSet& Y,
                                  int resolution, ConvexityMode mode) {
    if (resolution < 2) throw DimensionError("resolution must be >= 2");
    ConvexityReport rep;
    rep.mode = mode;

    // Roles: in the default mode, segments run between points of Y relative
    // to each base x in X and must stay inside Y; the symmetric mode swaps the
    // roles. Proposition-level equivalence: the set is relatively c-convex iff
    // its theta-image is convex, and c-segments are straight chords in theta.
    //
    // Polytope targets (2-D, ordered boundary): work entirely in theta-space.
    // The region is the polygon traced by the theta-image of a dense boundary
    // sampling; chords between vertex theta-images must stay inside it. Exact
    // for genuinely c-convex sets, since region boundary and chords are then
    // polygons in the same space.
    //
    // Point-set targets: c-segment preimages (gradient-map inversion of the
    // theta-chords) must stay inside the convex hull of the sampled set, via
    // LP membership.
    const bool y_mode = (mode == ConvexityMode::YRelativeToX);
    const std::vector<Vec>& bases = y_mode ? X : Y.points;
    const std::vector<Vec>& ends = y_mode ? Y.points : X;
    const bool poly_mode = y_mode && Y.polytope;
    if (poly_mode && spec.n != 2) throw DimensionError("polytope membership is implemented for 2-D only");

    // pre: every difference point must be in the potential's domain
    for (const Vec& x : X)
        for (const Vec& y : Y.points) {
            const Vec z = x - y;
            const InDomainResult r = in_domain(spec, std::span<const double>(z.data(), spec.n));
            if (!r.ok) {
                std::ostringstream os;
                os << "c-convexity: difference of (" << x.transpose() << ") and (" << y.transpose()
                   << ") leaves the domain (" << r.reason << ")";
                throw OutOfDomainError(os.str());
            }
        }

    auto theta_of = [&](const Vec& base, const Vec& end) {
        const Vec z = y_mode ? Vec(base - end) : Vec(end - base);
        return to_dual(spec, std::span<const double>(z.data(), spec.n));
    };

    for (const Vec& base : bases) {
        std::vector<Vec> region_poly;
        if (poly_mode) {
            // theta-image of the dense boundary sampling (resolution per edge)
            const std::size_t m = Y.points.size();
            for (std::size_t e = 0; e < m; ++e)
                for (int s = 0; s < resolution; ++s) {
                    const double t = static_cast<double>(s) / resolution;
                    const Vec y = (1.0 - t) * Y.points[e] + t * Y.points[(e + 1) % m];
                    region_poly.push_back(theta_of(base, y));
                }
        }
        for (std::size_t i = 0; i < ends.size(); ++i) {
            for (std::size_t j = i + 1; j < ends.size(); ++j) {
                const Vec& e0 = ends[i];
                const Vec& e1 = ends[j];
                ++rep.segments_checked;
                const Vec th0 = theta_of(base, e0);
                const Vec th1 = theta_of(base, e1);
                for (int k = 1; k < resolution; ++k) {
                    const double t = static_cast<double>(k) / resolution;
                    double viol;
                    if (poly_mode) {
                        viol = polygon_violation(region_poly, Vec((1.0 - t) * th0 + t * th1));
                    } else {
                        // pull the theta-chord back through the gradient map
                        Vec pt;
                        if (y_mode) {
                            pt = c_segment(spec, base, e0, e1, t);
                        } else {
                            pt = base + dual_geodesic(spec, e0 - base, e1 - base, t);
                        }
                        viol = hull_violation(ends, pt);
                    }
                    if (viol > rep.worst_violation) {
                        rep.worst_violation = viol;
                        rep.witness = {base, e0, e1, t};
                    }
                }
            }
        }
    }
    rep.holds = rep.worst_violation <= 1e-9;
    return rep;
}

}  // namespace otg
