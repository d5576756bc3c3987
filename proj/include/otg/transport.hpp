#pragma once

#include <cstdint>

#include "otg/mtw.hpp"

namespace otg {

struct DiscreteMeasure {
    std::vector<Vec> points;
    std::vector<double> masses;

    int size() const { return static_cast<int>(points.size()); }
    int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
    // masses positive, summing to 1 within 1e-12; points pairwise distinct
    void validate() const;
};

DiscreteMeasure uniform_measure(std::vector<Vec> points);

struct PotentialPair {
    std::vector<double> u, v;  // gauge: u[0] = 0
};

struct TransportPlan {
    int rows = 0, cols = 0;
    Mat coupling;
    double cost = 0.0;
    std::string method;
    int iterations = 0;  // sinkhorn only

    double marginal_violation(const std::vector<double>& mu, const std::vector<double>& nu) const;
};

struct TransportMap {
    std::vector<int> assignment;  // row -> argmax column, ties to lowest index
    bool deterministic = false;
    double leakage = 0.0;  // max off-assignment row mass as a fraction of row mass
};

// C_ij = c(x_i, y_j); throws naming the offending pair on a domain violation.
Mat cost_matrix(const CostSpec& cost, const std::vector<Vec>& X, const std::vector<Vec>& Y);

// Optimal basic solution of the transportation LP by the transportation
// simplex (MODI) with lowest-index tie-breaking; deterministic. Optimality is
// witnessed by the attached dual pair (complementary slackness).
TransportPlan solve_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const Mat& C);
TransportPlan solve_exact(const std::vector<double>& mu, const std::vector<double>& nu, const Mat& C);

// Entropic regularization with epsilon-annealing (factor 1/2 per stage from
// eps0 = max|C|), log-domain updates, exact marginal rounding at exit.
TransportPlan solve_sinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const Mat& C, double epsilon,
                             int max_iters = 20000);
TransportPlan solve_sinkhorn(const std::vector<double>& mu, const std::vector<double>& nu, const Mat& C,
                             double epsilon, int max_iters = 20000);

TransportMap extract_map(const TransportPlan& plan, double tol = 1e-9);

// Kantorovich potentials for an optimal plan, recovered from the LP dual of a
// fresh solve and verified tight on the given plan's support (1e-9); throws
// on slackness failure (non-optimal plan).
PotentialPair dual_potentials(const Mat& C, const TransportPlan& plan,
                              const std::vector<double>& mu, const std::vector<double>& nu);

struct CyclicalMonotonicityReport {
    int trials = 0;
    int violations = 0;
    double worst_margin = 0.0;  // max over cycles of (cycle cost - shifted cost); > 1e-10 counts
    std::vector<std::pair<int, int>> worst_cycle;
};

// Samples random cycles of length <= k from the plan support and compares the
// assigned cost against every cyclic shift.
CyclicalMonotonicityReport cyclical_monotonicity(const TransportPlan& plan, const Mat& C, int k, int trials,
                                                 std::uint64_t seed);

// Displacement interpolation of the displayed formula T(t) = t*Id + (1-t)*T.
// flip_t swaps the roles (the source text's alternative convention).
std::vector<Vec> displacement(const std::vector<Vec>& sources, const std::vector<Vec>& images, double t,
                              bool flip_t = false);

// Simplex / natural-parameter dictionary: weights p_i = e^{x_i}/(1+sum e^{x_j})
// with p_n the remainder; natural x_i = log(p_i/p_n).
Vec simplex_to_weights(const Vec& natural);
Vec weights_to_natural(const Vec& weights);
// all weights > delta (the uniform-probability condition)
bool uniform_probability(const std::vector<Vec>& weights, double delta, double* min_weight = nullptr);

}  // namespace otg
