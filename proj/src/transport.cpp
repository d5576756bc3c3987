#include "otg/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace otg {

void DiscreteMeasure::validate() const {
    if (points.empty() || points.size() != masses.size()) throw DimensionError("measure: empty or mismatched sizes");
    double total = 0.0;
    for (double m : masses) {
        if (!(m > 0.0)) throw Error("measure: masses must be positive");
        total += m;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw Error("measure: masses must sum to 1 (got " + std::to_string(total) + ")");
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if ((points[i] - points[j]).lpNorm<Eigen::Infinity>() == 0.0)
                throw Error("measure: points must be pairwise distinct");
}

DiscreteMeasure uniform_measure(std::vector<Vec> points) {
    DiscreteMeasure m;
    const double w = 1.0 / static_cast<double>(points.size());
    m.masses.assign(points.size(), w);
    m.points = std::move(points);
    return m;
}

double TransportPlan::marginal_violation(const std::vector<double>& mu, const std::vector<double>& nu) const {
    double worst = 0.0;
    for (int i = 0; i < rows; ++i) worst = std::max(worst, std::abs(coupling.row(i).sum() - mu[i]));
    for (int j = 0; j < cols; ++j) worst = std::max(worst, std::abs(coupling.col(j).sum() - nu[j]));
    return worst;
}

Mat cost_matrix(const CostSpec& cost, const std::vector<Vec>& X, const std::vector<Vec>& Y) {
    Mat C(X.size(), Y.size());
    for (std::size_t i = 0; i < X.size(); ++i)
        for (std::size_t j = 0; j < Y.size(); ++j) {
            try {
                C(i, j) = cost_value(cost, std::span<const double>(X[i].data(), X[i].size()),
                                     std::span<const double>(Y[j].data(), Y[j].size()));
            } catch (const Error& e) {
                std::ostringstream os;
                os << "cost domain violation at pair (" << i << ", " << j << "): " << e.what();
                throw OutOfDomainError(os.str());
            }
            if (!std::isfinite(C(i, j))) {
                std::ostringstream os;
                os << "cost not finite at pair (" << i << ", " << j << ")";
                throw OutOfDomainError(os.str());
            }
        }
    return C;
}

// ---------------------------------------------------------------------------
// Transportation simplex
// ---------------------------------------------------------------------------

namespace {

// Spanning-tree based MODI method. Basis arcs are kept in a boolean matrix;
// the tree is rebuilt per pivot via adjacency lists (sizes are desk-scale).
class TransportSimplex {
  public:
    TransportSimplex(const std::vector<double>& a, const std::vector<double>& b, const Mat& C)
        : m_(static_cast<int>(a.size())), n_(static_cast<int>(b.size())), a_(a), b_(b), C_(C) {
        flow_ = Mat::Zero(m_, n_);
        basic_ = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(m_, n_, false);
        northwest_corner();
    }

    void solve() {
        const int max_pivots = 2000 * (m_ + n_) + 20000;
        int stalled = 0;
        bool bland = false;
        double last_cost = objective();
        for (int it = 0; it < max_pivots; ++it) {
            compute_potentials();
            int ei = -1, ej = -1;
            double best = -1e-11;
            if (!bland) {
                for (int i = 0; i < m_; ++i)
                    for (int j = 0; j < n_; ++j) {
                        if (basic_(i, j)) continue;
                        const double rc = C_(i, j) - u_[i] - v_[j];
                        if (rc < best) {
                            best = rc;
                            ei = i;
                            ej = j;
                        }
                    }
            } else {
                for (int i = 0; i < m_ && ei < 0; ++i)
                    for (int j = 0; j < n_; ++j) {
                        if (basic_(i, j)) continue;
                        if (C_(i, j) - u_[i] - v_[j] < -1e-11) {
                            ei = i;
                            ej = j;
                            break;
                        }
                    }
            }
            if (ei < 0) return;  // optimal
            pivot(ei, ej);
            const double cost = objective();
            if (cost >= last_cost - 1e-15) {
                if (++stalled > 10 * (m_ + n_)) bland = true;  // degeneracy guard
            } else {
                stalled = 0;
            }
            last_cost = cost;
        }
        throw ConvergenceError("transportation simplex exceeded pivot budget", objective());
    }

    Mat flow() const { return flow_; }
    const std::vector<double>& dual_u() const { return u_; }
    const std::vector<double>& dual_v() const { return v_; }
    double objective() const { return (flow_.array() * C_.array()).sum(); }

  private:
    void northwest_corner() {
        std::vector<double> ra = a_, rb = b_;
        int i = 0, j = 0;
        while (i < m_ && j < n_) {
            const double f = std::min(ra[i], rb[j]);
            flow_(i, j) = f;
            basic_(i, j) = true;
            ra[i] -= f;
            rb[j] -= f;
            if (i == m_ - 1 && j == n_ - 1) break;
            // on ties advance the row only, keeping a zero-flow basic arc so
            // the basis stays a spanning tree (m+n-1 arcs)
            if (ra[i] <= rb[j] && i < m_ - 1)
                ++i;
            else if (j < n_ - 1)
                ++j;
            else
                ++i;
        }
    }

    void compute_potentials() {
        u_.assign(m_, 0.0);
        v_.assign(n_, 0.0);
        std::vector<bool> seen(m_ + n_, false);
        std::vector<int> stack{0};
        seen[0] = true;  // u_0 = 0 gauge
        // adjacency over basic arcs
        while (!stack.empty()) {
            const int node = stack.back();
            stack.pop_back();
            if (node < m_) {
                for (int j = 0; j < n_; ++j)
                    if (basic_(node, j) && !seen[m_ + j]) {
                        v_[j] = C_(node, j) - u_[node];
                        seen[m_ + j] = true;
                        stack.push_back(m_ + j);
                    }
            } else {
                const int j = node - m_;
                for (int i = 0; i < m_; ++i)
                    if (basic_(i, j) && !seen[i]) {
                        u_[i] = C_(i, j) - v_[j];
                        seen[i] = true;
                        stack.push_back(i);
                    }
            }
        }
    }

    // Find the unique cycle created by the entering arc and shift flow.
    void pivot(int ei, int ej) {
        // path from source ei to sink ej through basic arcs (tree path)
        std::vector<int> parent(m_ + n_, -2);
        std::vector<int> stack{ei};
        parent[ei] = -1;
        while (!stack.empty()) {
            const int node = stack.back();
            stack.pop_back();
            if (node == m_ + ej) break;
            if (node < m_) {
                for (int j = 0; j < n_; ++j)
                    if (basic_(node, j) && parent[m_ + j] == -2) {
                        parent[m_ + j] = node;
                        stack.push_back(m_ + j);
                    }
            } else {
                const int jj = node - m_;
                for (int i = 0; i < m_; ++i)
                    if (basic_(i, jj) && parent[i] == -2) {
                        parent[i] = node;
                        stack.push_back(i);
                    }
            }
        }
        if (parent[m_ + ej] == -2) throw Error("transport simplex: basis is not a spanning tree");
        // reconstruct path ei -> ... -> m_+ej, then close with (ei, ej)
        std::vector<int> path;
        for (int node = m_ + ej; node != -1; node = parent[node]) path.push_back(node);
        std::reverse(path.begin(), path.end());  // starts at ei, ends at m_+ej

        // Alternate signs along the cycle. Arcs on the path: (path[k], path[k+1]);
        // the entering arc (ei, ej) gets +, so the first path arc gets -, etc.
        struct CycleArc {
            int i, j;
            bool plus;
        };
        std::vector<CycleArc> cycle;
        for (std::size_t k = 0; k + 1 < path.size(); ++k) {
            const int aNode = path[k], bNode = path[k + 1];
            const int i = (aNode < m_) ? aNode : bNode;
            const int j = (aNode < m_) ? bNode - m_ : aNode - m_;
            cycle.push_back({i, j, (k % 2) == 1});
        }
        double theta = std::numeric_limits<double>::infinity();
        int leave_i = -1, leave_j = -1;
        for (const auto& arc : cycle) {
            if (!arc.plus) {
                const double f = flow_(arc.i, arc.j);
                if (f < theta - 1e-15 ||
                    (f < theta + 1e-15 &&
                     (leave_i < 0 || arc.i < leave_i || (arc.i == leave_i && arc.j < leave_j)))) {
                    theta = f;
                    leave_i = arc.i;
                    leave_j = arc.j;
                }
            }
        }
        if (leave_i < 0) throw Error("transport simplex: no leaving arc");
        flow_(ei, ej) += theta;
        for (const auto& arc : cycle) flow_(arc.i, arc.j) += arc.plus ? theta : -theta;
        flow_(leave_i, leave_j) = 0.0;  // exact zero for the leaving arc
        basic_(ei, ej) = true;
        basic_(leave_i, leave_j) = false;
    }

    int m_, n_;
    std::vector<double> a_, b_;
    Mat C_;
    Mat flow_;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> basic_;
    std::vector<double> u_, v_;
};

void check_masses(const std::vector<double>& mu, const std::vector<double>& nu) {
    const double sa = std::accumulate(mu.begin(), mu.end(), 0.0);
    const double sb = std::accumulate(nu.begin(), nu.end(), 0.0);
    if (std::abs(sa - sb) > 1e-9)
        throw Error("infeasible masses: supplies sum to " + std::to_string(sa) + ", demands to " +
                    std::to_string(sb));
}

}  // namespace

TransportPlan solve_exact(const std::vector<double>& mu, const std::vector<double>& nu, const Mat& C) {
    if (static_cast<int>(mu.size()) != C.rows() || static_cast<int>(nu.size()) != C.cols())
        throw DimensionError("solve_exact: size mismatch");
    if (!C.allFinite()) throw Error("solve_exact: cost matrix must be finite");
    check_masses(mu, nu);
    TransportSimplex simplex(mu, nu, C);
    simplex.solve();
    TransportPlan plan;
    plan.rows = C.rows();
    plan.cols = C.cols();
    plan.coupling = simplex.flow();
    plan.cost = simplex.objective();
    plan.method = "exact";
    return plan;
}

TransportPlan solve_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const Mat& C) {
    mu.validate();
    nu.validate();
    return solve_exact(mu.masses, nu.masses, C);
}

// ---------------------------------------------------------------------------
// Sinkhorn
// ---------------------------------------------------------------------------

namespace {

double logsumexp_row(const Mat& S, int i) {
    const double m = S.row(i).maxCoeff();
    return m + std::log((S.row(i).array() - m).exp().sum());
}

double logsumexp_col(const Mat& S, int j) {
    const double m = S.col(j).maxCoeff();
    return m + std::log((S.col(j).array() - m).exp().sum());
}

}  // namespace

TransportPlan solve_sinkhorn(const std::vector<double>& mu, const std::vector<double>& nu, const Mat& C,
                             double epsilon, int max_iters) {
    if (!(epsilon > 0.0)) throw Error("sinkhorn: epsilon must be positive");
    if (static_cast<int>(mu.size()) != C.rows() || static_cast<int>(nu.size()) != C.cols())
        throw DimensionError("solve_sinkhorn: size mismatch");
    check_masses(mu, nu);
    const int m = C.rows(), n = C.cols();
    Vec loga(m), logb(n);
    for (int i = 0; i < m; ++i) loga(i) = std::log(mu[i]);
    for (int j = 0; j < n; ++j) logb(j) = std::log(nu[j]);

    // epsilon annealing: halve from max|C| down to the target
    std::vector<double> schedule;
    double e0 = std::max(C.cwiseAbs().maxCoeff(), epsilon);
    while (e0 > epsilon * 1.5) {
        schedule.push_back(e0);
        e0 *= 0.5;
    }
    schedule.push_back(epsilon);

    Vec f = Vec::Zero(m), g = Vec::Zero(n);
    int used = 0;
    double violation = std::numeric_limits<double>::infinity();
    constexpr double kTol = 1e-9;
    for (std::size_t stage = 0; stage < schedule.size(); ++stage) {
        const double eps = schedule[stage];
        const bool final_stage = stage + 1 == schedule.size();
        const double tol = final_stage ? kTol : 1e-3;
        while (used < max_iters) {
            Mat S = ((f.replicate(1, n) + g.transpose().replicate(m, 1) - C) / eps);
            // row update: exact row marginals afterwards
            for (int i = 0; i < m; ++i) f(i) += eps * (loga(i) - logsumexp_row(S, i));
            S = ((f.replicate(1, n) + g.transpose().replicate(m, 1) - C) / eps);
            for (int j = 0; j < n; ++j) g(j) += eps * (logb(j) - logsumexp_col(S, j));
            ++used;
            // column update was last, so rows carry the violation
            S = ((f.replicate(1, n) + g.transpose().replicate(m, 1) - C) / eps);
            violation = 0.0;
            for (int i = 0; i < m; ++i)
                violation = std::max(violation, std::abs(std::exp(logsumexp_row(S, i)) - mu[i]));
            if (violation <= tol) break;
        }
    }
    if (violation > 1e-8)
        throw ConvergenceError("sinkhorn: marginal violation " + std::to_string(violation) + " after " +
                                   std::to_string(used) + " iterations",
                               violation);

    Mat P = ((f.replicate(1, n) + g.transpose().replicate(m, 1) - C) / epsilon).array().exp();

    // Exact-marginal rounding (scale rows, then columns, then a rank-one
    // patch), so downstream plan invariants hold to machine precision.
    for (int i = 0; i < m; ++i) {
        const double r = P.row(i).sum();
        if (r > 0) P.row(i) *= std::min(1.0, mu[i] / r);
    }
    for (int j = 0; j < n; ++j) {
        const double c = P.col(j).sum();
        if (c > 0) P.col(j) *= std::min(1.0, nu[j] / c);
    }
    Vec rdef(m), cdef(n);
    for (int i = 0; i < m; ++i) rdef(i) = mu[i] - P.row(i).sum();
    for (int j = 0; j < n; ++j) cdef(j) = nu[j] - P.col(j).sum();
    const double total_def = rdef.sum();
    if (total_def > 1e-300) P += (rdef * cdef.transpose()) / total_def;

    TransportPlan plan;
    plan.rows = m;
    plan.cols = n;
    plan.coupling = P;
    plan.cost = (P.array() * C.array()).sum();
    plan.method = "sinkhorn";
    plan.iterations = used;
    return plan;
}

TransportPlan solve_sinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const Mat& C, double epsilon,
                             int max_iters) {
    mu.validate();
    nu.validate();
    return solve_sinkhorn(mu.masses, nu.masses, C, epsilon, max_iters);
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

TransportMap extract_map(const TransportPlan& plan, double tol) {
    TransportMap map;
    map.assignment.resize(plan.rows);
    map.deterministic = true;
    map.leakage = 0.0;
    for (int i = 0; i < plan.rows; ++i) {
        int arg = 0;
        for (int j = 1; j < plan.cols; ++j)
            if (plan.coupling(i, j) > plan.coupling(i, arg)) arg = j;  // ties keep lowest index
        map.assignment[i] = arg;
        const double row_mass = plan.coupling.row(i).sum();
        const double off = row_mass - plan.coupling(i, arg);
        const double frac = row_mass > 0 ? off / row_mass : 0.0;
        map.leakage = std::max(map.leakage, frac);
        if (off > tol * row_mass) map.deterministic = false;
    }
    return map;
}

PotentialPair dual_potentials(const Mat& C, const TransportPlan& plan, const std::vector<double>& mu,
                              const std::vector<double>& nu) {
    TransportSimplex simplex(mu, nu, C);
    simplex.solve();
    PotentialPair pp;
    pp.u = simplex.dual_u();
    pp.v = simplex.dual_v();
    // gauge: u[0] = 0 (shift the pair)
    const double shift = pp.u[0];
    for (auto& x : pp.u) x -= shift;
    for (auto& x : pp.v) x += shift;
    // feasibility and complementary slackness on the given plan's support
    for (int i = 0; i < plan.rows; ++i)
        for (int j = 0; j < plan.cols; ++j) {
            const double slack = C(i, j) - pp.u[i] - pp.v[j];
            if (slack < -1e-9) throw Error("dual potentials infeasible (internal)");
            if (plan.coupling(i, j) > 1e-9 && slack > 1e-9) {
                std::ostringstream os;
                os << "plan is not optimal: support entry (" << i << "," << j << ") has dual slack " << slack;
                throw Error(os.str());
            }
        }
    return pp;
}

CyclicalMonotonicityReport cyclical_monotonicity(const TransportPlan& plan, const Mat& C, int k, int trials,
                                                 std::uint64_t seed) {
    if (k < 2) throw DimensionError("cyclical_monotonicity: k must be >= 2");
    std::vector<std::pair<int, int>> support;
    for (int i = 0; i < plan.rows; ++i)
        for (int j = 0; j < plan.cols; ++j)
            if (plan.coupling(i, j) > 1e-12) support.emplace_back(i, j);
    CyclicalMonotonicityReport rep;
    rep.trials = trials;
    if (support.size() < 2) return rep;
    Rng rng(seed);
    for (int t = 0; t < trials; ++t) {
        const int len = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k - 1)));
        // sample `len` distinct support entries with distinct rows
        std::vector<std::pair<int, int>> cyc;
        std::vector<bool> used_row(plan.rows, false);
        int attempts = 0;
        while (static_cast<int>(cyc.size()) < len && attempts < 50 * len) {
            const auto& e = support[rng.below(support.size())];
            ++attempts;
            if (used_row[e.first]) continue;
            used_row[e.first] = true;
            cyc.push_back(e);
        }
        if (static_cast<int>(cyc.size()) < 2) continue;
        double orig = 0.0;
        for (const auto& e : cyc) orig += C(e.first, e.second);
        // all cyclic shifts of the target indices
        const int L = static_cast<int>(cyc.size());
        for (int s = 1; s < L; ++s) {
            double shifted = 0.0;
            for (int idx = 0; idx < L; ++idx) shifted += C(cyc[idx].first, cyc[(idx + s) % L].second);
            const double margin = orig - shifted;
            if (margin > rep.worst_margin) {
                rep.worst_margin = margin;
                rep.worst_cycle = cyc;
            }
            if (margin > 1e-10) ++rep.violations;
        }
    }
    return rep;
}

std::vector<Vec> displacement(const std::vector<Vec>& sources, const std::vector<Vec>& images, double t,
                              bool flip_t) {
    if (sources.size() != images.size()) throw DimensionError("displacement: size mismatch");
    if (!(t >= 0.0 && t <= 1.0)) throw Error("displacement: t must lie in [0,1]");
    const double id_w = flip_t ? (1.0 - t) : t;
    std::vector<Vec> out;
    out.reserve(sources.size());
    for (std::size_t i = 0; i < sources.size(); ++i) out.push_back(id_w * sources[i] + (1.0 - id_w) * images[i]);
    return out;
}

Vec simplex_to_weights(const Vec& natural) {
    const int d = static_cast<int>(natural.size());
    Vec p(d + 1);
    // stabilized against large exponents
    const double m = std::max(0.0, natural.maxCoeff());
    double denom = std::exp(-m);
    for (int i = 0; i < d; ++i) denom += std::exp(natural(i) - m);
    for (int i = 0; i < d; ++i) p(i) = std::exp(natural(i) - m) / denom;
    p(d) = std::exp(-m) / denom;
    return p;
}

Vec weights_to_natural(const Vec& weights) {
    const int n = static_cast<int>(weights.size());
    if (n < 2) throw DimensionError("weights_to_natural: need at least 2 weights");
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!(weights(i) > 0.0)) throw Error("weights must be strictly positive");
        sum += weights(i);
    }
    if (std::abs(sum - 1.0) > 1e-10) throw Error("weights must sum to 1 (got " + std::to_string(sum) + ")");
    Vec x(n - 1);
    for (int i = 0; i < n - 1; ++i) x(i) = std::log(weights(i) / weights(n - 1));
    return x;
}

bool uniform_probability(const std::vector<Vec>& weights, double delta, double* min_weight) {
    double mw = std::numeric_limits<double>::infinity();
    for (const Vec& p : weights) mw = std::min(mw, p.minCoeff());
    if (min_weight) *min_weight = mw;
    return mw > delta;
}

}  // namespace otg
