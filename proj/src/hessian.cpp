#include "otg/hessian.hpp"

#include <cmath>
#include <sstream>

namespace otg {

double Tensor4::max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
}

MetricPoint metric_point(const DerivBundle& b) {
    const int n = b.dim();
    MetricPoint mp;
    mp.n = n;
    mp.bundle = b;
    mp.g.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) mp.g(i, j) = b.d2(i, j);
    Eigen::SelfAdjointEigenSolver<Mat> es(mp.g);
    mp.min_eigenvalue = es.eigenvalues().minCoeff();
    if (!(mp.min_eigenvalue > 1e-10)) {
        std::ostringstream os;
        os << "degenerate Hessian metric: min eigenvalue " << mp.min_eigenvalue;
        throw DegenerateMetricError(os.str());
    }
    // inverse through the spectral factorization (symmetric positive-definite)
    mp.ginv = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    mp.gamma_lower = Tensor3(n);
    mp.gamma_mixed = Tensor3(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) mp.gamma_lower.at(i, j, k) = 0.5 * b.d3(i, j, k);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double s = 0.0;
                for (int m = 0; m < n; ++m) s += b.d3(i, j, m) * mp.ginv(k, m);
                mp.gamma_mixed.at(i, j, k) = 0.5 * s;  // Gamma^k_ij
            }
    return mp;
}

MetricPoint metric_point(const PotentialSpec& spec, std::span<const double> point) {
    return metric_point(eval_bundle(spec, point));
}

Riem4 riemann(const MetricPoint& mp) {
    const int n = mp.n;
    const DerivBundle& b = mp.bundle;
    Riem4 R(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = 0.0;
                    for (int p = 0; p < n; ++p)
                        for (int q = 0; q < n; ++q)
                            s += mp.ginv(p, q) * (b.d3(j, l, p) * b.d3(i, k, q) - b.d3(i, l, p) * b.d3(j, k, q));
                    R.at(i, j, k, l) = -0.25 * s;
                }
    return R;
}

Riem4 riemann(const PotentialSpec& spec, std::span<const double> point) {
    return riemann(metric_point(spec, point));
}

Vec to_dual(const PotentialSpec& spec, std::span<const double> point) {
    const DerivBundle b = eval_bundle(spec, point);
    Vec theta(b.dim());
    for (int i = 0; i < b.dim(); ++i) theta(i) = b.grad(i);
    return theta;
}

Vec from_dual(const PotentialSpec& spec, const Vec& theta, const Vec& guess) {
    const int n = spec.n;
    if (theta.size() != n || guess.size() != n) throw DimensionError("from_dual: dimension mismatch");
    constexpr int kMaxIters = 100;
    constexpr int kMaxHalvings = 60;
    constexpr double kTol = 1e-12;

    Vec u = guess;
    require_in_domain(spec, std::span<const double>(u.data(), n));
    double best_res = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < kMaxIters; ++iter) {
        const DerivBundle b = eval_bundle(spec, std::span<const double>(u.data(), n));
        Vec r(n);
        Mat H(n, n);
        for (int i = 0; i < n; ++i) {
            r(i) = b.grad(i) - theta(i);
            for (int j = 0; j < n; ++j) H(i, j) = b.d2(i, j);
        }
        const double res = r.lpNorm<Eigen::Infinity>();
        best_res = std::min(best_res, res);
        if (res <= kTol) return u;
        const Vec step = H.ldlt().solve(r);
        double s = 1.0;
        int halvings = 0;
        while (true) {
            Vec cand = u - s * step;
            const InDomainResult in = in_domain(spec, std::span<const double>(cand.data(), n));
            if (in.ok) {
                // guard against wild overshoot on barrier-type domains
                bool acceptable = true;
                try {
                    const Vec gc = to_dual(spec, std::span<const double>(cand.data(), n));
                    acceptable = ((gc - theta).lpNorm<Eigen::Infinity>() <= 2.0 * res) || s < 1.0 / 16;
                } catch (const Error&) {
                    acceptable = false;
                }
                if (acceptable) {
                    u = cand;
                    break;
                }
            }
            if (++halvings > kMaxHalvings) {
                std::ostringstream os;
                os << "from_dual: backtracking exhausted (best residual " << best_res << ")";
                throw InversionError(os.str(), best_res);
            }
            s *= 0.5;
        }
    }
    std::ostringstream os;
    os << "from_dual: no convergence in " << kMaxIters << " iterations (best residual " << best_res << ")";
    throw InversionError(os.str(), best_res);
}

double legendre_value(const PotentialSpec& spec, const Vec& theta, const Vec& guess) {
    const Vec u = from_dual(spec, theta, guess);
    return u.dot(theta) - eval_value(spec, std::span<const double>(u.data(), spec.n));
}

Vec dual_geodesic(const PotentialSpec& spec, const Vec& u0, const Vec& u1, double t) {
    const Vec th0 = to_dual(spec, std::span<const double>(u0.data(), spec.n));
    const Vec th1 = to_dual(spec, std::span<const double>(u1.data(), spec.n));
    if (t == 0.0) return u0;
    if (t == 1.0) return u1;

    // March from s=0 toward s=t, seeding each inversion with the previous
    // point; bisect the step when an inversion fails mid-segment.
    Vec u = u0;
    double s = 0.0;
    double step = t;
    int failures = 0;
    while (std::abs(t - s) > 0.0) {
        double s_next = s + step;
        if ((step > 0 && s_next > t) || (step < 0 && s_next < t)) s_next = t;
        const Vec theta = (1.0 - s_next) * th0 + s_next * th1;
        try {
            u = from_dual(spec, theta, u);
            s = s_next;
            step = t - s;
        } catch (const Error&) {
            step *= 0.5;
            if (++failures > 60) {
                std::ostringstream os;
                os << "dual_geodesic: segment exits domain near t= " << s_next;
                throw InversionError(os.str(), s_next);
            }
        }
    }
    return u;
}

}  // namespace otg
