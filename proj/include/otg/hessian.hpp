#pragma once

#include <Eigen/Dense>
#include <vector>

#include "otg/potentials.hpp"

namespace otg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Dense rank-3 / rank-4 tensors over a small dimension n.
class Tensor3 {
  public:
    Tensor3() = default;
    explicit Tensor3(int n) : n_(n), v_(static_cast<std::size_t>(n) * n * n, 0.0) {}
    int dim() const { return n_; }
    double& at(int i, int j, int k) { return v_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k]; }
    double at(int i, int j, int k) const { return v_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k]; }

  private:
    int n_ = 0;
    std::vector<double> v_;
};

class Tensor4 {
  public:
    Tensor4() = default;
    explicit Tensor4(int n) : n_(n), v_(static_cast<std::size_t>(n) * n * n * n, 0.0) {}
    int dim() const { return n_; }
    double& at(int i, int j, int k, int l) {
        return v_[((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l];
    }
    double at(int i, int j, int k, int l) const {
        return v_[((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l];
    }
    double max_abs() const;

  private:
    int n_ = 0;
    std::vector<double> v_;
};

// Hessian metric data at one point: g_ij = Psi_ij, its inverse, and the
// Levi-Civita Christoffels Gamma_ijk = Psi_ijk/2, Gamma^k_ij = Psi_ijm Psi^{km}/2.
struct MetricPoint {
    int n = 0;
    Mat g, ginv;
    Tensor3 gamma_lower, gamma_mixed;
    DerivBundle bundle;
    double min_eigenvalue = 0.0;

    double inner(const Vec& x, const Vec& y) const { return x.dot(g * y); }
    Vec sharp(const Vec& eta) const { return ginv * eta; }  // raise a covector
};

// Base Riemann tensor R_ijkl = -1/4 Psi^{pq}(Psi_jlp Psi_ikq - Psi_ilp Psi_jkq).
// Sectional curvature of the (e_i, e_j) plane is R_ijij / (g_ii g_jj - g_ij^2).
using Riem4 = Tensor4;

MetricPoint metric_point(const PotentialSpec& spec, std::span<const double> point);
MetricPoint metric_point(const DerivBundle& bundle);
Riem4 riemann(const PotentialSpec& spec, std::span<const double> point);
Riem4 riemann(const MetricPoint& mp);

// Dual coordinates theta_i = dPsi/du^i and the gradient-map inverse.
Vec to_dual(const PotentialSpec& spec, std::span<const double> point);

// Newton iteration on grad Psi(u) = theta with backtracking to stay in the
// domain (halve the step, max 60 halvings); residual inf-norm <= 1e-12.
Vec from_dual(const PotentialSpec& spec, const Vec& theta, const Vec& guess);

// Legendre dual value Psi*(theta) = <u, theta> - Psi(u) at u = from_dual(theta).
double legendre_value(const PotentialSpec& spec, const Vec& theta, const Vec& guess);

// D*-geodesic: straight line in theta-coordinates pulled back through the
// gradient map, seeded stepwise for continuity. t in [0,1].
Vec dual_geodesic(const PotentialSpec& spec, const Vec& u0, const Vec& u1, double t);

}  // namespace otg
