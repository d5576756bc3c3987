#include "otg/kahler.hpp"

#include <cmath>
#include <sstream>

namespace otg {

KahlerCurvPoint kahler_curvature(const MetricPoint& mp) {
    const int n = mp.n;
    const DerivBundle& b = mp.bundle;
    KahlerCurvPoint K;
    K.metric = mp;
    K.hh = riemann(mp);
    K.hv = Tensor4(n);
    K.mixed = Tensor4(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s1 = 0.0, s2 = 0.0;
                    for (int r = 0; r < n; ++r)
                        for (int s = 0; s < n; ++s) {
                            s1 += mp.ginv(s, r) * b.d3(i, k, s) * b.d3(j, l, r);
                            s2 += mp.ginv(s, r) * b.d3(j, k, s) * b.d3(i, l, r);
                        }
                    const double p4 = b.d4(i, j, k, l);
                    K.hv.at(i, j, k, l) = -0.5 * p4 + 0.25 * s1 + 0.25 * s2;
                    K.mixed.at(i, j, k, l) = -0.5 * p4 + 0.5 * s1;
                }
    return K;
}

KahlerCurvPoint kahler_curvature(const PotentialSpec& spec, std::span<const double> point) {
    return kahler_curvature(metric_point(spec, point));
}

namespace {

double contract_xyxy(const Tensor4& T, const Vec& x, const Vec& y) {
    const int n = T.dim();
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) s += T.at(i, j, k, l) * x(i) * y(j) * x(k) * y(l);
    return s;
}

void check_nonzero(const Vec& xi, const Vec& eta) {
    if (xi.norm() == 0.0 || eta.norm() == 0.0) throw DimensionError("zero vector/covector input");
}

}  // namespace

double anti_bisectional(const KahlerCurvPoint& K, const Vec& xi, const Vec& eta) {
    check_nonzero(xi, eta);
    const Vec es = K.metric.sharp(eta);
    // A = 2 [ R(xi, J eta#, xi, J eta#) - R(eta#, xi, eta#, xi) ]
    return 2.0 * (contract_xyxy(K.hv, xi, es) - contract_xyxy(K.hh, es, xi));
}

double orthogonal_anti_bisectional(const KahlerCurvPoint& K, const Vec& xi, const Vec& eta) {
    check_nonzero(xi, eta);
    const double pairing = eta.dot(xi);
    if (std::abs(pairing) > 1e-10 * xi.norm() * eta.norm()) {
        std::ostringstream os;
        os << "orthogonal_anti_bisectional requires eta(xi) = 0, got " << pairing;
        throw Error(os.str());
    }
    return anti_bisectional(K, xi, eta);
}

double holomorphic_sectional(const KahlerCurvPoint& K, const Vec& xi) {
    if (xi.norm() == 0.0) throw DimensionError("zero vector input");
    return anti_bisectional(K, xi, xi);
}

double bisectional(const KahlerCurvPoint& K, const Vec& xi, const Vec& eta) {
    check_nonzero(xi, eta);
    const Vec es = K.metric.sharp(eta);
    return 2.0 * (contract_xyxy(K.hv, xi, es) + contract_xyxy(K.hh, es, xi));
}

}  // namespace otg
