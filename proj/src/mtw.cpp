#include "otg/mtw.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace otg {

std::string CostSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::PsiCost: os << "psi-cost(" << psi.name << ")"; break;
        case Kind::DAlpha: os << "d-alpha(" << psi.name << ", alpha=" << alpha << ")"; break;
        case Kind::LogCost: os << "log-cost(n=" << dims << ")"; break;
        case Kind::EcfCost: os << "ecf-cost(d=" << dims << ")"; break;
        case Kind::Raw: os << "raw(" << print_expr(*raw) << ")"; break;
    }
    return os.str();
}

CostSpec make_psi_cost(PotentialSpec spec) {
    CostSpec c;
    c.kind = CostSpec::Kind::PsiCost;
    c.dims = spec.n;
    c.psi = std::move(spec);
    return c;
}

CostSpec make_dalpha_cost(PotentialSpec spec, double alpha) {
    if (!(alpha > -1.0 && alpha < 1.0)) throw Error("d-alpha requires alpha in (-1,1)");
    CostSpec c;
    c.kind = CostSpec::Kind::DAlpha;
    c.dims = spec.n;
    c.psi = std::move(spec);
    c.alpha = alpha;
    return c;
}

CostSpec make_log_cost(int n) {
    if (n < 2) throw DimensionError("log-cost needs n >= 2 categories");
    CostSpec c;
    c.kind = CostSpec::Kind::LogCost;
    c.dims = n;
    return c;
}

CostSpec make_ecf_cost(int dims) {
    if (dims < 1) throw DimensionError("ecf-cost needs dims >= 1");
    CostSpec c;
    c.kind = CostSpec::Kind::EcfCost;
    c.dims = dims;
    return c;
}

CostSpec make_raw_cost(const std::string& text) {
    RawCostExpr rc = parse_raw_cost(text);
    CostSpec c;
    c.kind = CostSpec::Kind::Raw;
    c.dims = rc.n;
    c.raw = rc.expr;
    return c;
}

namespace {

// Evaluate the cost on jet (or plain double) arguments; xy holds x then y.
template <typename T>
T cost_eval(const CostSpec& cost, std::span<const T> xy) {
    const int n = cost.dims;
    auto lift = [&](double v) {
        if constexpr (std::is_same_v<T, Jet4>)
            return Jet4(static_cast<int>(xy.size()), v);
        else
            return v;
    };
    switch (cost.kind) {
        case CostSpec::Kind::PsiCost: {
            std::vector<T> z(xy.begin(), xy.begin() + n);
            for (int i = 0; i < n; ++i) z[i] -= xy[n + i];
            if constexpr (std::is_same_v<T, Jet4>)
                return eval_expr(*cost.psi.expr, std::span<const T>(z));
            else
                return eval_expr_value(*cost.psi.expr, std::span<const T>(z));
        }
        case CostSpec::Kind::DAlpha: {
            const double a = cost.alpha;
            const double wx = (1.0 - a) / 2.0, wy = (1.0 + a) / 2.0;
            std::vector<T> xs(xy.begin(), xy.begin() + n);
            std::vector<T> ys(xy.begin() + n, xy.end());
            std::vector<T> mid;
            mid.reserve(n);
            for (int i = 0; i < n; ++i) mid.push_back(xs[i] * wx + ys[i] * wy);
            auto f = [&](std::span<const T> p) {
                if constexpr (std::is_same_v<T, Jet4>)
                    return eval_expr(*cost.psi.expr, p);
                else
                    return eval_expr_value(*cost.psi.expr, p);
            };
            T v = f(xs) * (wx * 4.0 / (1.0 - a * a));
            v += f(ys) * (wy * 4.0 / (1.0 - a * a));
            v -= f(mid) * (4.0 / (1.0 - a * a));
            return v;
        }
        case CostSpec::Kind::LogCost: {
            // log((1/n) sum q_i/p_i) - (1/n) sum log(q_i/p_i)
            T sum_ratio = lift(0.0);
            T sum_log = lift(0.0);
            for (int i = 0; i < n; ++i) {
                T ratio = xy[n + i] / xy[i];
                sum_ratio += ratio;
                if constexpr (std::is_same_v<T, Jet4>)
                    sum_log += log(ratio);
                else
                    sum_log += std::log(ratio);
            }
            T first = lift(0.0);
            if constexpr (std::is_same_v<T, Jet4>)
                first = log(sum_ratio * (1.0 / n));
            else
                first = std::log(sum_ratio / n);
            return first - sum_log * (1.0 / n);
        }
        case CostSpec::Kind::EcfCost: {
            const int cats = n + 1;
            T s = lift(1.0);
            T lin = lift(0.0);
            for (int i = 0; i < n; ++i) {
                T d = xy[i] - xy[n + i];
                if constexpr (std::is_same_v<T, Jet4>)
                    s += exp(d);
                else
                    s += std::exp(d);
                lin += d;
            }
            T head = lift(0.0);
            if constexpr (std::is_same_v<T, Jet4>)
                head = log(s);
            else
                head = std::log(s);
            return head - std::log(static_cast<double>(cats)) - lin * (1.0 / cats);
        }
        case CostSpec::Kind::Raw: {
            if constexpr (std::is_same_v<T, Jet4>)
                return eval_expr(*cost.raw, xy);
            else
                return eval_expr_value(*cost.raw, xy);
        }
    }
    throw Error("bad cost kind");
}

}  // namespace

double cost_value(const CostSpec& cost, std::span<const double> x, std::span<const double> y) {
    if (static_cast<int>(x.size()) != cost.dims || static_cast<int>(y.size()) != cost.dims)
        throw DimensionError("cost_value: dimension mismatch");
    std::vector<double> xy(x.begin(), x.end());
    xy.insert(xy.end(), y.begin(), y.end());
    return cost_eval<double>(cost, xy);
}

MtwValue mtw_direct(const CostSpec& cost, const Vec& x, const Vec& y, const Vec& xi, const Vec& eta) {
    const int n = cost.dims;
    if (x.size() != n || y.size() != n || xi.size() != n || eta.size() != n)
        throw DimensionError("mtw_direct: dimension mismatch");
    std::vector<double> xy(static_cast<std::size_t>(2) * n);
    for (int i = 0; i < n; ++i) {
        xy[i] = x(i);
        xy[n + i] = y(i);
    }
    const std::vector<Jet4> vars = Jet4::variables(xy);
    const DerivBundle b(cost_eval<Jet4>(cost, vars));

    // mixed second-derivative matrix c_{i,j} (x-row, y-column)
    Mat M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = b.d2(i, n + j);
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.singularValues().minCoeff() <= 1e-10)
        throw SingularCostError("det(c_{x,y}) vanishes at the evaluation point (min singular value " +
                                std::to_string(svd.singularValues().minCoeff()) + ")");
    const Mat Minv = M.inverse();  // Minv(j,i): (y,x)-typed inverse c^{j,i}

    // w^r = c^{r,k} eta_k (y-typed sharp of eta)
    Vec w(n);
    for (int r = 0; r < n; ++r) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += Minv(r, k) * eta(k);
        w(r) = s;
    }
    // A_p = c_{ij,p} xi^i xi^j ; E_q = c_{q,rs} w^r w^s ; F = c_{ij,rs} xi xi w w
    Vec A(n), E(n);
    for (int p = 0; p < n; ++p) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += b.d3(i, j, n + p) * xi(i) * xi(j);
        A(p) = s;
    }
    for (int q = 0; q < n; ++q) {
        double s = 0.0;
        for (int r = 0; r < n; ++r)
            for (int t = 0; t < n; ++t) s += b.d3(q, n + r, n + t) * w(r) * w(t);
        E(q) = s;
    }
    double term1 = 0.0;
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) term1 += A(p) * Minv(p, q) * E(q);
    double term2 = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int r = 0; r < n; ++r)
                for (int t = 0; t < n; ++t) term2 += b.d4(i, j, n + r, n + t) * xi(i) * xi(j) * w(r) * w(t);
    return {term1 - term2, "direct"};
}

MtwValue mtw_potential(const PotentialSpec& spec, const Vec& z, const Vec& xi, const Vec& eta) {
    const int n = spec.n;
    if (z.size() != n || xi.size() != n || eta.size() != n)
        throw DimensionError("mtw_potential: dimension mismatch");
    const MetricPoint mp = metric_point(spec, std::span<const double>(z.data(), n));
    const DerivBundle& b = mp.bundle;
    const Vec w = mp.sharp(eta);
    Vec B(n), C(n);
    for (int p = 0; p < n; ++p) {
        double sb = 0.0, sc = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                sb += b.d3(i, j, p) * xi(i) * xi(j);
                sc += b.d3(i, j, p) * w(i) * w(j);
            }
        B(p) = sb;
        C(p) = sc;
    }
    double term1 = 0.0;
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) term1 += mp.ginv(p, q) * B(p) * C(q);
    double term2 = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int r = 0; r < n; ++r)
                for (int s = 0; s < n; ++s) term2 += b.d4(i, j, r, s) * xi(i) * xi(j) * w(r) * w(s);
    return {term1 - term2, "potential"};
}

MtwValue mtw_curvature(const PotentialSpec& spec, const Vec& z, const Vec& xi, const Vec& eta) {
    const KahlerCurvPoint K = kahler_curvature(spec, std::span<const double>(z.data(), spec.n));
    return {anti_bisectional(K, xi, eta), "curvature"};
}

double cross_curvature(const PotentialSpec& spec, const Vec& z, const Vec& xi, const Vec& eta) {
    return mtw_curvature(spec, z, xi, eta).value;
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

const char* cert_mode_name(CertMode m) {
    switch (m) {
        case CertMode::Mtw0: return "mtw0";
        case CertMode::MtwKappa: return "mtw-kappa";
        case CertMode::Noab: return "noab";
        case CertMode::Cross: return "cross";
    }
    return "?";
}

CertMode cert_mode_from_name(const std::string& s) {
    if (s == "mtw0") return CertMode::Mtw0;
    if (s == "mtw-kappa") return CertMode::MtwKappa;
    if (s == "noab") return CertMode::Noab;
    if (s == "cross") return CertMode::Cross;
    throw Error("unknown certification mode '" + s + "'");
}

namespace {

bool orthogonal_mode(CertMode m) { return m != CertMode::Cross; }

struct Candidate {
    std::vector<double> z;
    Vec xi, eta;
    double value;
};

// Project eta to the dual-pairing orthogonal complement of xi and renormalize.
bool project_pair(const Vec& xi, Vec& eta) {
    Vec e = eta - (eta.dot(xi) / xi.squaredNorm()) * xi;
    const double norm = e.norm();
    if (norm < 1e-12) return false;
    eta = e / norm;
    return true;
}

Certificate run_certify(const std::string& target_name, int zdim, const Box& region,
                        const std::function<double(std::span<const double>, const Vec&, const Vec&)>& f,
                        const std::function<void(std::span<const double>)>& check_point, int vecdim, CertMode mode,
                        const CertifyBudget& budget, std::uint64_t seed) {
    if (region.dims() != zdim) throw DimensionError("certify: region dimension mismatch");
    Certificate cert;
    cert.mode = mode;
    cert.target = target_name;
    cert.region = region;
    cert.samples = budget.samples;
    cert.refinements = budget.refinements;
    cert.seed = seed;

    const auto lhs = latin_hypercube(budget.samples, zdim, seed);
    std::vector<Candidate> cands;
    cands.reserve(budget.samples);
    for (int s = 0; s < budget.samples; ++s) {
        Candidate c;
        c.z.resize(zdim);
        for (int d = 0; d < zdim; ++d)
            c.z[d] = region.lohi[d].first + lhs[s][d] * (region.lohi[d].second - region.lohi[d].first);
        check_point(c.z);
        Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(s)));
        auto draw_pair = [&]() {
            auto xv = rng.unit_vector(vecdim);
            auto ev = rng.unit_vector(vecdim);
            c.xi = Eigen::Map<Vec>(xv.data(), vecdim);
            c.eta = Eigen::Map<Vec>(ev.data(), vecdim);
        };
        draw_pair();
        if (orthogonal_mode(mode)) {
            while (!project_pair(c.xi, c.eta)) draw_pair();
        }
        c.value = f(c.z, c.xi, c.eta);
        cands.push_back(std::move(c));
    }

    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.value < b.value; });

    Candidate best = cands.front();
    const int refine_count = std::min<int>(budget.refinements, static_cast<int>(cands.size()));
    constexpr int kSteps = 200;
    constexpr double kStep = 1e-2;
    constexpr double kH = 1e-4;
    for (int r = 0; r < refine_count; ++r) {
        Candidate cur = cands[r];
        for (int step = 0; step < kSteps; ++step) {
            // finite-difference gradient over (z, xi, eta)
            std::vector<double> grad(zdim + 2 * vecdim, 0.0);
            auto eval_shifted = [&](int coord, double h) {
                Candidate t = cur;
                if (coord < zdim) {
                    t.z[coord] = std::clamp(t.z[coord] + h, region.lohi[coord].first, region.lohi[coord].second);
                } else if (coord < zdim + vecdim) {
                    t.xi(coord - zdim) += h;
                    t.xi.normalize();
                    if (orthogonal_mode(mode) && !project_pair(t.xi, t.eta)) return cur.value;
                } else {
                    t.eta(coord - zdim - vecdim) += h;
                    if (orthogonal_mode(mode)) {
                        if (!project_pair(t.xi, t.eta)) return cur.value;
                    } else {
                        t.eta.normalize();
                    }
                }
                return f(t.z, t.xi, t.eta);
            };
            double gnorm2 = 0.0;
            for (int c = 0; c < zdim + 2 * vecdim; ++c) {
                grad[c] = (eval_shifted(c, kH) - eval_shifted(c, -kH)) / (2.0 * kH);
                gnorm2 += grad[c] * grad[c];
            }
            if (gnorm2 < 1e-28) break;
            const double scale = kStep / std::sqrt(gnorm2);
            for (int d = 0; d < zdim; ++d)
                cur.z[d] = std::clamp(cur.z[d] - scale * grad[d], region.lohi[d].first, region.lohi[d].second);
            for (int d = 0; d < vecdim; ++d) cur.xi(d) -= scale * grad[zdim + d];
            cur.xi.normalize();
            for (int d = 0; d < vecdim; ++d) cur.eta(d) -= scale * grad[zdim + vecdim + d];
            if (orthogonal_mode(mode)) {
                if (!project_pair(cur.xi, cur.eta)) break;
            } else {
                cur.eta.normalize();
            }
            cur.value = f(cur.z, cur.xi, cur.eta);
            if (cur.value < best.value) best = cur;
        }
        if (cands[r].value < best.value) best = cands[r];
    }

    // Fresh re-evaluation of the witness rules out refinement-stage drift.
    best.value = f(best.z, best.xi, best.eta);
    cert.empirical_min = best.value;
    cert.kappa_estimate = best.value / (best.xi.squaredNorm() * best.eta.squaredNorm());
    cert.witness.z = best.z;
    cert.witness.xi.assign(best.xi.data(), best.xi.data() + vecdim);
    cert.witness.eta.assign(best.eta.data(), best.eta.data() + vecdim);
    cert.witness.value = best.value;
    cert.holds = best.value >= -1e-9;
    return cert;
}

}  // namespace

Certificate certify(const PotentialSpec& spec, const Box& region, CertMode mode, const CertifyBudget& budget,
                    std::uint64_t seed, double margin) {
    auto check_point = [&](std::span<const double> z) {
        const InDomainResult r = in_domain(spec, z, margin);
        if (!r.ok)
            throw OutOfDomainError("certify: region leaves the domain of " + spec.name + " (" + r.reason + ")");
    };
    std::function<double(std::span<const double>, const Vec&, const Vec&)> f;
    switch (mode) {
        case CertMode::Noab:
            f = [&spec](std::span<const double> z, const Vec& xi, const Vec& eta) {
                return orthogonal_anti_bisectional(kahler_curvature(spec, z), xi, eta);
            };
            break;
        case CertMode::Mtw0:
        case CertMode::MtwKappa:
        case CertMode::Cross:
            f = [&spec](std::span<const double> z, const Vec& xi, const Vec& eta) {
                return mtw_potential(spec, Eigen::Map<const Vec>(z.data(), z.size()), xi, eta).value;
            };
            break;
    }
    return run_certify(spec.name, spec.n, region, f, check_point, spec.n, mode, budget, seed);
}

Certificate certify(const CostSpec& cost, const Box& region, CertMode mode, const CertifyBudget& budget,
                    std::uint64_t seed, double margin) {
    if (cost.kind == CostSpec::Kind::PsiCost || cost.kind == CostSpec::Kind::DAlpha) {
        if (cost.kind == CostSpec::Kind::PsiCost)  // z-box of x - y values
            return certify(cost.psi, region, mode, budget, seed, margin);
        if (mode == CertMode::Noab) throw Error("noab certification needs a Psi-cost or potential target");
        // d-alpha: sample x and y independently from the region (2n-dim LHS).
        Box region2;
        region2.lohi = region.lohi;
        region2.lohi.insert(region2.lohi.end(), region.lohi.begin(), region.lohi.end());
        auto check_point = [&](std::span<const double> xy) {
            const int n = cost.dims;
            const InDomainResult rx = in_domain(cost.psi, xy.subspan(0, n), margin);
            const InDomainResult ry = in_domain(cost.psi, xy.subspan(n, n), margin);
            if (!rx.ok || !ry.ok) throw OutOfDomainError("certify: region leaves the cost domain");
        };
        auto f = [&cost](std::span<const double> xy, const Vec& xi, const Vec& eta) {
            const int n = cost.dims;
            return mtw_direct(cost, Eigen::Map<const Vec>(xy.data(), n), Eigen::Map<const Vec>(xy.data() + n, n), xi,
                              eta)
                .value;
        };
        return run_certify(cost.describe(), 2 * cost.dims, region2, f, check_point, cost.dims, mode, budget, seed);
    }
    if (mode == CertMode::Noab) throw Error("noab certification needs a Psi-cost or potential target");
    Box region2;
    region2.lohi = region.lohi;
    region2.lohi.insert(region2.lohi.end(), region.lohi.begin(), region.lohi.end());
    auto check_point = [&](std::span<const double> xy) {
        if (cost.kind == CostSpec::Kind::LogCost) {
            for (double v : xy)
                if (!(v > 0.0)) throw OutOfDomainError("certify: log-cost needs positive coordinates");
        }
    };
    auto f = [&cost](std::span<const double> xy, const Vec& xi, const Vec& eta) {
        const int n = cost.dims;
        return mtw_direct(cost, Eigen::Map<const Vec>(xy.data(), n), Eigen::Map<const Vec>(xy.data() + n, n), xi, eta)
            .value;
    };
    return run_certify(cost.describe(), 2 * cost.dims, region2, f, check_point, cost.dims, mode, budget, seed);
}

}  // namespace otg
