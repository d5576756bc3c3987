#pragma once

#include <cstdint>
#include <optional>

#include "otg/kahler.hpp"
#include "otg/rng.hpp"

namespace otg {

// Cost functions whose MTW tensor the library evaluates.
//   psi-cost:  c(x,y) = Psi(x-y)
//   d-alpha:   4/(1-a^2) [ (1-a)/2 Psi(x) + (1+a)/2 Psi(y) - Psi((1-a)/2 x + (1+a)/2 y) ]
//   log-cost:  c(p,q) = log( (1/n) sum q_i/p_i ) - (1/n) sum log(q_i/p_i), p,q > 0
//   ecf-cost:  c(x,y) = log(1 + sum e^{x_i-y_i}) - log(d+1) - 1/(d+1) sum (x_i-y_i)
//   raw:       parsed expression over x1..xn, y1..yn
struct CostSpec {
    enum class Kind { PsiCost, DAlpha, LogCost, EcfCost, Raw };
    Kind kind = Kind::PsiCost;
    PotentialSpec psi;   // PsiCost, DAlpha
    double alpha = 0.0;  // DAlpha, in (-1,1)
    int dims = 0;        // point dimension of x and y
    ExprPtr raw;

    std::string describe() const;
};

CostSpec make_psi_cost(PotentialSpec spec);
CostSpec make_dalpha_cost(PotentialSpec spec, double alpha);
CostSpec make_log_cost(int n);
CostSpec make_ecf_cost(int dims);
CostSpec make_raw_cost(const std::string& text);

double cost_value(const CostSpec& cost, std::span<const double> x, std::span<const double> y);

struct MtwValue {
    double value = 0.0;
    std::string route;
};

// Direct route: order-4 jets in the 2n variables (x, y), contracted per
//   S = (c_{ij,p} c^{p,q} c_{q,rs} - c_{ij,rs}) c^{r,k} c^{s,l} xi^i xi^j eta_k eta_l.
MtwValue mtw_direct(const CostSpec& cost, const Vec& x, const Vec& y, const Vec& xi, const Vec& eta);

// Potential route (Psi-costs), z = x - y:
//   S = (Psi_ijp Psi_rsq Psi^{pq} - Psi_ijrs) Psi^{rk} Psi^{sl} xi^i xi^j eta_k eta_l.
MtwValue mtw_potential(const PotentialSpec& spec, const Vec& z, const Vec& xi, const Vec& eta);

// Curvature route: the tensor identity against the Kahler Sasaki curvature.
// anti_bisectional already carries the identity's factor 2, so the value is
// used as-is; the three routes agree to rounding.
MtwValue mtw_curvature(const PotentialSpec& spec, const Vec& z, const Vec& xi, const Vec& eta);

// Same contraction without the orthogonality restriction.
double cross_curvature(const PotentialSpec& spec, const Vec& z, const Vec& xi, const Vec& eta);

// ---------------------------------------------------------------------------
// Sampling-based certification
// ---------------------------------------------------------------------------

enum class CertMode { Mtw0, MtwKappa, Noab, Cross };
const char* cert_mode_name(CertMode m);
CertMode cert_mode_from_name(const std::string& s);

struct Box {
    std::vector<std::pair<double, double>> lohi;
    int dims() const { return static_cast<int>(lohi.size()); }
};

struct CertifyBudget {
    int samples = 2000;
    int refinements = 8;  // number of worst candidates refined
};

struct CertWitness {
    std::vector<double> z;  // for two-point costs: x followed by y
    std::vector<double> xi, eta;
    double value = 0.0;
};

// Empirical certificate: Latin-hypercube samples plus projected-gradient
// refinement of the worst candidates. Never a proof; carries seed and witness
// for reproducibility. holds-empirically iff empirical_min >= -1e-9.
struct Certificate {
    CertMode mode = CertMode::Mtw0;
    std::string target;
    Box region;
    int samples = 0;
    int refinements = 0;
    double empirical_min = 0.0;
    double kappa_estimate = 0.0;
    CertWitness witness;
    bool holds = false;
    std::uint64_t seed = 0;
};

Certificate certify(const PotentialSpec& spec, const Box& region, CertMode mode, const CertifyBudget& budget,
                    std::uint64_t seed, double margin = 1e-6);
Certificate certify(const CostSpec& cost, const Box& region, CertMode mode, const CertifyBudget& budget,
                    std::uint64_t seed, double margin = 1e-6);

}  // namespace otg
