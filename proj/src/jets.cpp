#include "otg/jets.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>

namespace otg {

namespace {

constexpr int kOrder = 4;
constexpr double kDomainMargin = 1e-12;

// Exponents are <= 4, so 3 bits per variable suffice; n <= 16 fits a key.
std::uint64_t pack_key(const std::vector<std::uint8_t>& mono) {
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < mono.size(); ++i) key |= std::uint64_t(mono[i]) << (3 * i);
    return key;
}

}  // namespace

JetTable::JetTable(int n) : n_(n) {
    if (n < 1 || n > 16) throw DimensionError("jet dimension must be in [1,16], got " + std::to_string(n));
    // Graded lexicographic enumeration of multi-indices with |J| <= 4.
    std::vector<std::uint8_t> mono(n, 0);
    for (int deg = 0; deg <= kOrder; ++deg) {
        // enumerate compositions of `deg` into n parts, lexicographic
        std::fill(mono.begin(), mono.end(), 0);
        mono[0] = static_cast<std::uint8_t>(deg);
        while (true) {
            monomials_.push_back(mono);
            degree_.push_back(deg);
            // next composition: move one unit rightward (colex-style walk)
            int i = n - 2;
            while (i >= 0 && mono[i] == 0) --i;
            if (i < 0) break;
            const std::uint8_t rest = mono[n - 1];
            mono[i] -= 1;
            mono[i + 1] = static_cast<std::uint8_t>(rest + 1);
            if (i + 1 != n - 1) mono[n - 1] = 0;
        }
    }
    const std::uint64_t max_key = std::uint64_t(1) << (3 * n);
    by_key_.assign(static_cast<std::size_t>(std::min<std::uint64_t>(max_key, 1u << 24)), -1);
    if (3 * n > 24) {
        by_key_.clear();  // fall back to linear search for very high dims
    } else {
        for (int i = 0; i < size(); ++i) by_key_[pack_key(monomials_[i])] = i;
    }
    // Product table: all (a, b) with deg(a) + deg(b) <= 4.
    std::vector<std::uint8_t> sum(n);
    for (int a = 0; a < size(); ++a) {
        for (int b = 0; b < size(); ++b) {
            if (degree_[a] + degree_[b] > kOrder) continue;
            for (int i = 0; i < n; ++i) sum[i] = static_cast<std::uint8_t>(monomials_[a][i] + monomials_[b][i]);
            prod_.push_back({a, b, index_of(sum)});
        }
    }
}

int JetTable::index_of(const std::vector<std::uint8_t>& mono) const {
    if (!by_key_.empty()) return by_key_[pack_key(mono)];
    for (int i = 0; i < size(); ++i)
        if (monomials_[i] == mono) return i;
    return -1;
}

const JetTable& JetTable::get(int n) {
    static std::mutex mu;
    static std::map<int, const JetTable*> tables;
    std::lock_guard<std::mutex> lock(mu);
    auto it = tables.find(n);
    if (it == tables.end()) it = tables.emplace(n, new JetTable(n)).first;
    return *it->second;
}

Jet4::Jet4(int n, double value) : n_(n), coeffs_(JetTable::get(n).size(), 0.0) { coeffs_[0] = value; }

const JetTable& Jet4::table() const { return JetTable::get(n_); }

std::vector<Jet4> Jet4::variables(std::span<const double> point) {
    const int n = static_cast<int>(point.size());
    if (n < 1) throw DimensionError("lift_variables: dimension must be >= 1");
    const JetTable& tab = JetTable::get(n);
    std::vector<Jet4> out;
    out.reserve(n);
    std::vector<std::uint8_t> mono(n, 0);
    for (int i = 0; i < n; ++i) {
        Jet4 j(n, point[i]);
        mono.assign(n, 0);
        mono[i] = 1;
        j.coeffs_[tab.index_of(mono)] = 1.0;
        out.push_back(std::move(j));
    }
    return out;
}

namespace {
void check_same_dim(const Jet4& a, const Jet4& b) {
    if (a.dim() != b.dim()) throw DimensionError("jet dimension mismatch");
}
}  // namespace

Jet4 Jet4::operator-() const {
    Jet4 r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
}

Jet4& Jet4::operator+=(const Jet4& o) {
    check_same_dim(*this, o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
}

Jet4& Jet4::operator-=(const Jet4& o) {
    check_same_dim(*this, o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
}

Jet4& Jet4::operator+=(double s) {
    coeffs_[0] += s;
    return *this;
}

Jet4& Jet4::operator-=(double s) {
    coeffs_[0] -= s;
    return *this;
}

Jet4& Jet4::operator*=(double s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
}

Jet4 operator/(Jet4 a, double s) {
    if (std::abs(s) < 1e-300) throw NumericalDomainError("div", s, "jet division by zero scalar");
    return a *= (1.0 / s);
}

Jet4 operator*(const Jet4& a, const Jet4& b) {
    check_same_dim(a, b);
    const JetTable& tab = a.table();
    Jet4 r(a.dim(), 0.0);
    auto& rc = r.coeffs();
    const auto& ac = a.coeffs();
    const auto& bc = b.coeffs();
    for (const auto& e : tab.product_table()) rc[e.target] += ac[e.a] * bc[e.b];
    return r;
}

namespace {

// Compose the degree-4 Taylor polynomial sum_k c[k] h^k with the nonconstant
// part h of `a` (Horner form). c[k] = f^(k)(value)/k!.
Jet4 compose(const Jet4& a, const std::array<double, 5>& c) {
    Jet4 h = a;
    h.coeffs()[0] = 0.0;
    Jet4 r(a.dim(), c[4]);
    for (int k = 3; k >= 0; --k) {
        r = r * h;
        r += c[k];
    }
    return r;
}

}  // namespace

Jet4 exp(const Jet4& a) {
    const double v = std::exp(a.value());
    return compose(a, {v, v, v / 2.0, v / 6.0, v / 24.0});
}

Jet4 log(const Jet4& a) {
    const double v = a.value();
    if (v <= kDomainMargin) throw NumericalDomainError("log", v, "log argument " + std::to_string(v) + " below domain margin");
    const double iv = 1.0 / v;
    const double iv2 = iv * iv;
    return compose(a, {std::log(v), iv, -iv2 / 2.0, iv2 * iv / 3.0, -iv2 * iv2 / 4.0});
}

Jet4 cosh(const Jet4& a) {
    const double c = std::cosh(a.value());
    const double s = std::sinh(a.value());
    return compose(a, {c, s, c / 2.0, s / 6.0, c / 24.0});
}

Jet4 sqrt(const Jet4& a) {
    const double v = a.value();
    if (v <= kDomainMargin) throw NumericalDomainError("sqrt", v, "sqrt argument " + std::to_string(v) + " below domain margin");
    const double r = std::sqrt(v);
    const double iv = 1.0 / v;
    // d^k sqrt: 1/2, -1/4, 3/8, -15/16 prefactors over k!
    return compose(a, {r, 0.5 * r * iv, -0.125 * r * iv * iv, 0.0625 * r * iv * iv * iv,
                       -0.0390625 * r * iv * iv * iv * iv});
}

Jet4 recip(const Jet4& a) {
    const double v = a.value();
    if (std::abs(v) < 1e-300) throw NumericalDomainError("div", v, "jet division by zero value");
    const double iv = 1.0 / v;
    const double iv2 = iv * iv;
    return compose(a, {iv, -iv2, iv2 * iv, -iv2 * iv2, iv2 * iv2 * iv});
}

Jet4 operator/(const Jet4& a, const Jet4& b) { return a * recip(b); }

Jet4 pow_const(const Jet4& a, double p) {
    // Integer exponents are valid on all of R (repeated multiplication);
    // fractional ones need a positive base with margin.
    const double ip = std::nearbyint(p);
    if (p == ip && std::abs(ip) <= 8) {
        const int e = static_cast<int>(ip);
        if (e == 0) return Jet4(a.dim(), 1.0);
        Jet4 base = e > 0 ? a : recip(a);
        Jet4 r = base;
        for (int k = 1; k < std::abs(e); ++k) r = r * base;
        return r;
    }
    const double v = a.value();
    if (v <= kDomainMargin)
        throw NumericalDomainError("pow_const", v, "fractional power of non-positive base " + std::to_string(v));
    std::array<double, 5> c;
    double coef = std::pow(v, p);
    c[0] = coef;
    double fall = 1.0;
    for (int k = 1; k <= 4; ++k) {
        fall *= (p - (k - 1)) / k;
        c[k] = fall * std::pow(v, p - k);
    }
    return compose(a, c);
}

const char* primitive_name(Primitive p) {
    switch (p) {
        case Primitive::Add: return "add";
        case Primitive::Sub: return "sub";
        case Primitive::Mul: return "mul";
        case Primitive::Div: return "div";
        case Primitive::PowConst: return "pow_const";
        case Primitive::Exp: return "exp";
        case Primitive::Log: return "log";
        case Primitive::Cosh: return "cosh";
        case Primitive::Sqrt: return "sqrt";
        case Primitive::Neg: return "neg";
    }
    return "?";
}

Jet4 apply_primitive(Primitive p, std::span<const Jet4> args, double exponent) {
    auto need = [&](std::size_t k) {
        if (args.size() != k)
            throw DimensionError(std::string(primitive_name(p)) + ": expected " + std::to_string(k) + " arguments");
    };
    switch (p) {
        case Primitive::Add: need(2); return args[0] + args[1];
        case Primitive::Sub: need(2); return args[0] - args[1];
        case Primitive::Mul: need(2); return args[0] * args[1];
        case Primitive::Div: need(2); return args[0] / args[1];
        case Primitive::PowConst: need(1); return pow_const(args[0], exponent);
        case Primitive::Exp: need(1); return exp(args[0]);
        case Primitive::Log: need(1); return log(args[0]);
        case Primitive::Cosh: need(1); return cosh(args[0]);
        case Primitive::Sqrt: need(1); return sqrt(args[0]);
        case Primitive::Neg: need(1); return -args[0];
    }
    throw Error("unknown primitive");
}

namespace {

// Ranks of non-decreasing index tuples via the combinatorial number system:
// map (t0 <= t1 <= ...) to the strictly increasing (t0, t1+1, t2+2, ...) and
// sum binomials. Gives a dense 0-based rank independent of n.
int rank2(int i, int j) { return i + j * (j + 1) / 2; }
int rank3(int i, int j, int k) { return rank2(i, j) + k * (k + 1) * (k + 2) / 6; }
int rank4(int i, int j, int k, int l) { return rank3(i, j, k) + l * (l + 1) * (l + 2) * (l + 3) / 24; }

}  // namespace

DerivBundle::DerivBundle(const Jet4& jet) : n_(jet.dim()) {
    const JetTable& tab = jet.table();
    const auto& c = jet.coeffs();
    value_ = c[0];
    grad_.assign(n_, 0.0);
    d2_.assign(static_cast<std::size_t>(n_) * (n_ + 1) / 2, 0.0);
    const std::size_t n3 = static_cast<std::size_t>(n_) * (n_ + 1) * (n_ + 2) / 6;
    const std::size_t n4 = n3 * (n_ + 3) / 4;
    d3_.assign(n3, 0.0);
    d4_.assign(n4, 0.0);

    std::vector<std::uint8_t> mono;
    for (int idx = 0; idx < tab.size(); ++idx) {
        const int deg = tab.degree(idx);
        if (deg == 0) continue;
        mono = tab.monomial(idx);
        // component value: J! * coeff
        double fact = 1.0;
        for (int v = 0; v < n_; ++v)
            for (int e = 2; e <= mono[v]; ++e) fact *= e;
        const double comp = fact * c[idx];
        // sorted index tuple of this monomial
        std::array<int, 4> t{};
        int m = 0;
        for (int v = 0; v < n_; ++v)
            for (int e = 0; e < mono[v]; ++e) t[m++] = v;
        if (deg == 1) {
            grad_[t[0]] = comp;
        } else if (deg == 2) {
            d2_[rank2(t[0], t[1])] = comp;
        } else if (deg == 3) {
            d3_[rank3(t[0], t[1], t[2])] = comp;
        } else {
            d4_[rank4(t[0], t[1], t[2], t[3])] = comp;
        }
    }
}

double DerivBundle::d2(int i, int j) const {
    if (i > j) std::swap(i, j);
    return d2_[rank2(i, j)];
}

double DerivBundle::d3(int i, int j, int k) const {
    std::array<int, 3> t{i, j, k};
    std::sort(t.begin(), t.end());
    return d3_[rank3(t[0], t[1], t[2])];
}

double DerivBundle::d4(int i, int j, int k, int l) const {
    std::array<int, 4> t{i, j, k, l};
    std::sort(t.begin(), t.end());
    return d4_[rank4(t[0], t[1], t[2], t[3])];
}

}  // namespace otg
