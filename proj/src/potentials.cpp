#include "otg/potentials.hpp"

#include <Eigen/Dense>
#include <cctype>
#include <cmath>
#include <sstream>

namespace otg {

namespace {

ExprPtr mk_num(double v) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Num;
    e->num = v;
    return e;
}

ExprPtr mk_var(int slot) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Var;
    e->var = slot;
    return e;
}

ExprPtr mk_bin(Expr::Kind k, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}

ExprPtr mk_pow(ExprPtr a, double p) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Pow;
    e->a = std::move(a);
    e->num = p;
    return e;
}

ExprPtr mk_neg(ExprPtr a) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Neg;
    e->a = std::move(a);
    return e;
}

ExprPtr mk_fn(Primitive fn, ExprPtr a) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Fn;
    e->fn = fn;
    e->a = std::move(a);
    return e;
}

}  // namespace

template <typename T>
static T eval_generic(const Expr& e, std::span<const T> vars);

template <>
Jet4 eval_generic<Jet4>(const Expr& e, std::span<const Jet4> vars) {
    switch (e.kind) {
        // constants adopt the jet dimension of the arguments (which can exceed
        // the variable count, e.g. z = x - y arguments living in 2n variables)
        case Expr::Kind::Num: return Jet4(vars.empty() ? 1 : vars.front().dim(), e.num);
        case Expr::Kind::Var:
            if (e.var >= static_cast<int>(vars.size())) throw DimensionError("expression variable index out of range");
            return vars[e.var];
        case Expr::Kind::Add: return eval_generic<Jet4>(*e.a, vars) + eval_generic<Jet4>(*e.b, vars);
        case Expr::Kind::Sub: return eval_generic<Jet4>(*e.a, vars) - eval_generic<Jet4>(*e.b, vars);
        case Expr::Kind::Mul: return eval_generic<Jet4>(*e.a, vars) * eval_generic<Jet4>(*e.b, vars);
        case Expr::Kind::Div: return eval_generic<Jet4>(*e.a, vars) / eval_generic<Jet4>(*e.b, vars);
        case Expr::Kind::Pow: return pow_const(eval_generic<Jet4>(*e.a, vars), e.num);
        case Expr::Kind::Neg: return -eval_generic<Jet4>(*e.a, vars);
        case Expr::Kind::Fn: {
            const Jet4 arg = eval_generic<Jet4>(*e.a, vars);
            return apply_primitive(e.fn, std::span<const Jet4>(&arg, 1));
        }
    }
    throw Error("bad expression node");
}

template <>
double eval_generic<double>(const Expr& e, std::span<const double> vars) {
    switch (e.kind) {
        case Expr::Kind::Num: return e.num;
        case Expr::Kind::Var:
            if (e.var >= static_cast<int>(vars.size())) throw DimensionError("expression variable index out of range");
            return vars[e.var];
        case Expr::Kind::Add: return eval_generic<double>(*e.a, vars) + eval_generic<double>(*e.b, vars);
        case Expr::Kind::Sub: return eval_generic<double>(*e.a, vars) - eval_generic<double>(*e.b, vars);
        case Expr::Kind::Mul: return eval_generic<double>(*e.a, vars) * eval_generic<double>(*e.b, vars);
        case Expr::Kind::Div: {
            const double d = eval_generic<double>(*e.b, vars);
            if (std::abs(d) < 1e-300) throw NumericalDomainError("div", d, "division by zero in expression");
            return eval_generic<double>(*e.a, vars) / d;
        }
        case Expr::Kind::Pow: {
            const double b = eval_generic<double>(*e.a, vars);
            if (e.num != std::nearbyint(e.num) && b <= 1e-12)
                throw NumericalDomainError("pow_const", b, "fractional power of non-positive base");
            return std::pow(b, e.num);
        }
        case Expr::Kind::Neg: return -eval_generic<double>(*e.a, vars);
        case Expr::Kind::Fn: {
            const double a = eval_generic<double>(*e.a, vars);
            switch (e.fn) {
                case Primitive::Exp: return std::exp(a);
                case Primitive::Log:
                    if (a <= 1e-12) throw NumericalDomainError("log", a, "log argument below domain margin");
                    return std::log(a);
                case Primitive::Cosh: return std::cosh(a);
                case Primitive::Sqrt:
                    if (a <= 1e-12) throw NumericalDomainError("sqrt", a, "sqrt argument below domain margin");
                    return std::sqrt(a);
                default: throw Error("bad function node");
            }
        }
    }
    throw Error("bad expression node");
}

Jet4 eval_expr(const Expr& e, std::span<const Jet4> vars) { return eval_generic<Jet4>(e, vars); }
double eval_expr_value(const Expr& e, std::span<const double> vars) { return eval_generic<double>(e, vars); }

namespace {

std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

int precedence(Expr::Kind k) {
    switch (k) {
        case Expr::Kind::Add:
        case Expr::Kind::Sub: return 1;
        case Expr::Kind::Mul:
        case Expr::Kind::Div: return 2;
        case Expr::Kind::Neg: return 3;
        case Expr::Kind::Pow: return 4;
        default: return 5;
    }
}

void print_rec(const Expr& e, std::ostringstream& os, int parent_prec, bool rhs) {
    const int prec = precedence(e.kind);
    const bool paren = prec < parent_prec || (prec == parent_prec && rhs && prec <= 2);
    if (paren) os << "(";
    switch (e.kind) {
        case Expr::Kind::Num: os << fmt_num(e.num); break;
        case Expr::Kind::Var: os << "u" << (e.var + 1); break;
        case Expr::Kind::Add:
            print_rec(*e.a, os, prec, false);
            os << " + ";
            print_rec(*e.b, os, prec, true);
            break;
        case Expr::Kind::Sub:
            print_rec(*e.a, os, prec, false);
            os << " - ";
            print_rec(*e.b, os, prec, true);
            break;
        case Expr::Kind::Mul:
            print_rec(*e.a, os, prec, false);
            os << "*";
            print_rec(*e.b, os, prec, true);
            break;
        case Expr::Kind::Div:
            print_rec(*e.a, os, prec, false);
            os << "/";
            print_rec(*e.b, os, prec, true);
            break;
        case Expr::Kind::Pow:
            print_rec(*e.a, os, prec + 1, false);
            os << "^" << fmt_num(e.num);
            break;
        case Expr::Kind::Neg:
            os << "-";
            print_rec(*e.a, os, prec, true);
            break;
        case Expr::Kind::Fn:
            switch (e.fn) {
                case Primitive::Exp: os << "exp"; break;
                case Primitive::Log: os << "log"; break;
                case Primitive::Cosh: os << "cosh"; break;
                case Primitive::Sqrt: os << "sqrt"; break;
                default: os << "?";
            }
            os << "(";
            print_rec(*e.a, os, 0, false);
            os << ")";
            break;
    }
    if (paren) os << ")";
}

}  // namespace

std::string print_expr(const Expr& e) {
    std::ostringstream os;
    print_rec(e, os, 0, false);
    return os.str();
}

// ---------------------------------------------------------------------------
// Recursive-descent parser for the module grammar.
// ---------------------------------------------------------------------------

namespace {

struct Parser {
    std::string_view text;
    std::size_t pos = 0;
    bool raw_mode = false;  // accept x<k>/y<k> variables
    int max_u = 0, max_xy = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool peek(char c) {
        skip_ws();
        return pos < text.size() && text[pos] == c;
    }
    bool accept(char c) {
        if (peek(c)) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos);
    }
    bool accept_word(std::string_view w) {
        skip_ws();
        if (text.substr(pos, w.size()) == w) {
            // keywords must not run into an identifier tail
            const std::size_t after = pos + w.size();
            if (after < text.size() && (std::isalnum(static_cast<unsigned char>(text[after])))) return false;
            pos += w.size();
            return true;
        }
        return false;
    }

    double number() {
        skip_ws();
        const char* begin = text.data() + pos;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) throw ParseError("expected number", pos);
        pos += static_cast<std::size_t>(end - begin);
        return v;
    }

    ExprPtr expr() {
        ExprPtr e = term();
        while (true) {
            if (accept('+'))
                e = mk_bin(Expr::Kind::Add, e, term());
            else if (accept('-'))
                e = mk_bin(Expr::Kind::Sub, e, term());
            else
                return e;
        }
    }

    ExprPtr term() {
        ExprPtr e = factor();
        while (true) {
            if (accept('*'))
                e = mk_bin(Expr::Kind::Mul, e, factor());
            else if (accept('/'))
                e = mk_bin(Expr::Kind::Div, e, factor());
            else
                return e;
        }
    }

    // '^' binds tighter than unary minus, so "-u1^2" means -(u1^2); this is
    // what the catalog expressions and the worked examples require.
    ExprPtr factor() {
        if (accept('-')) return mk_neg(factor());
        ExprPtr e = atom();
        if (accept('^')) {
            bool neg = accept('-');
            double p = number();
            return mk_pow(e, neg ? -p : p);
        }
        return e;
    }

    ExprPtr atom() {
        skip_ws();
        if (pos >= text.size()) throw ParseError("unexpected end of input", pos);
        const char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return mk_num(number());
        if (c == '(') {
            ++pos;
            ExprPtr e = expr();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos;
            std::size_t end = pos;
            while (end < text.size() && std::isalpha(static_cast<unsigned char>(text[end]))) ++end;
            const std::string_view word = text.substr(start, end - start);
            if (word == "exp" || word == "log" || word == "cosh" || word == "sqrt") {
                pos = end;
                expect('(');
                ExprPtr inner = expr();
                expect(')');
                Primitive fn = word == "exp"   ? Primitive::Exp
                               : word == "log" ? Primitive::Log
                               : word == "cosh" ? Primitive::Cosh
                                                : Primitive::Sqrt;
                return mk_fn(fn, inner);
            }
            if (word == "u" || (raw_mode && (word == "x" || word == "y"))) {
                pos = end;
                return variable(word[0]);
            }
            throw ParseError("unknown function name '" + std::string(word) + "'", start);
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos);
    }

    ExprPtr variable(char head) {
        skip_ws();
        const std::size_t start = pos;
        std::size_t end = pos;
        while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
        if (end == start) throw ParseError("variable needs an index", start);
        const int idx = std::stoi(std::string(text.substr(start, end - start)));
        if (idx == 0) throw ParseError("variable index 0 is invalid (indices start at 1)", start);
        pos = end;
        if (head == 'u') {
            max_u = std::max(max_u, idx);
            return mk_var(idx - 1);
        }
        max_xy = std::max(max_xy, idx);
        // x_k -> slot k-1, y_k -> slot n + k - 1; resolved after parse since n
        // is the highest index mentioned. Encode provisionally.
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::Var;
        e->var = (head == 'x') ? (idx - 1) : -(idx);  // negative marks y-vars
        return e;
    }

    void done() {
        skip_ws();
        if (pos != text.size()) throw ParseError("trailing input", pos);
    }
};

// Rewrites provisional y-variable slots once n is known.
ExprPtr fix_raw_vars(const ExprPtr& e, int n) {
    if (!e) return e;
    auto c = std::make_shared<Expr>(*e);
    if (c->kind == Expr::Kind::Var && c->var < 0) c->var = n + (-c->var) - 1;
    c->a = fix_raw_vars(e->a, n);
    c->b = fix_raw_vars(e->b, n);
    return c;
}

}  // namespace

PotentialSpec parse_potential(const std::string& text) {
    Parser p{text};
    ExprPtr body = p.expr();
    ExprPtr dom;
    if (p.accept_word("where")) {
        dom = p.expr();
        p.expect('>');
        p.skip_ws();
        const double zero = p.number();
        if (zero != 0.0) throw ParseError("where clause must compare against 0", p.pos);
    }
    p.done();
    PotentialSpec spec;
    spec.name = "expr";
    spec.n = std::max(1, p.max_u);
    spec.expr = body;
    if (dom) {
        spec.domain.kind = DomainPredicate::Kind::StrictExpr;
        spec.domain.expr = dom;
    }
    spec.sample_box.assign(spec.n, {-1.0, 1.0});
    return spec;
}

RawCostExpr parse_raw_cost(const std::string& text) {
    Parser p{text};
    p.raw_mode = true;
    ExprPtr body = p.expr();
    p.done();
    if (p.max_u > 0) throw ParseError("raw costs use x/y variables, not u", 0);
    RawCostExpr rc;
    rc.n = std::max(1, p.max_xy);
    rc.expr = fix_raw_vars(body, rc.n);
    return rc;
}

// ---------------------------------------------------------------------------
// Domain predicates
// ---------------------------------------------------------------------------

double DomainPredicate::slack(std::span<const double> point) const {
    switch (kind) {
        case Kind::AllSpace: return std::numeric_limits<double>::infinity();
        case Kind::HalfSpace: {
            double dot = 0.0, norm2 = 0.0;
            for (std::size_t i = 0; i < coeffs.size(); ++i) {
                dot += coeffs[i] * point[i];
                norm2 += coeffs[i] * coeffs[i];
            }
            return (bound - dot) / std::sqrt(norm2);
        }
        case Kind::StrictExpr: return eval_expr_value(*expr, point);
        case Kind::Box: {
            double s = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < box.size(); ++i) {
                s = std::min(s, point[i] - box[i].first);
                s = std::min(s, box[i].second - point[i]);
            }
            return s;
        }
    }
    return 0.0;
}

std::string DomainPredicate::describe() const {
    switch (kind) {
        case Kind::AllSpace: return "all-space";
        case Kind::HalfSpace: return "half-space";
        case Kind::StrictExpr: return print_expr(*expr) + " > 0";
        case Kind::Box: return "box";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

namespace {

int param_n(const std::map<std::string, double>& params, int dflt) {
    auto it = params.find("n");
    if (it == params.end()) return dflt;
    const double v = it->second;
    if (v < 1 || v != std::nearbyint(v)) throw Error("catalog parameter n must be a positive integer");
    return static_cast<int>(v);
}

std::string usum(const char* fn, int n, const char* sep_prefix) {
    std::ostringstream os;
    for (int i = 1; i <= n; ++i) {
        if (i > 1) os << sep_prefix;
        os << fn << "(u" << i << ")";
    }
    return os.str();
}

}  // namespace

std::vector<std::string> catalog_names() {
    return {"quadratic",       "normal-half-plane", "siegel-dual", "siegel-quartic",
            "multinomial",     "neg-multinomial",   "power",       "log-cosh"};
}

PotentialSpec catalog(const std::string& name, const std::map<std::string, double>& params) {
    PotentialSpec spec;
    if (name == "quadratic") {
        const int n = param_n(params, 2);
        std::ostringstream os;
        os << "0.5*(";
        for (int i = 1; i <= n; ++i) os << (i > 1 ? " + " : "") << "u" << i << "^2";
        os << ")";
        spec = parse_potential(os.str());
        spec.n = n;
        spec.sample_box.assign(n, {-2.0, 2.0});
    } else if (name == "normal-half-plane") {
        spec = parse_potential("-u1^2/(4*u2) - 0.5*log(-2*u2) where -u2 > 0");
        spec.sample_box = {{-1.0, 1.0}, {-2.0, -0.5}};
    } else if (name == "siegel-dual") {
        spec = parse_potential("-0.5 - log(u2 - u1^2) where u2 - u1^2 > 0");
        spec.sample_box = {{-0.8, 0.8}, {1.0, 2.5}};
    } else if (name == "siegel-quartic") {
        spec = parse_potential("-0.5 - log(u2 - u1^4) where u2 - u1^4 > 0");
        // the Hessian of -log(u2 - u1^4) degenerates on the u1 = 0 axis, so
        // the box keeps to one side of it (and >= 0.1 from the boundary)
        spec.sample_box = {{0.3, 0.9}, {0.8, 2.0}};
    } else if (name == "multinomial") {
        const int n = param_n(params, 2);
        spec = parse_potential("log(1 + " + usum("exp", n, " + ") + ")");
        spec.n = n;
        spec.sample_box.assign(n, {-2.0, 2.0});
    } else if (name == "neg-multinomial") {
        const int n = param_n(params, 2);
        const std::string sum = usum("exp", n, " - ");
        spec = parse_potential("-log(1 - " + sum + ") where 1 - " + sum + " > 0");
        spec.n = n;
        spec.sample_box.assign(n, {-3.0, -1.0});
    } else if (name == "power") {
        double p = 0.5;
        if (auto it = params.find("p"); it != params.end()) p = it->second;
        if (!(p > 0.0 && p < 1.0)) throw Error("power potential needs p in (0,1), got " + std::to_string(p));
        spec = parse_potential("(exp(u1) + exp(u2))^" + fmt_num(p));
        spec.params["p"] = p;
        spec.sample_box = {{-1.0, 1.0}, {-1.0, 1.0}};
    } else if (name == "log-cosh") {
        spec = parse_potential("log(cosh(u1) + cosh(u2))");
        spec.sample_box = {{-2.0, 2.0}, {-2.0, 2.0}};
    } else {
        throw Error("unknown catalog potential '" + name + "'");
    }
    spec.name = name;
    for (const auto& [k, v] : params) spec.params[k] = v;
    return spec;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

double eval_value(const PotentialSpec& spec, std::span<const double> point) {
    return eval_expr_value(*spec.expr, point);
}

Jet4 eval_jet(const PotentialSpec& spec, std::span<const Jet4> args) { return eval_expr(*spec.expr, args); }

DerivBundle eval_bundle(const PotentialSpec& spec, std::span<const double> point) {
    require_in_domain(spec, point);
    const std::vector<Jet4> vars = Jet4::variables(point);
    return DerivBundle(eval_expr(*spec.expr, vars));
}

InDomainResult in_domain(const PotentialSpec& spec, std::span<const double> point, double margin) {
    InDomainResult r;
    if (static_cast<int>(point.size()) != spec.n) throw DimensionError("point dimension does not match potential");
    double slack;
    try {
        slack = spec.domain.slack(point);
    } catch (const NumericalDomainError&) {
        r.reason = "domain-predicate";
        r.predicate_slack = -std::numeric_limits<double>::infinity();
        return r;
    }
    r.predicate_slack = slack;
    if (!(slack > 0.0)) {
        r.reason = "domain-predicate";
        return r;
    }
    if (!(slack > margin)) {
        r.reason = "margin";
        return r;
    }
    // Hessian positive-definiteness, checked rather than assumed.
    try {
        const std::vector<Jet4> vars = Jet4::variables(point);
        const DerivBundle b(eval_expr(*spec.expr, vars));
        Eigen::MatrixXd H(spec.n, spec.n);
        for (int i = 0; i < spec.n; ++i)
            for (int j = 0; j < spec.n; ++j) H(i, j) = b.d2(i, j);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
        r.min_eigenvalue = es.eigenvalues().minCoeff();
    } catch (const NumericalDomainError&) {
        r.reason = "hessian-not-pd";
        return r;
    }
    if (!(r.min_eigenvalue > 1e-10)) {
        r.reason = "hessian-not-pd";
        return r;
    }
    r.ok = true;
    return r;
}

void require_in_domain(const PotentialSpec& spec, std::span<const double> point, double margin) {
    const InDomainResult r = in_domain(spec, point, margin);
    if (!r.ok) {
        std::ostringstream os;
        os << "point out of domain of " << spec.name << " (" << r.reason
           << ", predicate slack " << r.predicate_slack << ")";
        throw OutOfDomainError(os.str());
    }
}

}  // namespace otg
