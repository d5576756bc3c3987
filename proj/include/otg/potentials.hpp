#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otg/jets.hpp"

namespace otg {

// Expression trees over the jet primitives. Variables are u1..un for
// potentials; the raw-cost parse mode additionally accepts x1..xn / y1..yn
// (mapped to slots 0..n-1 and n..2n-1).
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Num, Var, Add, Sub, Mul, Div, Pow, Neg, Fn };
    Kind kind;
    double num = 0.0;     // Num: literal; Pow: exponent
    int var = -1;         // Var: 0-based slot
    Primitive fn = Primitive::Exp;  // Fn
    ExprPtr a, b;
};

Jet4 eval_expr(const Expr& e, std::span<const Jet4> vars);
double eval_expr_value(const Expr& e, std::span<const double> vars);  // plain doubles, no jets
std::string print_expr(const Expr& e);

// Open domain condition with a uniform margin shrink. HalfSpace holds where
// coeffs.u < bound (slack measured in Euclidean distance); StrictExpr where
// expr > 0 (slack = expression value); Box inside the closed coordinate box.
struct DomainPredicate {
    enum class Kind { AllSpace, HalfSpace, StrictExpr, Box };
    Kind kind = Kind::AllSpace;
    std::vector<double> coeffs;
    double bound = 0.0;
    ExprPtr expr;
    std::vector<std::pair<double, double>> box;

    // slack > margin means "inside with margin"; AllSpace returns +inf.
    double slack(std::span<const double> point) const;
    std::string describe() const;
};

struct InDomainResult {
    bool ok = false;
    std::string reason;      // "domain-predicate", "margin", "hessian-not-pd", or empty
    double predicate_slack = 0.0;
    double min_eigenvalue = 0.0;
};

struct PotentialSpec {
    std::string name;  // catalog name, or "expr"
    int n = 0;
    ExprPtr expr;
    DomainPredicate domain;
    std::map<std::string, double> params;
    // Documented in-domain sampling box used by tests and certification.
    std::vector<std::pair<double, double>> sample_box;

    std::string text() const { return print_expr(*expr); }
};

// Grammar (see module docs): expr/term/factor/unary/atom with functions
// exp|log|cosh|sqrt, vars u<digits>, optional "where <expr> > 0" clause.
PotentialSpec parse_potential(const std::string& text);

// Raw two-point expression over x1..xn, y1..yn; returns the tree and n.
struct RawCostExpr {
    ExprPtr expr;
    int n = 0;
};
RawCostExpr parse_raw_cost(const std::string& text);

// Catalog of every potential appearing in the paper. Names: quadratic,
// normal-half-plane, siegel-dual, siegel-quartic, multinomial,
// neg-multinomial, power, log-cosh.
PotentialSpec catalog(const std::string& name, const std::map<std::string, double>& params = {});
std::vector<std::string> catalog_names();

double eval_value(const PotentialSpec& spec, std::span<const double> point);
Jet4 eval_jet(const PotentialSpec& spec, std::span<const Jet4> args);
DerivBundle eval_bundle(const PotentialSpec& spec, std::span<const double> point);

// Predicate with margin plus positive-definiteness of the Hessian
// (min eigenvalue > 1e-10) at the point.
InDomainResult in_domain(const PotentialSpec& spec, std::span<const double> point, double margin = 0.0);
void require_in_domain(const PotentialSpec& spec, std::span<const double> point, double margin = 0.0);

}  // namespace otg
