#include <doctest.h>

#include <cmath>

#include "otg/rng.hpp"
#include "support/oracles.hpp"

using namespace otg;

TEST_CASE("parse: multinomial expression") {
    const PotentialSpec spec = parse_potential("log(1 + exp(u1) + exp(u2))");
    CHECK(spec.n == 2);
    CHECK(spec.domain.kind == DomainPredicate::Kind::AllSpace);
    const double p[] = {0.0, 0.0};
    CHECK(eval_value(spec, p) == doctest::Approx(std::log(3.0)));
}

TEST_CASE("parse: where clause defines a strict-inequality domain") {
    const PotentialSpec spec = parse_potential("-u1^2/(4*u2) - 0.5*log(-2*u2) where -u2 > 0");
    CHECK(spec.n == 2);
    CHECK(spec.domain.kind == DomainPredicate::Kind::StrictExpr);
    const double inside[] = {0.0, -1.0};
    const double outside[] = {0.0, 0.5};
    CHECK(in_domain(spec, inside).ok);
    CHECK_FALSE(in_domain(spec, outside).ok);
    CHECK(eval_value(spec, inside) == doctest::Approx(-0.5 * std::log(2.0)));
}

TEST_CASE("parse: syntax error carries the offset") {
    try {
        (void)parse_potential("log(");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset == 4);
    }
    CHECK_THROWS_AS((void)parse_potential("sinh(u1)"), ParseError);
    CHECK_THROWS_AS((void)parse_potential("u0 + 1"), ParseError);
    CHECK_THROWS_AS((void)parse_potential("u1 + "), ParseError);
    CHECK_THROWS_AS((void)parse_potential("u1) "), ParseError);
}

TEST_CASE("unary minus binds looser than exponentiation") {
    const PotentialSpec spec = parse_potential("-u1^2");
    const double p[] = {3.0};
    CHECK(eval_value(spec, p) == doctest::Approx(-9.0));
}

TEST_CASE("catalog: quadratic") {
    const PotentialSpec spec = catalog("quadratic", {{"n", 2}});
    const double p[] = {3.0, -7.0};
    const DerivBundle b = eval_bundle(spec, p);
    CHECK(b.value() == doctest::Approx(29.0));
    CHECK(b.grad(0) == doctest::Approx(3.0));
    CHECK(b.grad(1) == doctest::Approx(-7.0));
    CHECK(b.d2(0, 0) == doctest::Approx(1.0));
    CHECK(b.d2(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("catalog: normal-half-plane matches the parsed example") {
    const PotentialSpec spec = catalog("normal-half-plane");
    const double p[] = {0.0, -1.0};
    const DerivBundle b = eval_bundle(spec, p);
    CHECK(b.value() == doctest::Approx(-0.5 * std::log(2.0)).epsilon(1e-14));
    CHECK(b.d2(0, 0) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(b.d2(1, 1) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("catalog: neg-multinomial domain") {
    const PotentialSpec spec = catalog("neg-multinomial", {{"n", 2}});
    const double inside[] = {-2.0, -2.0};
    const double outside[] = {0.0, 0.0};
    CHECK(in_domain(spec, inside).ok);
    const auto r = in_domain(spec, outside);
    CHECK_FALSE(r.ok);
    CHECK(r.reason == "domain-predicate");
}

TEST_CASE("catalog: parameter validation") {
    CHECK_THROWS_AS((void)catalog("power", {{"p", 1.5}}), Error);
    CHECK_THROWS_AS((void)catalog("power", {{"p", 0.0}}), Error);
    CHECK_THROWS_AS((void)catalog("no-such-potential"), Error);
    const PotentialSpec pw = catalog("power", {{"p", 0.3}});
    CHECK(pw.params.at("p") == 0.3);
}

TEST_CASE("in_domain margin reasons") {
    const PotentialSpec spec = catalog("siegel-dual");
    const double close[] = {1.0, 1.0000001};
    const auto r = in_domain(spec, close, 1e-3);
    CHECK_FALSE(r.ok);
    CHECK(r.reason == "margin");
    CHECK(r.predicate_slack == doctest::Approx(1e-7).epsilon(1e-3));
    const auto r0 = in_domain(spec, close, 0.0);
    CHECK(r0.ok);
}

TEST_CASE("in_domain reports the Hessian eigenvalue check") {
    // u1^4 is convex but its Hessian degenerates at the origin
    const PotentialSpec spec = parse_potential("u1^4");
    const double origin[] = {0.0};
    const auto r = in_domain(spec, origin);
    CHECK_FALSE(r.ok);
    CHECK(r.reason == "hessian-not-pd");
}

TEST_CASE("every catalog potential has a positive-definite Hessian on its box") {
    Rng rng(7);
    for (const auto& name : catalog_names()) {
        const PotentialSpec spec = catalog(name);
        for (int i = 0; i < 100; ++i) {
            const auto x = testing::random_box_point(rng, spec.sample_box);
            const auto r = in_domain(spec, x);
            CAPTURE(name);
            CHECK(r.ok);
            CHECK(r.min_eigenvalue > 1e-10);
        }
    }
}

TEST_CASE("parse(print(spec)) round-trips evaluation to 1e-14") {
    Rng rng(11);
    for (const auto& name : catalog_names()) {
        const PotentialSpec spec = catalog(name);
        const PotentialSpec reparsed = parse_potential(
            spec.domain.kind == DomainPredicate::Kind::StrictExpr
                ? spec.text() + " where " + print_expr(*spec.domain.expr) + " > 0"
                : spec.text());
        CHECK(reparsed.n == spec.n);
        for (int i = 0; i < 20; ++i) {
            const auto x = testing::random_box_point(rng, spec.sample_box);
            const DerivBundle a = eval_bundle(spec, x);
            const std::vector<Jet4> vars = Jet4::variables(x);
            const DerivBundle b(eval_jet(reparsed, vars));
            CHECK(a.value() == doctest::Approx(b.value()).epsilon(1e-14));
            for (int d = 0; d < spec.n; ++d) CHECK(a.grad(d) == doctest::Approx(b.grad(d)).epsilon(1e-14));
            CHECK(a.d4(0, 0, 0, 0) == doctest::Approx(b.d4(0, 0, 0, 0)).epsilon(1e-14));
        }
    }
}

TEST_CASE("raw cost expressions parse x/y variables") {
    const RawCostExpr rc = parse_raw_cost("(x1 - y1)^2 + (x2 - y2)^2");
    CHECK(rc.n == 2);
    const double vars[] = {1.0, 2.0, 0.5, 0.0};  // x=(1,2), y=(0.5,0)
    CHECK(eval_expr_value(*rc.expr, vars) == doctest::Approx(0.25 + 4.0));
    CHECK_THROWS_AS((void)parse_raw_cost("u1 + x1"), ParseError);
}

TEST_CASE("eval_bundle rejects out-of-domain points") {
    const PotentialSpec spec = catalog("normal-half-plane");
    const double p[] = {0.0, 0.5};
    CHECK_THROWS_AS((void)eval_bundle(spec, p), OutOfDomainError);
}
