#include <doctest.h>

#include <cmath>

#include "otg/rng.hpp"
#include "support/oracles.hpp"

using namespace otg;

TEST_CASE("lifted variables carry unit first-order seeds") {
    const double p[] = {2.0};
    const auto jets = Jet4::variables(p);
    REQUIRE(jets.size() == 1);
    const auto& c = jets[0].coeffs();
    REQUIRE(c.size() == 5);
    CHECK(c[0] == 2.0);
    CHECK(c[1] == 1.0);
    CHECK(c[2] == 0.0);
    CHECK(c[3] == 0.0);
    CHECK(c[4] == 0.0);
}

TEST_CASE("sum of two lifted variables has gradient (1,1)") {
    const double p[] = {0.0, 0.0};
    const auto u = Jet4::variables(p);
    const DerivBundle b(u[0] + u[1]);
    CHECK(b.grad(0) == 1.0);
    CHECK(b.grad(1) == 1.0);
}

TEST_CASE("product rule on u1*u2") {
    const double p[] = {1.0, -1.0};
    const auto u = Jet4::variables(p);
    const DerivBundle b(u[0] * u[1]);
    CHECK(b.value() == -1.0);
    CHECK(b.grad(0) == -1.0);
    CHECK(b.grad(1) == 1.0);
    CHECK(b.d2(0, 1) == 1.0);
    CHECK(b.d2(0, 0) == 0.0);
}

TEST_CASE("exp Taylor coefficients at 0") {
    const double p[] = {0.0};
    const auto u = Jet4::variables(p);
    const auto e = exp(u[0]);
    const auto& c = e.coeffs();
    CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c[2] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(c[3] == doctest::Approx(1.0 / 6).epsilon(1e-15));
    CHECK(c[4] == doctest::Approx(1.0 / 24).epsilon(1e-15));
}

TEST_CASE("log(1+u) Taylor coefficients at 0") {
    const double p[] = {0.0};
    const auto u = Jet4::variables(p);
    const auto l = log(u[0] + 1.0);
    const auto& c = l.coeffs();
    CHECK(c[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(c[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c[2] == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(c[3] == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(c[4] == doctest::Approx(-0.25).epsilon(1e-15));
}

TEST_CASE("exp(u)*exp(-u) collapses to the constant 1") {
    const double p[] = {0.7};
    const auto u = Jet4::variables(p);
    const DerivBundle b(exp(u[0]) * exp(-u[0]));
    CHECK(b.value() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(b.d4(0, 0, 0, 0)) <= 1e-15);
}

TEST_CASE("derivative tensors of the quadratic potential") {
    const double p[] = {0.3, -1.1};
    const auto u = Jet4::variables(p);
    const Jet4 q = (u[0] * u[0] + u[1] * u[1]) * 0.5;
    const DerivBundle b(q);
    CHECK(b.d2(0, 0) == doctest::Approx(1.0));
    CHECK(b.d2(1, 1) == doctest::Approx(1.0));
    CHECK(b.d2(0, 1) == 0.0);
    CHECK(b.d3(0, 0, 0) == 0.0);
    CHECK(b.d4(0, 1, 0, 1) == 0.0);
}

TEST_CASE("multinomial gradient at the symmetric point") {
    const PotentialSpec spec = catalog("multinomial");
    const double p[] = {0.0, 0.0};
    const DerivBundle b = eval_bundle(spec, p);
    CHECK(b.grad(0) == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(b.grad(1) == doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("normal-half-plane Hessian at (0,-1)") {
    const PotentialSpec spec = catalog("normal-half-plane");
    const double p[] = {0.0, -1.0};
    const DerivBundle b = eval_bundle(spec, p);
    CHECK(b.d2(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(b.d2(1, 1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(b.d2(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("polynomial jets are exact to 1e-14") {
    // p(u) = 3 + u1 - 2 u2 + 0.5 u1^2 u2 - u1 u2^3 + 0.25 u1^4
    const double pt[] = {0.0, 0.0};
    const auto u = Jet4::variables(pt);
    const Jet4 poly = 3.0 + u[0] - 2.0 * u[1] + 0.5 * u[0] * u[0] * u[1] - u[0] * u[1] * u[1] * u[1] +
                      0.25 * u[0] * u[0] * u[0] * u[0];
    const DerivBundle b(poly);
    CHECK(b.value() == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(b.grad(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b.grad(1) == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(b.d3(0, 0, 1) == doctest::Approx(1.0).epsilon(1e-14));      // 0.5 u1^2 u2 -> 1
    CHECK(b.d4(0, 1, 1, 1) == doctest::Approx(-6.0).epsilon(1e-14));  // -u1 u2^3 -> -6
    CHECK(b.d4(0, 0, 0, 0) == doctest::Approx(6.0).epsilon(1e-14));   // 0.25 u1^4 -> 6
}

TEST_CASE("symmetry of d3/d4 is bitwise") {
    const PotentialSpec spec = catalog("normal-half-plane");
    const double p[] = {0.4, -0.9};
    const DerivBundle b = eval_bundle(spec, p);
    CHECK(b.d3(0, 1, 1) == b.d3(1, 0, 1));
    CHECK(b.d3(0, 1, 1) == b.d3(1, 1, 0));
    CHECK(b.d4(0, 0, 1, 1) == b.d4(1, 0, 1, 0));
    CHECK(b.d4(0, 1, 1, 1) == b.d4(1, 1, 1, 0));
}

TEST_CASE("jets match the finite-difference oracle on catalog potentials") {
    using testing::fd_partial;
    Rng rng(42);
    for (const auto& name : {"multinomial", "log-cosh", "normal-half-plane", "siegel-dual"}) {
        const PotentialSpec spec = catalog(name);
        testing::Fn f = [&](const std::vector<double>& x) { return eval_value(spec, x); };
        for (int trial = 0; trial < 5; ++trial) {
            const auto x = testing::random_box_point(rng, spec.sample_box);
            const DerivBundle b = eval_bundle(spec, x);
            for (int i = 0; i < spec.n; ++i) {
                CHECK(b.grad(i) == doctest::Approx(fd_partial(f, x, {i})).epsilon(1e-5));
                for (int j = i; j < spec.n; ++j) {
                    CHECK(b.d2(i, j) == doctest::Approx(fd_partial(f, x, {i, j})).epsilon(1e-5));
                    for (int k = j; k < spec.n; ++k) {
                        CHECK(b.d3(i, j, k) ==
                              doctest::Approx(fd_partial(f, x, {i, j, k})).epsilon(1e-5));
                        for (int l = k; l < spec.n; ++l)
                            CHECK(b.d4(i, j, k, l) ==
                                  doctest::Approx(fd_partial(f, x, {i, j, k, l})).epsilon(1e-5));
                    }
                }
            }
        }
    }
}

TEST_CASE("domain errors carry the primitive and value") {
    const double p[] = {-2.0};
    const auto u = Jet4::variables(p);
    CHECK_THROWS_AS((void)log(u[0]), NumericalDomainError);
    CHECK_THROWS_AS((void)sqrt(u[0]), NumericalDomainError);
    try {
        (void)log(u[0]);
    } catch (const NumericalDomainError& e) {
        CHECK(e.primitive == "log");
        CHECK(e.value == -2.0);
    }
    const Jet4 zero(1, 0.0);
    CHECK_THROWS_AS((void)(u[0] / zero), NumericalDomainError);
}

TEST_CASE("pow_const handles integer exponents on negative bases") {
    const double p[] = {-2.0};
    const auto u = Jet4::variables(p);
    CHECK(pow_const(u[0], 2.0).value() == doctest::Approx(4.0));
    CHECK(pow_const(u[0], -2.0).value() == doctest::Approx(0.25));
    CHECK(pow_const(u[0], 0.0).value() == doctest::Approx(1.0));
    CHECK_THROWS_AS((void)pow_const(u[0], 0.5), NumericalDomainError);
}

TEST_CASE("apply_primitive dispatch") {
    const double p[] = {0.3, 1.7};
    const auto u = Jet4::variables(p);
    const Jet4 s = apply_primitive(Primitive::Add, std::span<const Jet4>(u.data(), 2));
    CHECK(s.value() == doctest::Approx(2.0));
    CHECK_THROWS_AS((void)apply_primitive(Primitive::Exp, std::span<const Jet4>(u.data(), 2)),
                    DimensionError);
    const Jet4 pw = apply_primitive(Primitive::PowConst, std::span<const Jet4>(u.data() + 1, 1), 0.5);
    CHECK(pw.value() == doctest::Approx(std::sqrt(1.7)));
}

TEST_CASE("dimension errors") {
    CHECK_THROWS_AS((void)Jet4::variables(std::span<const double>()), DimensionError);
    const double a[] = {1.0};
    const double b2[] = {1.0, 2.0};
    const auto ja = Jet4::variables(a);
    const auto jb = Jet4::variables(b2);
    CHECK_THROWS_AS((void)(ja[0] + jb[0]), DimensionError);
}
