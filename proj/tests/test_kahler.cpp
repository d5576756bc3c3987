#include <doctest.h>

#include <cmath>

#include "otg/kahler.hpp"
#include "otg/rng.hpp"
#include "support/oracles.hpp"

using namespace otg;

namespace {

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

Vec random_unit2(Rng& rng) {
    const auto v = rng.unit_vector(2);
    return vec2(v[0], v[1]);
}

// closed forms for the normal-half-plane catalog entry (oracle-verified)
double nhp_oa(double u1, double u2, double a) {
    const double q = a * u1 - u2;
    return 6.0 * a * a * q * q / (u2 * u2);
}
double nhp_hs(double u1, double u2, double a) {
    return 2.0 - 4.0 * std::pow(a, 4) + a * a * (-8.0 + 6.0 * u1 * u1 / (u2 * u2)) - 12.0 * a * u1 / u2;
}

}  // namespace

TEST_CASE("quadratic: every curvature block vanishes") {
    const PotentialSpec spec = catalog("quadratic");
    const double p[] = {0.7, -0.2};
    const KahlerCurvPoint K = kahler_curvature(spec, p);
    CHECK(K.hh.max_abs() == 0.0);
    CHECK(K.hv.max_abs() == 0.0);
    CHECK(K.mixed.max_abs() == 0.0);
    CHECK(anti_bisectional(K, vec2(1, 2), vec2(-3, 1)) == 0.0);
    CHECK(bisectional(K, vec2(1, 2), vec2(-3, 1)) == 0.0);
    CHECK(holomorphic_sectional(K, vec2(1, 2)) == 0.0);
}

TEST_CASE("block identity: mixed = hv - hh to 1e-12") {
    Rng rng(31);
    for (const auto& name : catalog_names()) {
        const PotentialSpec spec = catalog(name);
        const auto x = testing::random_box_point(rng, spec.sample_box);
        const KahlerCurvPoint K = kahler_curvature(spec, x);
        const double scale = std::max({K.hv.max_abs(), K.hh.max_abs(), 1.0});
        for (int i = 0; i < spec.n; ++i)
            for (int j = 0; j < spec.n; ++j)
                for (int k = 0; k < spec.n; ++k)
                    for (int l = 0; l < spec.n; ++l)
                        CHECK(std::abs(K.mixed.at(i, j, k, l) -
                                       (K.hv.at(i, j, k, l) - K.hh.at(i, j, k, l))) <= 1e-12 * scale);
    }
}

TEST_CASE("hv and mixed carry their structural symmetries") {
    Rng rng(37);
    for (const auto& name : {"normal-half-plane", "multinomial", "log-cosh", "power"}) {
        const PotentialSpec spec = catalog(name);
        const auto x = testing::random_box_point(rng, spec.sample_box);
        const KahlerCurvPoint K = kahler_curvature(spec, x);
        const double scale = std::max(K.hv.max_abs(), 1e-30);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    for (int l = 0; l < 2; ++l) {
                        // pair exchange and first-pair swap hold for hv
                        CHECK(std::abs(K.hv.at(i, j, k, l) - K.hv.at(k, l, i, j)) <= 1e-10 * scale);
                        CHECK(std::abs(K.hv.at(i, j, k, l) - K.hv.at(j, i, l, k)) <= 1e-10 * scale);
                        // the holomorphic-frame block is symmetric in i<->k and j<->l
                        CHECK(std::abs(K.mixed.at(i, j, k, l) - K.mixed.at(k, j, i, l)) <= 1e-10 * scale);
                        CHECK(std::abs(K.mixed.at(i, j, k, l) - K.mixed.at(i, l, k, j)) <= 1e-10 * scale);
                    }
    }
}

TEST_CASE("hh inherits the Riemann symmetries") {
    const PotentialSpec spec = catalog("normal-half-plane");
    const double p[] = {0.5, -1.4};
    const KahlerCurvPoint K = kahler_curvature(spec, p);
    const double scale = std::max(K.hh.max_abs(), 1e-30);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) {
                    CHECK(std::abs(K.hh.at(i, j, k, l) + K.hh.at(j, i, k, l)) <= 1e-10 * scale);
                    CHECK(std::abs(K.hh.at(i, j, k, l) - K.hh.at(k, l, i, j)) <= 1e-10 * scale);
                }
}

TEST_CASE("Example pair: orthogonal anti-bisectional at (0,-1), a=1 equals 6") {
    const PotentialSpec spec = catalog("normal-half-plane");
    const double p[] = {0.0, -1.0};
    const KahlerCurvPoint K = kahler_curvature(spec, p);
    const double a = 1.0;
    const Vec xi = vec2(1.0, a);
    const Vec eta = vec2(a, -1.0);
    CHECK(orthogonal_anti_bisectional(K, xi, eta) == doctest::Approx(6.0).epsilon(1e-10));
}

TEST_CASE("normal-half-plane closed forms across the box") {
    const PotentialSpec spec = catalog("normal-half-plane");
    Rng rng(41);
    for (int t = 0; t < 50; ++t) {
        const double u1 = rng.uniform(-1.0, 1.0);
        const double u2 = rng.uniform(-2.0, -0.1 - 1e-9);
        const double a = rng.uniform(-2.0, 2.0);
        const std::vector<double> p = {u1, u2};
        const KahlerCurvPoint K = kahler_curvature(spec, p);
        const double oa = orthogonal_anti_bisectional(K, vec2(1.0, a), vec2(a, -1.0));
        const double expected_oa = nhp_oa(u1, u2, a);
        CHECK(oa == doctest::Approx(expected_oa).epsilon(1e-9).scale(1.0));
        const double hs = holomorphic_sectional(K, vec2(1.0, a));
        CHECK(hs == doctest::Approx(nhp_hs(u1, u2, a)).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("orthogonality precondition is enforced") {
    const PotentialSpec spec = catalog("normal-half-plane");
    const double p[] = {0.0, -1.0};
    const KahlerCurvPoint K = kahler_curvature(spec, p);
    CHECK_THROWS_AS((void)orthogonal_anti_bisectional(K, vec2(1, 0), vec2(1, 0)), Error);
    CHECK_THROWS_AS((void)anti_bisectional(K, vec2(0, 0), vec2(1, 0)), DimensionError);
}

TEST_CASE("constant-curvature family closed forms") {
    Rng rng(43);
    struct Entry {
        const char* name;
        double coeff;  // anti-bisectional = coeff * eta(xi)^2
    };
    for (const Entry& e : {Entry{"multinomial", 2.0}, Entry{"neg-multinomial", -2.0}, Entry{"siegel-dual", -2.0}}) {
        const PotentialSpec spec = catalog(e.name);
        for (int t = 0; t < 30; ++t) {
            const auto x = testing::random_box_point(rng, spec.sample_box);
            const KahlerCurvPoint K = kahler_curvature(spec, x);
            const Vec xi = random_unit2(rng);
            const Vec eta = random_unit2(rng);
            const double pairing = eta.dot(xi);
            CAPTURE(e.name);
            CHECK(anti_bisectional(K, xi, eta) ==
                  doctest::Approx(e.coeff * pairing * pairing).epsilon(1e-9).scale(1.0));
        }
    }
}

TEST_CASE("orthogonal anti-bisectional vanishes on the space forms") {
    Rng rng(47);
    for (const auto& name : {"multinomial", "neg-multinomial", "siegel-dual"}) {
        const PotentialSpec spec = catalog(name);
        for (int t = 0; t < 50; ++t) {
            const auto x = testing::random_box_point(rng, spec.sample_box);
            const KahlerCurvPoint K = kahler_curvature(spec, x);
            const Vec xi = random_unit2(rng);
            Vec eta = random_unit2(rng);
            eta -= (eta.dot(xi)) * xi;  // Euclidean-orthogonal pairing
            if (eta.norm() < 1e-8) continue;
            eta.normalize();
            CHECK(std::abs(orthogonal_anti_bisectional(K, xi, eta)) <= 1e-9);
        }
    }
}

TEST_CASE("holomorphic sectional curvature is constant on the space forms") {
    Rng rng(53);
    struct Entry {
        const char* name;
        double value;
    };
    for (const Entry& e : {Entry{"multinomial", 2.0}, Entry{"siegel-dual", -2.0}, Entry{"neg-multinomial", -2.0}}) {
        const PotentialSpec spec = catalog(e.name);
        for (int t = 0; t < 20; ++t) {
            const auto x = testing::random_box_point(rng, spec.sample_box);
            const KahlerCurvPoint K = kahler_curvature(spec, x);
            const Vec xi = random_unit2(rng);
            CAPTURE(e.name);
            CHECK(holomorphic_sectional(K, xi) == doctest::Approx(e.value).epsilon(1e-9));
        }
    }
}

TEST_CASE("log-cosh: flat base, anti-bisectional = bisectional = closed form") {
    const PotentialSpec spec = catalog("log-cosh");
    Rng rng(59);
    for (int t = 0; t < 30; ++t) {
        const auto x = testing::random_box_point(rng, spec.sample_box);
        const KahlerCurvPoint K = kahler_curvature(spec, x);
        CHECK(K.hh.max_abs() <= 1e-12);  // the base Hessian metric is flat
        const Vec xi = vec2(rng.uniform(-2, 2), rng.uniform(-2, 2));
        const Vec eta = vec2(rng.uniform(-2, 2), rng.uniform(-2, 2));
        if (xi.norm() < 1e-3 || eta.norm() < 1e-3) continue;
        const double expect = xi.squaredNorm() * eta.squaredNorm() + 4 * xi(0) * xi(1) * eta(0) * eta(1);
        CHECK(anti_bisectional(K, xi, eta) == doctest::Approx(expect).epsilon(1e-9).scale(1.0));
        CHECK(bisectional(K, xi, eta) == doctest::Approx(expect).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("log-cosh curvature is position-independent") {
    const PotentialSpec spec = catalog("log-cosh");
    Rng rng(61);
    const Vec xi = vec2(0.8, -0.4);
    const Vec eta = vec2(0.3, 1.1);
    const double p0[] = {0.0, 0.0};
    const double ref_a = anti_bisectional(kahler_curvature(spec, p0), xi, eta);
    const double ref_h = bisectional(kahler_curvature(spec, p0), xi, eta);
    for (int t = 0; t < 50; ++t) {
        const auto x = testing::random_box_point(rng, spec.sample_box);
        const KahlerCurvPoint K = kahler_curvature(spec, x);
        CHECK(anti_bisectional(K, xi, eta) == doctest::Approx(ref_a).epsilon(1e-9));
        CHECK(bisectional(K, xi, eta) == doctest::Approx(ref_h).epsilon(1e-9));
    }
}

TEST_CASE("multinomial bisectional curvature is non-negative") {
    const PotentialSpec spec = catalog("multinomial");
    Rng rng(67);
    for (int t = 0; t < 500; ++t) {
        const auto x = testing::random_box_point(rng, spec.sample_box);
        const KahlerCurvPoint K = kahler_curvature(spec, x);
        const Vec xi = random_unit2(rng);
        const Vec eta = random_unit2(rng);
        CHECK(bisectional(K, xi, eta) >= -1e-10);
    }
}

TEST_CASE("sectional-type outputs scale as c^4") {
    const PotentialSpec spec = catalog("normal-half-plane");
    const double p[] = {0.4, -1.1};
    const KahlerCurvPoint K = kahler_curvature(spec, p);
    const Vec xi = vec2(1.0, 0.7);
    const Vec eta = vec2(0.7, -1.0);
    const double base_a = anti_bisectional(K, xi, eta);
    const double base_h = bisectional(K, xi, eta);
    const double base_s = holomorphic_sectional(K, xi);
    for (double c : {2.0, 1e-3}) {
        const double c4 = c * c * c * c;
        CHECK(anti_bisectional(K, c * xi, c * eta) == doctest::Approx(c4 * base_a).epsilon(1e-12));
        CHECK(bisectional(K, c * xi, c * eta) == doctest::Approx(c4 * base_h).epsilon(1e-12));
        CHECK(holomorphic_sectional(K, c * xi) == doctest::Approx(c4 * base_s).epsilon(1e-12));
    }
}

TEST_CASE("power potential: printed closed form under the assumed pair convention") {
    // diagnostic identity, exact in this normalization
    for (double p : {0.3, 0.5, 0.7}) {
        const PotentialSpec spec = catalog("power", {{"p", p}});
        Rng rng(71);
        for (int t = 0; t < 20; ++t) {
            const double u1 = rng.uniform(-1, 1), u2 = rng.uniform(-1, 1);
            const double a = rng.uniform(-2, 2);
            const std::vector<double> x = {u1, u2};
            const KahlerCurvPoint K = kahler_curvature(spec, x);
            const double oa = orthogonal_anti_bisectional(K, vec2(1.0, a), vec2(a, -1.0));
            const double e1 = std::exp(u1), e2 = std::exp(u2);
            const double expect = 2.0 * (1.0 / p - 1.0) * (a - 1.0) * (a - 1.0) * std::pow(e1 + a * e2, 2) /
                                  std::pow(e1 + e2, 2.0 + p);
            CHECK(oa == doctest::Approx(expect).epsilon(1e-9).scale(1.0));
        }
    }
}
