#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "mps/norms.hpp"
#include "mps/operators.hpp"
#include "mps/random.hpp"
#include "mps/transform.hpp"

using namespace mps;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField sampled(const Grid& g, const std::function<double(double, double, double)>& f) {
    ScalarSamples s(g);
    for (int i1 = 0; i1 < g.n(); ++i1)
        for (int i2 = 0; i2 < g.n(); ++i2)
            for (int i3 = 0; i3 < g.n(); ++i3)
                s.values[g.flat(i1, i2, i3)] =
                    f(g.coordinate(i1), g.coordinate(i2), g.coordinate(i3));
    return forward_transform(s);
}

}  // namespace

TEST_CASE("differentials: vector identities and the Laplacian eigenfunction") {
    const Grid g = make_grid(16, 1.0);
    const VectorField w = random_vector_field(g, 42, 5);

    // div curl = 0.
    const ScalarField dc = divergence(curl(w));
    CHECK(sobolev_norm(dc, 0.0) < 1e-12 * sobolev_norm(w, 1.0));

    // curl grad = 0.
    const ScalarField phi = sampled(g, [](double x1, double x2, double) {
        return std::sin(x1) * std::cos(x2);
    });
    const VectorField cg = curl(gradient(phi));
    CHECK(sobolev_norm(cg, 0.0) < 1e-12 * sobolev_norm(phi, 1.0));

    // laplacian(sin x1) = -sin x1 at L = 1.
    const ScalarField s = sampled(g, [](double x1, double, double) { return std::sin(x1); });
    const ScalarField lap = laplacian(s);
    ScalarField sum(g);
    sum.coeffs = lap.coeffs + s.coeffs;
    CHECK(sobolev_norm(sum, 0.0) < 1e-13 * sobolev_norm(s, 0.0));
}

TEST_CASE("leray projection: gradients die, solenoidal fields survive") {
    const Grid g = make_grid(16, 1.0);

    const ScalarField phi = sampled(g, [](double x1, double, double) { return std::sin(x1); });
    const VectorField grad_phi = gradient(phi);
    const VectorField projected = leray_project(grad_phi);
    CHECK(sobolev_norm(projected, 0.0) < 1e-12 * sobolev_norm(grad_phi, 0.0));

    // v = (sin x2, 0, 0) is divergence-free: unchanged.
    VectorField v(g);
    v.coeffs[0] = sampled(g, [](double, double x2, double) { return std::sin(x2); }).coeffs;
    const VectorField pv = leray_project(v);
    VectorField diff = pv - v;
    CHECK(sobolev_norm(diff, 0.0) < 1e-13 * sobolev_norm(v, 0.0));

    // Idempotence, annihilated divergence, curls preserved: 100 fields.
    for (int trial = 0; trial < 100; ++trial) {
        const VectorField r = random_vector_field(g, 9000 + trial, 5);
        const VectorField pr = leray_project(r);
        CHECK(sobolev_norm(divergence(pr), 0.0) <= 1e-12 * sobolev_norm(r, 0.0));
        const VectorField ppr = leray_project(pr);
        CHECK(sobolev_norm(ppr - pr, 0.0) <= 1e-12 * sobolev_norm(r, 0.0));
        const VectorField cr = curl(r);
        const VectorField pcr = leray_project(cr);
        CHECK(sobolev_norm(pcr - cr, 0.0) <= 1e-12 * sobolev_norm(cr, 0.0));
    }

    // Zero mode passes through unchanged.
    VectorField mean(g);
    mean.coeffs[1][0] = Complex(2.0, 0.0);
    const VectorField pm = leray_project(mean);
    CHECK(std::abs(pm.coeffs[1][0] - Complex(2.0, 0.0)) < 1e-15);
}

TEST_CASE("resolvent: symbol arithmetic and the zero-mode gauge") {
    const Grid g = make_grid(16, 1.0);
    ScalarField f(g);
    f.coeffs[g.flat(1, 0, 0)] = Complex(1.0, 0.0);
    f.coeffs[g.flat(15, 0, 0)] = Complex(1.0, 0.0);
    const ScalarField r = resolvent(f, 1.0);
    // eps = 1, |xi| = 1: 1/(1 + 1) = 1/2.
    CHECK(std::abs(r.coeffs[g.flat(1, 0, 0)] - Complex(0.5, 0.0)) < 1e-15);

    ScalarField c(g);
    c.coeffs[0] = Complex(4.0, 0.0);
    const ScalarField rc = resolvent(c, 0.5);
    CHECK(std::abs(rc.coeffs[0]) == 0.0);

    // eps -> 0 at |xi| = 2 approaches the inverse Laplacian 1/4.
    ScalarField m(g);
    m.coeffs[g.flat(2, 0, 0)] = Complex(1.0, 0.0);
    m.coeffs[g.flat(14, 0, 0)] = Complex(1.0, 0.0);
    const ScalarField rm = resolvent(m, 1e-12);
    CHECK(std::abs(rm.coeffs[g.flat(2, 0, 0)] - Complex(0.25, 0.0)) < 1e-9);

    CHECK_THROWS_AS(resolvent(f, 0.0), std::invalid_argument);
}

TEST_CASE("multiplier_sup: sigma = 1 is epsilon-free, larger sigma capped by 1/eps") {
    // sigma = 1: symbol |xi|^2/(eps |xi|^4 + |xi|^2) <= 1 with sup -> 1.
    for (double eps : {1.0, 0.1, 0.01}) {
        const double s = multiplier_sup({eps, 1.0}, 1e3);
        CHECK(s <= 1.0 + 1e-9);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
    }

    // sigma = 2, eps = 0.1: sup over (0, xi_max] is 1/(eps + 1/xi_max^2),
    // approaching 1/eps from below (dense-scan oracle value frozen).
    const double s2 = multiplier_sup({0.1, 2.0}, 100.0);
    CHECK(s2 <= 10.0);
    CHECK(s2 == doctest::Approx(1.0 / (0.1 + 1e-4)).epsilon(1e-4));

    // sigma = 1.5, eps = 0.5: analytic sup at xi = sqrt(2) is 1/sqrt(2) <= 2.
    const double s15 = multiplier_sup({0.5, 1.5}, 100.0);
    CHECK(s15 <= 2.0);
    CHECK(s15 == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-6));

    // Full bound sweep: sup <= 1/eps over the sigma window.
    for (double sigma : {1.0, 1.25, 1.5, 2.0})
        for (double eps : {1.0, 0.1, 0.01})
            CHECK(multiplier_sup({eps, sigma}, 1e3) <= 1.0 / eps + 1e-9);

    CHECK_THROWS_AS(multiplier_sup({0.5, 0.5}, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(multiplier_sup({0.5, 1.0}, -1.0), std::invalid_argument);
}

TEST_CASE("cutoff field: plateau, support, profile bounds, L3 homogeneity") {
    const Grid g = make_grid(32, 8.0);
    const CutoffSpec spec{2.0, CutoffSpec::Family::Theta};
    const ScalarSamples theta = cutoff_field(spec, g);

    CHECK(theta.values[g.flat(0, 0, 0)] == 1.0);
    CHECK(theta.values.minCoeff() >= 0.0);
    CHECK(theta.values.maxCoeff() <= 1.0);

    for (int i1 = 0; i1 < g.n(); ++i1)
        for (int i2 = 0; i2 < g.n(); ++i2)
            for (int i3 = 0; i3 < g.n(); ++i3) {
                const double x1 = g.coordinate(i1), x2 = g.coordinate(i2), x3 = g.coordinate(i3);
                const double r = std::sqrt(x1 * x1 + x2 * x2 + x3 * x3);
                const double v = theta.values[g.flat(i1, i2, i3)];
                if (r <= 2.0) CHECK(v == 1.0);
                if (r > 4.0) CHECK(v == 0.0);
            }

    // Profile derivative bound: |theta_R'| <= 1.875 / R <= 10 / R.
    double dmax = 0.0;
    for (int i = 0; i <= 10000; ++i) {
        const double r = 3.0 * i / 10000.0;
        dmax = std::max(dmax, std::abs(cutoff_profile_d1(r)) / spec.radius);
    }
    CHECK(dmax <= 10.0 / spec.radius);

    // |grad theta_R|_{L^3} is R-independent: radial quadrature oracle.
    auto grad_l3 = [](double R) {
        const int steps = 400000;
        double acc = 0.0;
        for (int i = 0; i < steps; ++i) {
            const double r = R + R * (i + 0.5) / steps;  // support [R, 2R]
            const double d = std::abs(cutoff_profile_d1(r / R)) / R;
            acc += d * d * d * 4.0 * kPi * r * r * (R / steps);
        }
        return std::cbrt(acc);
    };
    CHECK(grad_l3(2.0) == doctest::Approx(grad_l3(4.0)).epsilon(1e-3));

    // Support must fit the box.
    CHECK_THROWS_AS(cutoff_field({20.0, CutoffSpec::Family::Theta}, g), std::invalid_argument);
    CHECK_THROWS_AS(cutoff_field({0.5, CutoffSpec::Family::Theta}, g), std::invalid_argument);
}

TEST_CASE("mollified advection: zero input, plateau behavior, trilinear pairing") {
    const Grid g = make_grid(32, 8.0);
    const CutoffSpec spec{2.0, CutoffSpec::Family::Theta};
    const CutoffWorkspace chi(spec, g);

    const VectorField zero(g);
    const VectorField b = random_vector_field(g, 77, 4);
    const VectorField out = mollified_advection(zero, b, chi);
    CHECK(sobolev_norm(out, 0.0) == 0.0);

    // chi == 1 limit (huge radius): the pairing with solenoidal a vanishes,
    // int ((a.grad) b) . b = -1/2 int div(a) |b|^2 = 0.
    const CutoffWorkspace one(CutoffSpec{1e6, CutoffSpec::Family::Theta}, g);
    CHECK(one.chi_fine().minCoeff() == doctest::Approx(1.0).epsilon(1e-12));
    const VectorField a = leray_project(random_vector_field(g, 78, 4));
    const VectorField adv = mollified_advection(a, b, one);
    const double pairing = inner_product(adv, b);
    const double scale = sobolev_norm(a, 0.0) * sobolev_norm(b, 1.0) * sobolev_norm(b, 0.0);
    CHECK(std::abs(pairing) <= 1e-8 * std::max(scale, 1e-300));

    // Output is dealiased.
    const VectorField adv2 = mollified_advection(a, b, chi);
    const Eigen::ArrayXd mask = dealias_mask(g);
    for (int c = 0; c < 3; ++c) {
        double leak = 0.0;
        for (std::int64_t i = 0; i < g.size(); ++i)
            if (mask[i] == 0.0) leak = std::max(leak, std::abs(adv2.coeffs[c][i]));
        CHECK(leak == 0.0);
    }
}

TEST_CASE("pressure: shear flow has p = 0 and the Poisson residual vanishes") {
    const Grid g = make_grid(32, 8.0);

    // u = (sin x2, 0, 0): div div (u (x) u) = 0 identically.
    VectorField shear(g);
    shear.coeffs[0] = sampled(g, [](double, double x2, double) { return std::sin(x2); }).coeffs;
    const ScalarField p = pressure_from_velocity(shear);
    CHECK(sobolev_norm(p, 0.0) <= 1e-13 * sobolev_norm(shear, 0.0));

    const VectorField zero(g);
    CHECK(sobolev_norm(pressure_from_velocity(zero), 0.0) == 0.0);

    // Random solenoidal u: |lap p + div div (u (x) u)| <= 1e-10 relative.
    const VectorField u = leray_project(random_vector_field(g, 5150, 4));
    const ScalarField rhs = div_div_outer(u);
    const ScalarField pu = pressure_from_velocity(u);
    ScalarField poisson(g);
    poisson.coeffs = laplacian(pu).coeffs + rhs.coeffs;
    CHECK(sobolev_norm(poisson, 0.0) <= 1e-10 * std::max(sobolev_norm(rhs, 0.0), 1e-300));
}

TEST_CASE("cutoff multiply helpers agree with plain products in the chi == 1 limit") {
    const Grid g = make_grid(16, 1.0);
    const CutoffWorkspace one(CutoffSpec{1e6, CutoffSpec::Family::Theta}, g);
    const VectorField v = random_vector_field(g, 33, 5);
    const VectorField cv = cutoff_sq_multiply(one, v);
    CHECK(sobolev_norm(cv - v, 0.0) < 1e-11 * sobolev_norm(v, 0.0));

    const ScalarField s = divergence(v);
    const ScalarField cs = cutoff_multiply(one, s);
    ScalarField ds(g);
    ds.coeffs = cs.coeffs - s.coeffs;
    CHECK(sobolev_norm(ds, 0.0) < 1e-11 * std::max(sobolev_norm(s, 0.0), 1e-300));
}
