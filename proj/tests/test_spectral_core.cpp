#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "mps/field.hpp"
#include "mps/grid.hpp"
#include "mps/norms.hpp"
#include "mps/random.hpp"
#include "mps/transform.hpp"

using namespace mps;

namespace {

constexpr double kPi = std::numbers::pi;

// Trapezoid quadrature of |f|^2 from analytically sampled values at twice
// the resolution; the independent oracle for Parseval checks.
double quadrature_l2_norm(int n, double L, const std::function<double(double, double, double)>& f) {
    const int m = 2 * n;
    const double h = 2.0 * kPi * L / m;
    double acc = 0.0;
    for (int i1 = 0; i1 < m; ++i1)
        for (int i2 = 0; i2 < m; ++i2)
            for (int i3 = 0; i3 < m; ++i3) {
                const auto coord = [&](int i) {
                    const int s = i < m / 2 ? i : i - m;
                    return h * s;
                };
                const double v = f(coord(i1), coord(i2), coord(i3));
                acc += v * v;
            }
    return std::sqrt(acc * h * h * h);
}

ScalarSamples sample(const Grid& g, const std::function<double(double, double, double)>& f) {
    ScalarSamples out(g);
    for (int i1 = 0; i1 < g.n(); ++i1)
        for (int i2 = 0; i2 < g.n(); ++i2)
            for (int i3 = 0; i3 < g.n(); ++i3)
                out.values[g.flat(i1, i2, i3)] =
                    f(g.coordinate(i1), g.coordinate(i2), g.coordinate(i3));
    return out;
}

}  // namespace

TEST_CASE("make_grid basics and preconditions") {
    const Grid g = make_grid(8, 1.0);
    CHECK(g.size() == 512);
    // Wave indices run over {-3,...,4}; Nyquist is +4.
    int lo = 100, hi = -100;
    for (int i = 0; i < 8; ++i) {
        lo = std::min(lo, g.wave_index(i));
        hi = std::max(hi, g.wave_index(i));
    }
    CHECK(lo == -3);
    CHECK(hi == 4);
    CHECK(g.wave_index(0) == 0);
    CHECK(g.xi(0) == 0.0);

    const Grid g2 = make_grid(8, 2.0);
    CHECK(g2.xi(1) == doctest::Approx(0.5).epsilon(1e-15));

    CHECK_THROWS_AS(make_grid(7, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(6, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(8, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(8, -1.0), std::invalid_argument);
}

TEST_CASE("xi lattice closed under negation away from Nyquist") {
    const Grid g = make_grid(8, 1.0);
    for (int i = 0; i < 8; ++i) {
        const int k = g.wave_index(i);
        if (k == 4) continue;
        bool found = false;
        for (int j = 0; j < 8; ++j) found = found || g.wave_index(j) == -k;
        CHECK(found);
    }
}

TEST_CASE("transform: constant field keeps only the mean mode") {
    const Grid g = make_grid(8, 1.5);
    ScalarSamples s(g);
    s.values.setConstant(3.25);
    const ScalarField f = forward_transform(s);
    CHECK(std::abs(f.coeffs[0] - Complex(3.25, 0.0)) < 1e-14);
    double rest = 0.0;
    for (std::int64_t i = 1; i < g.size(); ++i) rest = std::max(rest, std::abs(f.coeffs[i]));
    CHECK(rest < 1e-14);
}

TEST_CASE("transform: sin(x1/L) lands on the k = +-e1 pair with values -+i/2") {
    const Grid g = make_grid(16, 2.0);
    const ScalarSamples s = sample(g, [&](double x1, double, double) { return std::sin(x1 / 2.0); });
    const ScalarField f = forward_transform(s);
    const std::int64_t plus = g.flat(1, 0, 0);
    const std::int64_t minus = g.flat(15, 0, 0);
    CHECK(std::abs(f.coeffs[plus] - Complex(0.0, -0.5)) < 1e-13);
    CHECK(std::abs(f.coeffs[minus] - Complex(0.0, 0.5)) < 1e-13);
}

TEST_CASE("transform roundtrip is identity to 1e-12") {
    const Grid g = make_grid(12, 1.0);
    GaussianStream rng(7);
    ScalarSamples s(g);
    for (std::int64_t i = 0; i < g.size(); ++i) s.values[i] = rng.next_gaussian();
    const ScalarSamples back = inverse_transform(forward_transform(s));
    // Nyquist zeroing removes those modes, so compare after one projection.
    const ScalarSamples twice = inverse_transform(forward_transform(back));
    double err = 0.0;
    for (std::int64_t i = 0; i < g.size(); ++i)
        err = std::max(err, std::abs(back.values[i] - twice.values[i]));
    const double scale = back.values.abs().maxCoeff();
    CHECK(err < 1e-12 * scale);
}

TEST_CASE("transform preserves Hermitian symmetry both ways") {
    const Grid g = make_grid(10, 1.0);
    GaussianStream rng(3);
    ScalarSamples s(g);
    for (std::int64_t i = 0; i < g.size(); ++i) s.values[i] = rng.next_gaussian();
    const ScalarField f = forward_transform(s);
    CHECK(hermitian_defect(f) < 1e-12);
    // And a Hermitian spectrum inverts to a real field (imag part ~ 0).
    SpectralArray work = f.coeffs;
    fft_inverse_raw(g.n(), work);
    CHECK(work.imag().abs().maxCoeff() < 1e-12 * (1.0 + work.real().abs().maxCoeff()));
}

TEST_CASE("dealias mask: n=8 keeps per-axis {-2..2}, 125 modes, zero mode included") {
    const Grid g = make_grid(8, 1.0);
    CHECK(dealias_mode_count(g) == 125);
    CHECK(dealias_mask(g)[0] == 1.0);

    const Grid g12 = make_grid(12, 1.0);
    CHECK(dealias_mode_count(g12) == 9 * 9 * 9);
}

TEST_CASE("sobolev norm: zero field, single modes, scaling") {
    const Grid g = make_grid(16, 1.0);
    const ScalarField zero(g);
    CHECK(sobolev_norm(zero, 0.0) == 0.0);
    CHECK(sobolev_norm(zero, 1.5) == 0.0);

    // sin(x1): L2 norm over [(-pi,pi)]^3 is sqrt((2 pi)^3 / 2).
    const ScalarSamples s = sample(g, [](double x1, double, double) { return std::sin(x1); });
    const ScalarField f = forward_transform(s);
    const double expected = std::sqrt(std::pow(2.0 * kPi, 3) / 2.0);
    CHECK(sobolev_norm(f, 0.0) == doctest::Approx(expected).epsilon(1e-12));

    // Parseval against the independent 2x-resolution quadrature oracle.
    const double quad = quadrature_l2_norm(16, 1.0, [](double x1, double, double) {
        return std::sin(x1);
    });
    CHECK(sobolev_norm(f, 0.0) == doctest::Approx(quad).epsilon(1e-10));

    // A mode at |xi| = 2 has H^1 norm exactly twice its L^2 norm.
    const ScalarSamples s2 = sample(g, [](double x1, double, double) { return std::cos(2.0 * x1); });
    const ScalarField f2 = forward_transform(s2);
    CHECK(sobolev_norm(f2, 1.0) == doctest::Approx(2.0 * sobolev_norm(f2, 0.0)).epsilon(1e-13));

    CHECK_THROWS_AS(sobolev_norm(f, -3.0), std::invalid_argument);
    CHECK_THROWS_AS(sobolev_norm(f, std::nan("")), std::invalid_argument);
}

TEST_CASE("parseval holds for random real fields") {
    const Grid g = make_grid(12, 2.0);
    GaussianStream rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        ScalarSamples s(g);
        for (std::int64_t i = 0; i < g.size(); ++i) s.values[i] = rng.next_gaussian();
        const ScalarField f = forward_transform(s);
        // Quadrature on the grid itself (exact for band-limited fields).
        const ScalarSamples back = inverse_transform(f);
        const double quad = std::sqrt(back.values.square().sum() * g.cell_volume());
        CHECK(sobolev_norm(f, 0.0) == doctest::Approx(quad).epsilon(1e-10));
    }
}

TEST_CASE("lebesgue norm: constants, empty annulus, gaussian decay") {
    const Grid g = make_grid(16, 1.0);
    ScalarSamples ones(g);
    ones.values.setConstant(1.0);
    const double vol_norm = lebesgue_norm(ones, 2.0);
    CHECK(vol_norm == doctest::Approx(std::pow(2.0 * kPi, 1.5)).epsilon(1e-12));
    CHECK(lebesgue_norm(ones, std::numeric_limits<double>::infinity()) ==
          doctest::Approx(1.0));

    // An annulus that fits in the box but squeezes between grid points.
    const Grid coarse = make_grid(8, 1.0);
    const Region squeezed = Region::annulus(1.52);
    if (region_point_count(coarse, squeezed) == 0) {
        ScalarSamples f(coarse);
        f.values.setConstant(1.0);
        CHECK(lebesgue_norm(f, 2.0, squeezed) == 0.0);
    }

    // Gaussian annulus norms strictly decreasing over R (radial oracle
    // agrees): L is large enough that the box tail is negligible.
    const Grid big = make_grid(48, 4.0);
    const ScalarSamples gau = sample(big, [](double x1, double x2, double x3) {
        return std::exp(-(x1 * x1 + x2 * x2 + x3 * x3));
    });
    double prev = 1e300;
    for (double R : {1.0, 2.0, 3.0}) {
        const double v = lebesgue_norm(gau, 2.0, Region::annulus(R));
        CHECK(v < prev);
        prev = v;
    }

    // Radial quadrature oracle for the R = 1 annulus value.
    // |f|_{L^2}^2 = int_1^2 e^{-2 r^2} 4 pi r^2 dr.
    const int steps = 200000;
    double acc = 0.0;
    for (int i = 0; i < steps; ++i) {
        const double r = 1.0 + (i + 0.5) / steps;
        acc += std::exp(-2.0 * r * r) * 4.0 * kPi * r * r / steps;
    }
    CHECK(lebesgue_norm(gau, 2.0, Region::annulus(1.0)) ==
          doctest::Approx(std::sqrt(acc)).epsilon(2e-2));

    CHECK_THROWS_AS(lebesgue_norm(ones, 2.0, Region::annulus(2.0)), std::invalid_argument);
}

TEST_CASE("inner product matches norms and refined quadrature") {
    const Grid g = make_grid(16, 1.0);
    const ScalarSamples s = sample(g, [](double x1, double, double) { return std::sin(x1); });
    const ScalarField f = forward_transform(s);
    const double n0 = sobolev_norm(f, 0.0);
    CHECK(inner_product(f, f) == doctest::Approx(n0 * n0).epsilon(1e-12));

    const ScalarSamples s2 = sample(g, [](double, double x2, double) { return std::sin(x2); });
    const ScalarField f2 = forward_transform(s2);
    CHECK(std::abs(inner_product(f, f2)) < 1e-12);

    // Random pair against 2x-resolution quadrature of the pointwise product.
    GaussianStream rng(5);
    ScalarSamples a(g), b(g);
    for (std::int64_t i = 0; i < g.size(); ++i) {
        a.values[i] = rng.next_gaussian();
        b.values[i] = rng.next_gaussian();
    }
    const ScalarField fa = forward_transform(a);
    const ScalarField fb = forward_transform(b);
    const Grid fine = make_grid(32, 1.0);
    const SampleArray am = padded_samples(g, fa.coeffs, fine);
    const SampleArray bm = padded_samples(g, fb.coeffs, fine);
    const double quad = (am * bm).sum() * fine.cell_volume();
    CHECK(inner_product(fa, fb) == doctest::Approx(quad).epsilon(1e-10));
}

TEST_CASE("interpolation: single-shell equality and random inequality") {
    const Grid g = make_grid(16, 1.0);

    // Single shell |k|^2 = 9: (3,0,0)-type and (2,2,1)-type modes together.
    ScalarField shell(g);
    auto set_mode = [&](int k1, int k2, int k3, Complex v) {
        auto wrap = [&](int k) { return k >= 0 ? k : k + 16; };
        shell.coeffs[g.flat(wrap(k1), wrap(k2), wrap(k3))] = v;
        shell.coeffs[g.flat(wrap(-k1), wrap(-k2), wrap(-k3))] = std::conj(v);
    };
    set_mode(3, 0, 0, Complex(0.7, 0.1));
    set_mode(2, 2, 1, Complex(-0.3, 0.45));
    set_mode(0, 3, 0, Complex(0.0, 1.2));
    const double l2 = sobolev_norm(shell, 0.0);
    const double h1 = sobolev_norm(shell, 1.0);
    const double h12 = sobolev_norm(shell, 0.5);
    CHECK(h12 * h12 == doctest::Approx(l2 * h1).epsilon(1e-12));

    // General inequality |f|_{H^1/2} <= |f|_{L^2}^{1/2} |f|_{H^1}^{1/2}
    // for 100 random fields.
    for (int trial = 0; trial < 100; ++trial) {
        const VectorField v = random_vector_field(g, 1000 + trial, 5);
        const double a = sobolev_norm(v, 0.5);
        const double b = std::sqrt(sobolev_norm(v, 0.0) * sobolev_norm(v, 1.0));
        CHECK(a <= b * (1.0 + 1e-12));
    }
}

TEST_CASE("shape mismatches are rejected") {
    const Grid g = make_grid(8, 1.0);
    CHECK_THROWS_AS(ScalarField(g, SpectralArray::Zero(10)), std::invalid_argument);
    CHECK_THROWS_AS(ScalarSamples(g, SampleArray::Zero(10)), std::invalid_argument);
    SpectralArray wrong = SpectralArray::Zero(100);
    CHECK_THROWS_AS(fft_forward_raw(8, wrong), std::invalid_argument);

    const Grid other = make_grid(12, 1.0);
    ScalarField a(g), b(other);
    CHECK_THROWS_AS(inner_product(a, b), std::invalid_argument);
}

TEST_CASE("hermitian defect detects asymmetry") {
    const Grid g = make_grid(8, 1.0);
    ScalarField f(g);
    f.coeffs[g.flat(1, 0, 0)] = Complex(1.0, 1.0);
    CHECK(hermitian_defect(f) > 0.1);
    hermitian_symmetrize(g, f.coeffs);
    CHECK(hermitian_defect(f) < 1e-14);
}
