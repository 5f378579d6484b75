#include "mps/norms.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mps/transform.hpp"

namespace mps {

Eigen::ArrayXd dealias_mask(const Grid& grid) {
    const int n = grid.n();
    const int cut = n / 3;
    Eigen::ArrayXd mask(grid.size());
    for (int i1 = 0; i1 < n; ++i1) {
        const bool k1 = std::abs(grid.wave_index(i1)) <= cut;
        for (int i2 = 0; i2 < n; ++i2) {
            const bool k2 = std::abs(grid.wave_index(i2)) <= cut;
            for (int i3 = 0; i3 < n; ++i3) {
                const bool k3 = std::abs(grid.wave_index(i3)) <= cut;
                mask[grid.flat(i1, i2, i3)] = (k1 && k2 && k3) ? 1.0 : 0.0;
            }
        }
    }
    return mask;
}

std::int64_t dealias_mode_count(const Grid& grid) {
    return std::int64_t(std::llround(dealias_mask(grid).sum()));
}

ScalarField dealias(const ScalarField& f) {
    ScalarField out(f.grid);
    out.coeffs = f.coeffs * dealias_mask(f.grid);
    return out;
}

VectorField dealias(const VectorField& f) {
    VectorField out(f.grid);
    const Eigen::ArrayXd mask = dealias_mask(f.grid);
    for (int c = 0; c < 3; ++c) out.coeffs[c] = f.coeffs[c] * mask;
    return out;
}

namespace {

double sobolev_norm_sq(const Grid& grid, const SpectralArray& coeffs, double s) {
    if (!std::isfinite(s)) throw std::invalid_argument("sobolev_norm: s must be finite");
    if (s < -2.0) throw std::invalid_argument("sobolev_norm: s < -2 is not supported");
    const Eigen::ArrayXd& xi2 = grid.xi_squared();
    double sum = 0.0;
    const std::int64_t total = grid.size();
    for (std::int64_t i = 0; i < total; ++i) {
        const double k2 = xi2[i];
        if (k2 == 0.0) {
            if (s == 0.0) sum += std::norm(coeffs[i]);
            continue;
        }
        sum += std::pow(k2, s) * std::norm(coeffs[i]);
    }
    return grid.volume() * sum;
}

}  // namespace

double sobolev_norm(const ScalarField& f, double s) {
    return std::sqrt(sobolev_norm_sq(f.grid, f.coeffs, s));
}

double sobolev_norm(const VectorField& f, double s) {
    double sum = 0.0;
    for (const auto& c : f.coeffs) sum += sobolev_norm_sq(f.grid, c, s);
    return std::sqrt(sum);
}

double e_norm(const VectorField& f, double epsilon) {
    return sobolev_norm(f, 1.0) + std::sqrt(epsilon) * sobolev_norm(f, 2.0);
}

namespace {

bool in_region(const Grid& g, int i1, int i2, int i3, const Region& region) {
    if (region.kind == Region::Kind::All) return true;
    const double x1 = g.coordinate(i1);
    const double x2 = g.coordinate(i2);
    const double x3 = g.coordinate(i3);
    const double r = std::sqrt(x1 * x1 + x2 * x2 + x3 * x3);
    if (region.kind == Region::Kind::Ball) return r <= region.radius;
    return r >= region.radius && r <= 2.0 * region.radius;
}

void check_region(const Grid& g, const Region& region) {
    if (region.kind == Region::Kind::All) return;
    const double outer = region.kind == Region::Kind::Ball ? region.radius : 2.0 * region.radius;
    if (outer > std::numbers::pi * g.half_period())
        throw std::invalid_argument("lebesgue_norm: region exceeds the box");
}

double lebesgue_norm_impl(const Grid& g, const SampleArray* comps, int ncomp, double p,
                          const Region& region) {
    check_region(g, region);
    if (!(p >= 1.0)) throw std::invalid_argument("lebesgue_norm: p must be in [1, inf]");
    const bool is_inf = std::isinf(p);
    const int n = g.n();
    double acc = 0.0;
    double peak = 0.0;
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2)
            for (int i3 = 0; i3 < n; ++i3) {
                if (!in_region(g, i1, i2, i3, region)) continue;
                const std::int64_t idx = g.flat(i1, i2, i3);
                double mag2 = 0.0;
                for (int c = 0; c < ncomp; ++c) mag2 += comps[c][idx] * comps[c][idx];
                const double mag = std::sqrt(mag2);
                if (is_inf) {
                    peak = std::max(peak, mag);
                } else {
                    acc += std::pow(mag, p);
                }
            }
    if (is_inf) return peak;
    return std::pow(g.cell_volume() * acc, 1.0 / p);
}

}  // namespace

std::int64_t region_point_count(const Grid& grid, const Region& region) {
    check_region(grid, region);
    const int n = grid.n();
    std::int64_t count = 0;
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2)
            for (int i3 = 0; i3 < n; ++i3)
                if (in_region(grid, i1, i2, i3, region)) ++count;
    return count;
}

double lebesgue_norm(const ScalarSamples& f, double p, const Region& region) {
    return lebesgue_norm_impl(f.grid, &f.values, 1, p, region);
}

double lebesgue_norm(const VectorSamples& f, double p, const Region& region) {
    return lebesgue_norm_impl(f.grid, f.values.data(), 3, p, region);
}

double lebesgue_norm(const ScalarField& f, double p, const Region& region) {
    return lebesgue_norm(inverse_transform(f), p, region);
}

double lebesgue_norm(const VectorField& f, double p, const Region& region) {
    return lebesgue_norm(inverse_transform(f), p, region);
}

double inner_product(const ScalarField& a, const ScalarField& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("inner_product: grid mismatch");
    return a.grid.volume() * (a.coeffs * b.coeffs.conjugate()).real().sum();
}

double inner_product(const VectorField& a, const VectorField& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("inner_product: grid mismatch");
    double sum = 0.0;
    for (int c = 0; c < 3; ++c) sum += (a.coeffs[c] * b.coeffs[c].conjugate()).real().sum();
    return a.grid.volume() * sum;
}

}  // namespace mps
