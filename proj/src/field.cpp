#include "mps/field.hpp"

#include <cmath>
#include <stdexcept>

namespace mps {

namespace {

// Index of the conjugate-paired site (-k modulo n on each axis).
std::int64_t mirror_index(const Grid& g, int i1, int i2, int i3) {
    const int n = g.n();
    const int m1 = i1 == 0 ? 0 : n - i1;
    const int m2 = i2 == 0 ? 0 : n - i2;
    const int m3 = i3 == 0 ? 0 : n - i3;
    return g.flat(m1, m2, m3);
}

}  // namespace

ScalarField::ScalarField(const Grid& g, SpectralArray c) : grid(g), coeffs(std::move(c)) {
    if (coeffs.size() != grid.size()) throw std::invalid_argument("field: coefficient count does not match grid");
    zero_nyquist(grid, coeffs);
}

ScalarSamples::ScalarSamples(const Grid& g, SampleArray v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw std::invalid_argument("samples: value count does not match grid");
}

void zero_nyquist(const Grid& grid, SpectralArray& coeffs) {
    coeffs *= grid.nyquist_keep();
}

double hermitian_defect(const Grid& grid, const SpectralArray& coeffs) {
    const int n = grid.n();
    double worst = 0.0;
    const double scale = std::sqrt(coeffs.abs2().sum());
    if (scale == 0.0) return 0.0;
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2)
            for (int i3 = 0; i3 < n; ++i3) {
                const std::int64_t a = grid.flat(i1, i2, i3);
                const std::int64_t b = mirror_index(grid, i1, i2, i3);
                worst = std::max(worst, std::abs(coeffs[a] - std::conj(coeffs[b])));
            }
    return worst / scale;
}

double hermitian_defect(const ScalarField& f) { return hermitian_defect(f.grid, f.coeffs); }

double hermitian_defect(const VectorField& f) {
    double worst = 0.0;
    for (const auto& c : f.coeffs) worst = std::max(worst, hermitian_defect(f.grid, c));
    return worst;
}

void hermitian_symmetrize(const Grid& grid, SpectralArray& coeffs) {
    const int n = grid.n();
    SpectralArray out(coeffs.size());
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2)
            for (int i3 = 0; i3 < n; ++i3) {
                const std::int64_t a = grid.flat(i1, i2, i3);
                const std::int64_t b = mirror_index(grid, i1, i2, i3);
                out[a] = 0.5 * (coeffs[a] + std::conj(coeffs[b]));
            }
    coeffs = std::move(out);
    zero_nyquist(grid, coeffs);
}

namespace {
void require_same_grid(const Grid& a, const Grid& b) {
    if (!(a == b)) throw std::invalid_argument("field arithmetic: grid mismatch");
}
}  // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid);
    ScalarField out(a.grid);
    out.coeffs = a.coeffs + b.coeffs;
    return out;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid);
    ScalarField out(a.grid);
    out.coeffs = a.coeffs - b.coeffs;
    return out;
}

ScalarField operator*(double s, const ScalarField& a) {
    ScalarField out(a.grid);
    out.coeffs = s * a.coeffs;
    return out;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
    require_same_grid(a.grid, b.grid);
    VectorField out(a.grid);
    for (int c = 0; c < 3; ++c) out.coeffs[c] = a.coeffs[c] + b.coeffs[c];
    return out;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
    require_same_grid(a.grid, b.grid);
    VectorField out(a.grid);
    for (int c = 0; c < 3; ++c) out.coeffs[c] = a.coeffs[c] - b.coeffs[c];
    return out;
}

VectorField operator*(double s, const VectorField& a) {
    VectorField out(a.grid);
    for (int c = 0; c < 3; ++c) out.coeffs[c] = s * a.coeffs[c];
    return out;
}

VectorField& operator+=(VectorField& a, const VectorField& b) {
    require_same_grid(a.grid, b.grid);
    for (int c = 0; c < 3; ++c) a.coeffs[c] += b.coeffs[c];
    return a;
}

}  // namespace mps
