#pragma once

#include <array>
#include <complex>

#include <Eigen/Core>

#include "mps/grid.hpp"

namespace mps {

using Complex = std::complex<double>;
using SpectralArray = Eigen::ArrayXcd;
using SampleArray = Eigen::ArrayXd;

/// Scalar field stored as Fourier coefficients on the grid's wavenumber
/// lattice. Real-valued fields keep coeffs(-k) = conj(coeffs(k)); Nyquist
/// planes are zero.
struct ScalarField {
    Grid grid;
    SpectralArray coeffs;

    explicit ScalarField(const Grid& g) : grid(g), coeffs(SpectralArray::Zero(g.size())) {}
    ScalarField(const Grid& g, SpectralArray c);
};

/// Three-component spectral vector field (the home of u, omega, f, g).
struct VectorField {
    Grid grid;
    std::array<SpectralArray, 3> coeffs;

    explicit VectorField(const Grid& g)
        : grid(g),
          coeffs{SpectralArray::Zero(g.size()), SpectralArray::Zero(g.size()),
                 SpectralArray::Zero(g.size())} {}
};

/// Physical-space samples of a scalar on the grid points.
struct ScalarSamples {
    Grid grid;
    SampleArray values;

    explicit ScalarSamples(const Grid& g) : grid(g), values(SampleArray::Zero(g.size())) {}
    ScalarSamples(const Grid& g, SampleArray v);
};

/// Physical-space samples of a vector field.
struct VectorSamples {
    Grid grid;
    std::array<SampleArray, 3> values;

    explicit VectorSamples(const Grid& g)
        : grid(g),
          values{SampleArray::Zero(g.size()), SampleArray::Zero(g.size()),
                 SampleArray::Zero(g.size())} {}
};

/// Zeroes the Nyquist planes in place.
void zero_nyquist(const Grid& grid, SpectralArray& coeffs);

/// Max relative deviation from coeffs(-k) = conj(coeffs(k)).
double hermitian_defect(const Grid& grid, const SpectralArray& coeffs);
double hermitian_defect(const ScalarField& f);
double hermitian_defect(const VectorField& f);

/// Replaces coeffs by its Hermitian part; makes a real-valued field.
void hermitian_symmetrize(const Grid& grid, SpectralArray& coeffs);

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);
VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(double s, const VectorField& a);

VectorField& operator+=(VectorField& a, const VectorField& b);

}  // namespace mps
