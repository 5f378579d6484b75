#pragma once

#include <vector>

#include "mps/field.hpp"
#include "mps/grid.hpp"

namespace mps {

/// Forward transform: samples -> coefficients, normalized so the zero mode
/// equals the mean of the physical values. Inverse is the exact adjoint
/// convention (plain synthesis sum), so inverse(forward(x)) == x to
/// roundoff.
ScalarField forward_transform(const ScalarSamples& samples);
VectorField forward_transform(const VectorSamples& samples);

ScalarSamples inverse_transform(const ScalarField& field);
VectorSamples inverse_transform(const VectorField& field);

/// In-place unnormalized c2c transforms used by the padded-product kernels.
/// `data` is a flat row-major n^3 complex array.
void fft_forward_raw(int n, SpectralArray& data);
void fft_inverse_raw(int n, SpectralArray& data);

/// Re-embeds coefficients on a finer grid with the same half-period
/// (zero padding in wavenumber space). fine.n() must be >= coarse n and
/// both grids share L.
SpectralArray pad_spectrum(const Grid& coarse, const SpectralArray& coeffs, const Grid& fine);

/// Restricts fine-grid coefficients to the coarse lattice, zeroing the
/// coarse Nyquist planes.
SpectralArray truncate_spectrum(const Grid& fine, const SpectralArray& coeffs, const Grid& coarse);

/// Physical samples of a spectral field on the 2x padded grid.
SampleArray padded_samples(const Grid& grid, const SpectralArray& coeffs, const Grid& fine);

/// Batched variants for real-valued (Hermitian) fields: two fields share
/// one complex transform. `pair` maps a+ib through the inverse transform
/// and splits real/imaginary parts; the forward direction undoes the
/// packing on the coarse lattice only.
void padded_samples_pair(const Grid& grid, const SpectralArray& a, const SpectralArray& b,
                         const Grid& fine, SampleArray& out_a, SampleArray& out_b);
void forward_truncate_pair(const Grid& fine, const SampleArray& a, const SampleArray& b,
                           const Grid& grid, SpectralArray& out_a, SpectralArray& out_b);

/// Conjugate-mirror permutation (-k mod n per axis) for a cubic grid.
const std::vector<std::int64_t>& mirror_table(int n);

/// Number of threads the FFT backend may use (1 disables threading).
void set_fft_threads(int threads);

}  // namespace mps
