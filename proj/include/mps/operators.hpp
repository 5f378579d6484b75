#pragma once

#include <memory>

#include "mps/field.hpp"
#include "mps/grid.hpp"

namespace mps {

// ---- exact spectral differentials -----------------------------------------

VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);
VectorField curl(const VectorField& v);
ScalarField laplacian(const ScalarField& f);
VectorField laplacian(const VectorField& v);

/// |div v|_{L^2} / |v|_{L^2} (0 for the zero field).
double relative_divergence(const VectorField& v);

// ---- Leray projection ------------------------------------------------------

/// Projection onto divergence-free fields, P = I - grad (-lap)^{-1} div.
/// Idempotent, annihilates gradients, identity on curls and on solenoidal
/// fields; the zero mode passes through unchanged.
VectorField leray_project(const VectorField& v);

// ---- regularized resolvent --------------------------------------------------

/// Parameters of the fourth-order regularization: epsilon in (0, 1] scales
/// the biharmonic term, sigma in [1, 2] is the diagnostic exponent for the
/// multiplier bound.
struct ResolventSpec {
    double epsilon = 0.5;
    double sigma = 1.0;
};

/// Applies 1/(eps |xi|^4 + |xi|^2) mode by mode; the zero mode is set to 0
/// (mean-free gauge).
ScalarField resolvent(const ScalarField& f, double epsilon);
VectorField resolvent(const VectorField& f, double epsilon);

/// sup over a dense |xi| sample in (0, xi_max] of
/// |xi|^{2 sigma} / (eps |xi|^4 + |xi|^2).
double multiplier_sup(const ResolventSpec& spec, double xi_max);

// ---- radial cutoffs ----------------------------------------------------------

/// Radial plateau cutoff: 1 on |x| <= R, 0 on |x| >= 2R, quintic
/// smoothstep transition in between. The theta and phi families share the
/// profile; the tag records which role the cutoff plays.
struct CutoffSpec {
    enum class Family { Theta, Phi };
    double radius = 2.0;
    Family family = Family::Theta;
};

/// Unit-radius profile values (radius 1 plateau, support radius 2).
double cutoff_profile(double r);
double cutoff_profile_d1(double r);
double cutoff_profile_d2(double r);

/// Samples theta_R(|x|) on the grid points. Requires 2R <= pi L so the
/// support fits inside the box.
ScalarSamples cutoff_field(const CutoffSpec& spec, const Grid& grid);

/// Discrete cutoff used inside products: the trigonometric interpolant of
/// the grid samples, with its exact representation on the 2x padded grid.
/// Multiplications against band-limited fields evaluated on the fine grid
/// are then alias-free, which is what makes the integral identities of the
/// energy ledger hold to roundoff.
class CutoffWorkspace {
public:
    CutoffWorkspace(const CutoffSpec& spec, const Grid& grid);

    const Grid& grid() const { return grid_; }
    const Grid& fine_grid() const { return fine_; }
    const CutoffSpec& spec() const { return spec_; }

    /// Spectral coefficients of the interpolated cutoff on the state grid.
    const SpectralArray& chi_spectrum() const { return chi_spec_; }
    /// Samples of chi, chi^2 and grad chi on the fine grid.
    const SampleArray& chi_fine() const { return chi_fine_; }
    const SampleArray& chi_sq_fine() const { return chi_sq_fine_; }
    const SampleArray& grad_chi_fine(int axis) const { return grad_chi_fine_[axis]; }

private:
    CutoffSpec spec_;
    Grid grid_;
    Grid fine_;
    SpectralArray chi_spec_;
    SampleArray chi_fine_;
    SampleArray chi_sq_fine_;
    SampleArray grad_chi_fine_[3];
};

// ---- padded pointwise products ----------------------------------------------

/// Fine-grid (2x padded) samples of a spectral field.
SampleArray fine_samples(const Grid& grid, const SpectralArray& coeffs, const Grid& fine);

/// Forward transform of fine-grid samples, truncated back to the state
/// grid (mean-preserving normalization).
SpectralArray fine_forward_truncate(const Grid& fine, const SampleArray& samples, const Grid& grid);

/// Quadrature of fine-grid samples: cell volume times the sample sum.
double fine_integral(const Grid& fine, const SampleArray& integrand);

/// Alias-free pointwise products against the discrete cutoff, truncated
/// back to the state grid: [chi s] and [chi^2 v].
ScalarField cutoff_multiply(const CutoffWorkspace& cutoff, const ScalarField& s);
VectorField cutoff_sq_multiply(const CutoffWorkspace& cutoff, const VectorField& v);

// ---- mollified advection -----------------------------------------------------

/// ((chi a) . grad)(chi b) computed pseudo-spectrally: inputs are
/// dealiased (2/3 rule), cutoff products are evaluated alias-free on the
/// padded grid, and the output is dealiased again.
VectorField mollified_advection(const VectorField& a, const VectorField& b,
                                const CutoffWorkspace& cutoff);
VectorField mollified_advection(const VectorField& a, const VectorField& b,
                                const CutoffSpec& spec);

/// Plain dealiased advection (a . grad) b, the cutoff-free limit.
VectorField advection(const VectorField& a, const VectorField& b);

// ---- pressure -----------------------------------------------------------------

/// p = (-lap)^{-1} div div (u (x) u) with dealiased products; the zero
/// mode of p is 0.
ScalarField pressure_from_velocity(const VectorField& u);

/// div div (u (x) u) with the same product convention as
/// pressure_from_velocity (the Poisson right-hand side).
ScalarField div_div_outer(const VectorField& u);

}  // namespace mps
