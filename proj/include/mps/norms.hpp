#pragma once

#include "mps/field.hpp"
#include "mps/grid.hpp"

namespace mps {

/// 2/3-rule dealias mask: 1 on modes with |k_i| <= floor(n/3) on every
/// axis, 0 elsewhere (Nyquist planes excluded by construction).
Eigen::ArrayXd dealias_mask(const Grid& grid);

/// Number of retained modes in the dealias mask.
std::int64_t dealias_mode_count(const Grid& grid);

ScalarField dealias(const ScalarField& f);
VectorField dealias(const VectorField& f);

/// Homogeneous Sobolev norm via the Fourier multiplier |xi|^s, with the
/// (2 pi L)^3 measure factor. The zero mode contributes only at s = 0
/// (constants are quotiented out of the homogeneous spaces).
/// Supported range s >= -2.
double sobolev_norm(const ScalarField& f, double s);
double sobolev_norm(const VectorField& f, double s);

/// Solution-space norm |f|_{H^1} + sqrt(epsilon) |f|_{H^2}.
double e_norm(const VectorField& f, double epsilon);

/// Integration region for Lebesgue norms: the whole box, the ball
/// |x| <= R, or the annulus R <= |x| <= 2R.
struct Region {
    enum class Kind { All, Ball, Annulus } kind = Kind::All;
    double radius = 0.0;

    static Region all() { return {Kind::All, 0.0}; }
    static Region ball(double r) { return {Kind::Ball, r}; }
    static Region annulus(double r) { return {Kind::Annulus, r}; }
};

/// Grid points inside the region (wrapped coordinates).
std::int64_t region_point_count(const Grid& grid, const Region& region);

/// L^p norm by grid quadrature of |f|^p over the region; p may be
/// infinity (max over region points). Returns 0 for empty regions.
double lebesgue_norm(const ScalarSamples& f, double p, const Region& region = Region::all());
double lebesgue_norm(const VectorSamples& f, double p, const Region& region = Region::all());
double lebesgue_norm(const ScalarField& f, double p, const Region& region = Region::all());
double lebesgue_norm(const VectorField& f, double p, const Region& region = Region::all());

/// L^2 pairing (2 pi L)^3 Re sum_k a_k conj(b_k); agrees with the
/// quadrature of a*b for real fields.
double inner_product(const ScalarField& a, const ScalarField& b);
double inner_product(const VectorField& a, const VectorField& b);

}  // namespace mps
