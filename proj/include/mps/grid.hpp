#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace mps {

/// Cubic periodic grid on the torus [-pi*L, pi*L)^3.
///
/// Spectral indices follow the usual FFT wrap: storage index i in [0, n)
/// maps to the integer wavenumber k = i for i <= n/2 and k = i - n
/// otherwise, so k ranges over {-n/2+1, ..., n/2}. Physical wavenumbers
/// are xi = k / L. The +n/2 (Nyquist) plane is unpaired under conjugation
/// and is kept identically zero by every field in this library.
class Grid {
public:
    Grid(int n, double half_period);

    int n() const { return n_; }
    double half_period() const { return half_period_; }
    std::int64_t size() const { return std::int64_t(n_) * n_ * n_; }

    /// Grid spacing 2*pi*L/n.
    double spacing() const;
    /// Cell volume spacing()^3 (the quadrature weight).
    double cell_volume() const;
    /// Full box volume (2*pi*L)^3.
    double volume() const;

    /// Integer wavenumber for a storage index along one axis, in {-n/2+1,...,n/2}.
    int wave_index(int i) const { return i <= n_ / 2 ? i : i - n_; }
    /// Physical coordinate for a storage index along one axis, in [-pi*L, pi*L).
    double coordinate(int i) const;
    /// Scaled wavenumber xi = k/L along one axis.
    double xi(int i) const { return wave_index(i) / half_period_; }

    /// Flat row-major index, axis 1 slowest.
    std::int64_t flat(int i1, int i2, int i3) const {
        return (std::int64_t(i1) * n_ + i2) * n_ + i3;
    }

    /// True for indices on the Nyquist plane k = n/2 of any axis.
    bool is_nyquist(int i1, int i2, int i3) const {
        return i1 == n_ / 2 || i2 == n_ / 2 || i3 == n_ / 2;
    }

    /// |xi|^2 for every lattice site, flat row-major order.
    const Eigen::ArrayXd& xi_squared() const { return xi_squared_; }
    /// Per-axis xi component for every lattice site.
    const Eigen::ArrayXd& xi_component(int axis) const { return xi_comp_[axis]; }
    /// 1 on retained modes, 0 on the Nyquist planes.
    const Eigen::ArrayXd& nyquist_keep() const { return nyquist_keep_; }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.n_ == b.n_ && a.half_period_ == b.half_period_;
    }

private:
    int n_;
    double half_period_;
    Eigen::ArrayXd xi_squared_;
    Eigen::ArrayXd xi_comp_[3];
    Eigen::ArrayXd nyquist_keep_;
};

/// Builds a grid with n points per axis (even, >= 8) and half-period L > 0.
Grid make_grid(int n, double half_period);

}  // namespace mps
