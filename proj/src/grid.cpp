#include "mps/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mps {

Grid::Grid(int n, double half_period) : n_(n), half_period_(half_period) {
    const std::int64_t total = size();
    xi_squared_.resize(total);
    nyquist_keep_.resize(total);
    for (int a = 0; a < 3; ++a) xi_comp_[a].resize(total);

    for (int i1 = 0; i1 < n_; ++i1) {
        const double x1 = xi(i1);
        for (int i2 = 0; i2 < n_; ++i2) {
            const double x2 = xi(i2);
            for (int i3 = 0; i3 < n_; ++i3) {
                const double x3 = xi(i3);
                const std::int64_t idx = flat(i1, i2, i3);
                xi_comp_[0][idx] = x1;
                xi_comp_[1][idx] = x2;
                xi_comp_[2][idx] = x3;
                xi_squared_[idx] = x1 * x1 + x2 * x2 + x3 * x3;
                nyquist_keep_[idx] = is_nyquist(i1, i2, i3) ? 0.0 : 1.0;
            }
        }
    }
}

double Grid::spacing() const {
    return 2.0 * std::numbers::pi * half_period_ / n_;
}

double Grid::cell_volume() const {
    const double h = spacing();
    return h * h * h;
}

double Grid::volume() const {
    const double w = 2.0 * std::numbers::pi * half_period_;
    return w * w * w;
}

double Grid::coordinate(int i) const {
    const int s = i < n_ / 2 ? i : i - n_;
    return 2.0 * std::numbers::pi * half_period_ * s / n_;
}

Grid make_grid(int n, double half_period) {
    if (n < 8) throw std::invalid_argument("grid: n must be >= 8");
    if (n % 2 != 0) throw std::invalid_argument("grid: n must be even");
    if (!(half_period > 0.0)) throw std::invalid_argument("grid: half_period must be > 0");
    return Grid(n, half_period);
}

}  // namespace mps
