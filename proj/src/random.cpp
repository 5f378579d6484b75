#include "mps/random.hpp"

#include <cmath>
#include <numbers>

namespace mps {

double GaussianStream::next_gaussian() {
    if (has_spare) {
        has_spare = false;
        return spare;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare = r * std::sin(a);
    has_spare = true;
    return r * std::cos(a);
}

VectorField random_vector_field(const Grid& grid, std::uint64_t seed, int band) {
    GaussianStream rng(seed);
    VectorField out(grid);
    const int n = grid.n();
    for (int c = 0; c < 3; ++c) {
        for (int i1 = 0; i1 < n; ++i1) {
            if (std::abs(grid.wave_index(i1)) > band) continue;
            for (int i2 = 0; i2 < n; ++i2) {
                if (std::abs(grid.wave_index(i2)) > band) continue;
                for (int i3 = 0; i3 < n; ++i3) {
                    if (std::abs(grid.wave_index(i3)) > band) continue;
                    out.coeffs[c][grid.flat(i1, i2, i3)] =
                        Complex(rng.next_gaussian(), rng.next_gaussian());
                }
            }
        }
        hermitian_symmetrize(grid, out.coeffs[c]);
    }
    return out;
}

}  // namespace mps
