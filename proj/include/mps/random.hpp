#pragma once

#include <cstdint>

#include "mps/field.hpp"

namespace mps {

/// Deterministic 64-bit linear congruential stream (Knuth MMIX
/// multiplier) mapped to unit-variance Gaussians via Box-Muller. The
/// stream is fully specified so runs can be reproduced elsewhere:
///   state <- state * 6364136223846793005 + 1442695040888963407
///   uniform = ((state >> 11) + 0.5) * 2^-53
struct GaussianStream {
    explicit GaussianStream(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return state;
    }

    double next_uniform() {
        return (double(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    double next_gaussian();

    std::uint64_t state;
    bool has_spare = false;
    double spare = 0.0;
};

/// Real-valued random vector field with independent Gaussian coefficients
/// on modes |k_i| <= band (Hermitian-symmetrized, Nyquist-free).
VectorField random_vector_field(const Grid& grid, std::uint64_t seed, int band);

}  // namespace mps
