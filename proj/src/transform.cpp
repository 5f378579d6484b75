#include "mps/transform.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace mps {

namespace {

std::mutex plan_mutex;
int fft_threads = 1;

struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;
};

// One reusable in-place plan pair per grid size. Plans are created with
// FFTW_ESTIMATE | FFTW_UNALIGNED so they execute on any buffer and the
// butterfly schedule is deterministic across runs.
PlanPair& plans_for(int n) {
    static std::map<int, PlanPair> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    SpectralArray scratch(std::int64_t(n) * n * n);
    auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
    PlanPair p;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    p.forward = fftw_plan_dft_3d(n, n, n, ptr, ptr, FFTW_FORWARD, flags);
    p.inverse = fftw_plan_dft_3d(n, n, n, ptr, ptr, FFTW_BACKWARD, flags);
    if (!p.forward || !p.inverse) throw std::runtime_error("fft: plan creation failed");
    return cache.emplace(n, p).first->second;
}

}  // namespace

void set_fft_threads(int threads) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    fft_threads = threads < 1 ? 1 : threads;
#ifdef MPS_FFTW_THREADS
    // Affects plans created afterwards; call before the first transform.
    static bool initialized = false;
    if (!initialized) {
        fftw_init_threads();
        initialized = true;
    }
    fftw_plan_with_nthreads(fft_threads);
#else
    (void)fft_threads;
#endif
}

void fft_forward_raw(int n, SpectralArray& data) {
    if (data.size() != std::int64_t(n) * n * n) throw std::invalid_argument("fft: array size does not match grid");
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plans_for(n).forward, ptr, ptr);
}

void fft_inverse_raw(int n, SpectralArray& data) {
    if (data.size() != std::int64_t(n) * n * n) throw std::invalid_argument("fft: array size does not match grid");
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plans_for(n).inverse, ptr, ptr);
}

ScalarField forward_transform(const ScalarSamples& samples) {
    const Grid& g = samples.grid;
    SpectralArray work = samples.values.cast<Complex>();
    fft_forward_raw(g.n(), work);
    work /= double(g.size());
    ScalarField out(g);
    out.coeffs = std::move(work);
    zero_nyquist(g, out.coeffs);
    return out;
}

VectorField forward_transform(const VectorSamples& samples) {
    VectorField out(samples.grid);
    for (int c = 0; c < 3; ++c) {
        ScalarSamples comp(samples.grid, samples.values[c]);
        out.coeffs[c] = forward_transform(comp).coeffs;
    }
    return out;
}

ScalarSamples inverse_transform(const ScalarField& field) {
    const Grid& g = field.grid;
    SpectralArray work = field.coeffs;
    fft_inverse_raw(g.n(), work);
    ScalarSamples out(g);
    out.values = work.real();
    return out;
}

VectorSamples inverse_transform(const VectorField& field) {
    VectorSamples out(field.grid);
    for (int c = 0; c < 3; ++c) {
        ScalarField comp(field.grid, field.coeffs[c]);
        out.values[c] = inverse_transform(comp).values;
    }
    return out;
}

SpectralArray pad_spectrum(const Grid& coarse, const SpectralArray& coeffs, const Grid& fine) {
    if (fine.n() < coarse.n()) throw std::invalid_argument("pad: target grid is coarser than source");
    if (fine.half_period() != coarse.half_period()) throw std::invalid_argument("pad: half-period mismatch");
    const int nc = coarse.n();
    const int nf = fine.n();
    SpectralArray out = SpectralArray::Zero(fine.size());
    for (int i1 = 0; i1 < nc; ++i1) {
        const int k1 = coarse.wave_index(i1);
        if (k1 == nc / 2) continue;
        const int j1 = k1 >= 0 ? k1 : k1 + nf;
        for (int i2 = 0; i2 < nc; ++i2) {
            const int k2 = coarse.wave_index(i2);
            if (k2 == nc / 2) continue;
            const int j2 = k2 >= 0 ? k2 : k2 + nf;
            for (int i3 = 0; i3 < nc; ++i3) {
                const int k3 = coarse.wave_index(i3);
                if (k3 == nc / 2) continue;
                const int j3 = k3 >= 0 ? k3 : k3 + nf;
                out[fine.flat(j1, j2, j3)] = coeffs[coarse.flat(i1, i2, i3)];
            }
        }
    }
    return out;
}

SpectralArray truncate_spectrum(const Grid& fine, const SpectralArray& coeffs, const Grid& coarse) {
    if (fine.n() < coarse.n()) throw std::invalid_argument("truncate: source grid is coarser than target");
    if (fine.half_period() != coarse.half_period()) throw std::invalid_argument("truncate: half-period mismatch");
    const int nc = coarse.n();
    const int nf = fine.n();
    SpectralArray out = SpectralArray::Zero(coarse.size());
    for (int i1 = 0; i1 < nc; ++i1) {
        const int k1 = coarse.wave_index(i1);
        if (k1 == nc / 2) continue;
        const int j1 = k1 >= 0 ? k1 : k1 + nf;
        for (int i2 = 0; i2 < nc; ++i2) {
            const int k2 = coarse.wave_index(i2);
            if (k2 == nc / 2) continue;
            const int j2 = k2 >= 0 ? k2 : k2 + nf;
            for (int i3 = 0; i3 < nc; ++i3) {
                const int k3 = coarse.wave_index(i3);
                if (k3 == nc / 2) continue;
                const int j3 = k3 >= 0 ? k3 : k3 + nf;
                out[coarse.flat(i1, i2, i3)] = coeffs[fine.flat(j1, j2, j3)];
            }
        }
    }
    return out;
}

SampleArray padded_samples(const Grid& grid, const SpectralArray& coeffs, const Grid& fine) {
    SpectralArray work = pad_spectrum(grid, coeffs, fine);
    fft_inverse_raw(fine.n(), work);
    return work.real();
}

const std::vector<std::int64_t>& mirror_table(int n) {
    static std::map<int, std::vector<std::int64_t>> cache;
    static std::mutex mirror_mutex;
    std::lock_guard<std::mutex> lock(mirror_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<std::int64_t> table(std::size_t(n) * n * n);
    for (int i1 = 0; i1 < n; ++i1) {
        const int m1 = i1 == 0 ? 0 : n - i1;
        for (int i2 = 0; i2 < n; ++i2) {
            const int m2 = i2 == 0 ? 0 : n - i2;
            for (int i3 = 0; i3 < n; ++i3) {
                const int m3 = i3 == 0 ? 0 : n - i3;
                table[(std::size_t(i1) * n + i2) * n + i3] =
                    (std::int64_t(m1) * n + m2) * n + m3;
            }
        }
    }
    return cache.emplace(n, std::move(table)).first->second;
}

void padded_samples_pair(const Grid& grid, const SpectralArray& a, const SpectralArray& b,
                         const Grid& fine, SampleArray& out_a, SampleArray& out_b) {
    const int nc = grid.n();
    const int nf = fine.n();
    SpectralArray z = SpectralArray::Zero(fine.size());
    for (int i1 = 0; i1 < nc; ++i1) {
        const int k1 = grid.wave_index(i1);
        if (k1 == nc / 2) continue;
        const int j1 = k1 >= 0 ? k1 : k1 + nf;
        for (int i2 = 0; i2 < nc; ++i2) {
            const int k2 = grid.wave_index(i2);
            if (k2 == nc / 2) continue;
            const int j2 = k2 >= 0 ? k2 : k2 + nf;
            for (int i3 = 0; i3 < nc; ++i3) {
                const int k3 = grid.wave_index(i3);
                if (k3 == nc / 2) continue;
                const int j3 = k3 >= 0 ? k3 : k3 + nf;
                const std::int64_t src = grid.flat(i1, i2, i3);
                z[fine.flat(j1, j2, j3)] = a[src] + Complex(0.0, 1.0) * b[src];
            }
        }
    }
    fft_inverse_raw(nf, z);
    out_a = z.real();
    out_b = z.imag();
}

void forward_truncate_pair(const Grid& fine, const SampleArray& a, const SampleArray& b,
                           const Grid& grid, SpectralArray& out_a, SpectralArray& out_b) {
    const int nc = grid.n();
    const int nf = fine.n();
    SpectralArray z(fine.size());
    z.real() = a;
    z.imag() = b;
    fft_forward_raw(nf, z);
    const double scale = 1.0 / double(fine.size());
    const auto& mirror = mirror_table(nf);
    out_a = SpectralArray::Zero(grid.size());
    out_b = SpectralArray::Zero(grid.size());
    const Complex half(0.5, 0.0);
    const Complex half_i(0.0, -0.5);  // 1/(2i)
    for (int i1 = 0; i1 < nc; ++i1) {
        const int k1 = grid.wave_index(i1);
        if (k1 == nc / 2) continue;
        const int j1 = k1 >= 0 ? k1 : k1 + nf;
        for (int i2 = 0; i2 < nc; ++i2) {
            const int k2 = grid.wave_index(i2);
            if (k2 == nc / 2) continue;
            const int j2 = k2 >= 0 ? k2 : k2 + nf;
            for (int i3 = 0; i3 < nc; ++i3) {
                const int k3 = grid.wave_index(i3);
                if (k3 == nc / 2) continue;
                const int j3 = k3 >= 0 ? k3 : k3 + nf;
                const std::int64_t jf = fine.flat(j1, j2, j3);
                const Complex zk = z[jf] * scale;
                const Complex zmk = std::conj(z[mirror[jf]]) * scale;
                const std::int64_t dst = grid.flat(i1, i2, i3);
                out_a[dst] = half * (zk + zmk);
                out_b[dst] = half_i * (zk - zmk);
            }
        }
    }
}

}  // namespace mps
