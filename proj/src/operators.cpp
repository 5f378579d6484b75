#include "mps/operators.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mps/norms.hpp"
#include "mps/transform.hpp"

namespace mps {

namespace {

const Complex kI(0.0, 1.0);

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

}  // namespace

VectorField gradient(const ScalarField& f) {
    VectorField out(f.grid);
    for (int a = 0; a < 3; ++a)
        out.coeffs[a] = kI * f.grid.xi_component(a).cast<Complex>() * f.coeffs;
    return out;
}

ScalarField divergence(const VectorField& v) {
    ScalarField out(v.grid);
    for (int a = 0; a < 3; ++a)
        out.coeffs += kI * v.grid.xi_component(a).cast<Complex>() * v.coeffs[a];
    return out;
}

VectorField curl(const VectorField& v) {
    VectorField out(v.grid);
    const Grid& g = v.grid;
    auto xi = [&](int a) { return g.xi_component(a).cast<Complex>(); };
    out.coeffs[0] = kI * (xi(1) * v.coeffs[2] - xi(2) * v.coeffs[1]);
    out.coeffs[1] = kI * (xi(2) * v.coeffs[0] - xi(0) * v.coeffs[2]);
    out.coeffs[2] = kI * (xi(0) * v.coeffs[1] - xi(1) * v.coeffs[0]);
    return out;
}

ScalarField laplacian(const ScalarField& f) {
    ScalarField out(f.grid);
    out.coeffs = -f.grid.xi_squared().cast<Complex>() * f.coeffs;
    return out;
}

VectorField laplacian(const VectorField& v) {
    VectorField out(v.grid);
    for (int a = 0; a < 3; ++a)
        out.coeffs[a] = -v.grid.xi_squared().cast<Complex>() * v.coeffs[a];
    return out;
}

double relative_divergence(const VectorField& v) {
    const double scale = sobolev_norm(v, 0.0);
    if (scale == 0.0) return 0.0;
    return sobolev_norm(divergence(v), 0.0) / scale;
}

VectorField leray_project(const VectorField& v) {
    const Grid& g = v.grid;
    VectorField out(g);
    const std::int64_t total = g.size();
    for (std::int64_t i = 0; i < total; ++i) {
        const double k2 = g.xi_squared()[i];
        if (k2 == 0.0) {
            for (int a = 0; a < 3; ++a) out.coeffs[a][i] = v.coeffs[a][i];
            continue;
        }
        Complex kdotv(0.0, 0.0);
        for (int a = 0; a < 3; ++a) kdotv += g.xi_component(a)[i] * v.coeffs[a][i];
        for (int a = 0; a < 3; ++a)
            out.coeffs[a][i] = v.coeffs[a][i] - g.xi_component(a)[i] * kdotv / k2;
    }
    return out;
}

namespace {

double resolvent_symbol(double k2, double epsilon) {
    return 1.0 / (epsilon * k2 * k2 + k2);
}

}  // namespace

ScalarField resolvent(const ScalarField& f, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("resolvent: epsilon must be > 0");
    ScalarField out(f.grid);
    const std::int64_t total = f.grid.size();
    for (std::int64_t i = 0; i < total; ++i) {
        const double k2 = f.grid.xi_squared()[i];
        out.coeffs[i] = k2 == 0.0 ? Complex(0.0, 0.0) : f.coeffs[i] * resolvent_symbol(k2, epsilon);
    }
    return out;
}

VectorField resolvent(const VectorField& f, double epsilon) {
    VectorField out(f.grid);
    for (int a = 0; a < 3; ++a) {
        ScalarField comp(f.grid, f.coeffs[a]);
        out.coeffs[a] = resolvent(comp, epsilon).coeffs;
    }
    return out;
}

double multiplier_sup(const ResolventSpec& spec, double xi_max) {
    if (!(xi_max > 0.0)) throw std::invalid_argument("multiplier_sup: xi_max must be > 0");
    if (!(spec.epsilon > 0.0)) throw std::invalid_argument("multiplier_sup: epsilon must be > 0");
    if (spec.sigma < 1.0 || spec.sigma > 2.0)
        throw std::invalid_argument("multiplier_sup: sigma must be in [1, 2]");
    // Log-spaced scan; the symbol is smooth and unimodal-ish on (0, inf).
    const int samples = 200000;
    const double lo = std::min(1e-8, xi_max * 1e-8);
    const double ratio = std::log(xi_max / lo);
    double sup = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double xi = lo * std::exp(ratio * double(i) / samples);
        const double k2 = xi * xi;
        const double val = std::pow(k2, spec.sigma) * resolvent_symbol(k2, spec.epsilon);
        sup = std::max(sup, val);
    }
    return sup;
}

// ---- cutoff profile ------------------------------------------------------------

double cutoff_profile(double r) {
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    const double t = r - 1.0;
    return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double cutoff_profile_d1(double r) {
    if (r <= 1.0 || r >= 2.0) return 0.0;
    const double t = r - 1.0;
    return -30.0 * t * t * (1.0 - t) * (1.0 - t);
}

double cutoff_profile_d2(double r) {
    if (r <= 1.0 || r >= 2.0) return 0.0;
    const double t = r - 1.0;
    return -60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
}

ScalarSamples cutoff_field(const CutoffSpec& spec, const Grid& grid) {
    if (!(spec.radius >= 1.0)) throw std::invalid_argument("cutoff: radius must be >= 1");
    if (2.0 * spec.radius > std::numbers::pi * grid.half_period())
        throw std::invalid_argument("cutoff: support exceeds the box (2R > pi L)");
    ScalarSamples out(grid);
    const int n = grid.n();
    for (int i1 = 0; i1 < n; ++i1) {
        const double x1 = grid.coordinate(i1);
        for (int i2 = 0; i2 < n; ++i2) {
            const double x2 = grid.coordinate(i2);
            for (int i3 = 0; i3 < n; ++i3) {
                const double x3 = grid.coordinate(i3);
                const double r = std::sqrt(x1 * x1 + x2 * x2 + x3 * x3);
                out.values[grid.flat(i1, i2, i3)] = cutoff_profile(r / spec.radius);
            }
        }
    }
    return out;
}

CutoffWorkspace::CutoffWorkspace(const CutoffSpec& spec, const Grid& grid)
    : spec_(spec), grid_(grid), fine_(make_grid(2 * grid.n(), grid.half_period())) {
    // Sample the radial profile on the state grid; no 2R <= pi L check here
    // so that a huge radius degenerates to chi == 1 (the cutoff-free limit).
    ScalarSamples samples(grid_);
    const int n = grid_.n();
    for (int i1 = 0; i1 < n; ++i1) {
        const double x1 = grid_.coordinate(i1);
        for (int i2 = 0; i2 < n; ++i2) {
            const double x2 = grid_.coordinate(i2);
            for (int i3 = 0; i3 < n; ++i3) {
                const double x3 = grid_.coordinate(i3);
                const double r = std::sqrt(x1 * x1 + x2 * x2 + x3 * x3);
                samples.values[grid_.flat(i1, i2, i3)] = cutoff_profile(r / spec_.radius);
            }
        }
    }
    chi_spec_ = forward_transform(samples).coeffs;
    chi_fine_ = fine_samples(grid_, chi_spec_, fine_);
    chi_sq_fine_ = chi_fine_ * chi_fine_;
    ScalarField chi_field(grid_, chi_spec_);
    VectorField grad_chi = gradient(chi_field);
    for (int a = 0; a < 3; ++a)
        grad_chi_fine_[a] = fine_samples(grid_, grad_chi.coeffs[a], fine_);
}

SampleArray fine_samples(const Grid& grid, const SpectralArray& coeffs, const Grid& fine) {
    return padded_samples(grid, coeffs, fine);
}

SpectralArray fine_forward_truncate(const Grid& fine, const SampleArray& samples, const Grid& grid) {
    SpectralArray work = samples.cast<Complex>();
    fft_forward_raw(fine.n(), work);
    work /= double(fine.size());
    return truncate_spectrum(fine, work, grid);
}

double fine_integral(const Grid& fine, const SampleArray& integrand) {
    return fine.cell_volume() * integrand.sum();
}

ScalarField cutoff_multiply(const CutoffWorkspace& cutoff, const ScalarField& s) {
    require_same_grid(s.grid, cutoff.grid(), "cutoff_multiply");
    const Grid& fine = cutoff.fine_grid();
    SampleArray prod = fine_samples(s.grid, s.coeffs, fine) * cutoff.chi_fine();
    return ScalarField(s.grid, fine_forward_truncate(fine, prod, s.grid));
}

VectorField cutoff_sq_multiply(const CutoffWorkspace& cutoff, const VectorField& v) {
    require_same_grid(v.grid, cutoff.grid(), "cutoff_sq_multiply");
    const Grid& fine = cutoff.fine_grid();
    VectorField out(v.grid);
    for (int c = 0; c < 3; ++c) {
        SampleArray prod = fine_samples(v.grid, v.coeffs[c], fine) * cutoff.chi_sq_fine();
        out.coeffs[c] = fine_forward_truncate(fine, prod, v.grid);
    }
    return out;
}

namespace {

// Physical fine-grid samples of three spectral components using the
// paired-transform trick (two real fields per complex FFT).
void fine_triple(const Grid& g, const SpectralArray* comps, const Grid& fine, SampleArray* out) {
    padded_samples_pair(g, comps[0], comps[1], fine, out[0], out[1]);
    out[2] = fine_samples(g, comps[2], fine);
}

// Shared core of the advection products. chi may be null (chi == 1).
VectorField advection_impl(const VectorField& a, const VectorField& b, const Grid& fine,
                           const SampleArray* chi) {
    require_same_grid(a.grid, b.grid, "advection");
    const Grid& g = a.grid;

    const VectorField ad = dealias(a);
    const VectorField bd = dealias(b);

    // (chi a) on the fine grid.
    SampleArray amod[3];
    fine_triple(g, ad.coeffs.data(), fine, amod);
    if (chi)
        for (int c = 0; c < 3; ++c) amod[c] *= *chi;

    // Spectral representation of (chi b) for exact differentiation; the
    // full fine spectrum is needed, so the truncating pair helper does not
    // apply here.
    SpectralArray tb[3];
    if (chi) {
        SampleArray bs[3];
        fine_triple(g, bd.coeffs.data(), fine, bs);
        for (int c = 0; c < 3; c += 2) {
            // Pack two chi-products per forward transform.
            if (c + 1 < 3) {
                SpectralArray z(fine.size());
                z.real() = bs[c] * (*chi);
                z.imag() = bs[c + 1] * (*chi);
                fft_forward_raw(fine.n(), z);
                z /= double(fine.size());
                const auto& mirror = mirror_table(fine.n());
                tb[c].resize(fine.size());
                tb[c + 1].resize(fine.size());
                for (std::int64_t i = 0; i < fine.size(); ++i) {
                    const Complex zk = z[i];
                    const Complex zmk = std::conj(z[mirror[i]]);
                    tb[c][i] = 0.5 * (zk + zmk);
                    tb[c + 1][i] = Complex(0.0, -0.5) * (zk - zmk);
                }
            } else {
                SpectralArray z = (bs[c] * (*chi)).cast<Complex>();
                fft_forward_raw(fine.n(), z);
                tb[c] = z / double(fine.size());
            }
        }
    } else {
        for (int c = 0; c < 3; ++c) tb[c] = pad_spectrum(g, bd.coeffs[c], fine);
    }

    // 9 derivative fields, inverse-transformed in pairs.
    SampleArray deriv[3][3];
    {
        SpectralArray pending;
        int pend_i = -1, pend_j = -1;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                SpectralArray dj = kI * fine.xi_component(j).cast<Complex>() * tb[i];
                if (pend_i < 0) {
                    pending = std::move(dj);
                    pend_i = i;
                    pend_j = j;
                } else {
                    SpectralArray z = pending + Complex(0.0, 1.0) * dj;
                    fft_inverse_raw(fine.n(), z);
                    deriv[pend_i][pend_j] = z.real();
                    deriv[i][j] = z.imag();
                    pend_i = -1;
                }
            }
        if (pend_i >= 0) {
            fft_inverse_raw(fine.n(), pending);
            deriv[pend_i][pend_j] = pending.real();
        }
    }

    VectorField out(g);
    SampleArray acc[3];
    for (int i = 0; i < 3; ++i) {
        acc[i] = amod[0] * deriv[i][0] + amod[1] * deriv[i][1] + amod[2] * deriv[i][2];
    }
    forward_truncate_pair(fine, acc[0], acc[1], g, out.coeffs[0], out.coeffs[1]);
    out.coeffs[2] = fine_forward_truncate(fine, acc[2], g);
    return dealias(out);
}

}  // namespace

VectorField mollified_advection(const VectorField& a, const VectorField& b,
                                const CutoffWorkspace& cutoff) {
    require_same_grid(a.grid, cutoff.grid(), "mollified_advection");
    return advection_impl(a, b, cutoff.fine_grid(), &cutoff.chi_fine());
}

VectorField mollified_advection(const VectorField& a, const VectorField& b,
                                const CutoffSpec& spec) {
    CutoffWorkspace ws(spec, a.grid);
    return mollified_advection(a, b, ws);
}

VectorField advection(const VectorField& a, const VectorField& b) {
    const Grid fine = make_grid(2 * a.grid.n(), a.grid.half_period());
    return advection_impl(a, b, fine, nullptr);
}

ScalarField div_div_outer(const VectorField& u) {
    const Grid& g = u.grid;
    const Grid fine = make_grid(2 * g.n(), g.half_period());
    const VectorField ud = dealias(u);

    SampleArray comp[3];
    for (int c = 0; c < 3; ++c) comp[c] = fine_samples(g, ud.coeffs[c], fine);

    ScalarField out(g);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (j < i) continue;
            SpectralArray tij = fine_forward_truncate(fine, SampleArray(comp[i] * comp[j]), g);
            const auto xi_i = g.xi_component(i);
            const auto xi_j = g.xi_component(j);
            const double w = i == j ? 1.0 : 2.0;
            out.coeffs += (-w) * (xi_i * xi_j).cast<Complex>() * tij;
        }
    }
    return out;
}

ScalarField pressure_from_velocity(const VectorField& u) {
    const Grid& g = u.grid;
    const ScalarField rhs = div_div_outer(u);
    ScalarField p(g);
    const std::int64_t total = g.size();
    for (std::int64_t i = 0; i < total; ++i) {
        const double k2 = g.xi_squared()[i];
        p.coeffs[i] = k2 == 0.0 ? Complex(0.0, 0.0) : rhs.coeffs[i] / k2;
    }
    return p;
}

}  // namespace mps
