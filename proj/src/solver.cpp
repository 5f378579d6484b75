#include "mps/solver.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "mps/norms.hpp"
#include "mps/transform.hpp"
#include "mps/verification.hpp"

namespace mps {

void validate(const SolverParams& params) {
    if (!(params.epsilon > 0.0 && params.epsilon <= 1.0))
        throw std::invalid_argument("epsilon must be in (0,1]");
    if (!(params.r_cut >= 1.0)) throw std::invalid_argument("R_cut must be >= 1");
    if (!(params.kappa >= 1.0)) throw std::invalid_argument("kappa must be >= 1");
    if (!(params.lambda >= 0.0 && params.lambda <= 1.0))
        throw std::invalid_argument("lambda must be in [0,1]");
    if (!(params.damping > 0.0 && params.damping <= 1.0))
        throw std::invalid_argument("damping must be in (0,1]");
    if (params.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
    if (!(params.tol > 0.0)) throw std::invalid_argument("tol must be > 0");
    if (!(params.f.grid == params.g.grid)) throw std::invalid_argument("forcing grids differ");
    const double fn = sobolev_norm(params.f, 0.0);
    if (fn > 0.0 && sobolev_norm(divergence(params.f), 0.0) > 1e-10 * fn)
        throw std::invalid_argument("f must be divergence-free");
}

State operator-(const State& a, const State& b) {
    State out(a.u.grid);
    out.u = a.u - b.u;
    out.omega = a.omega - b.omega;
    return out;
}

double state_e_norm(const State& s, double epsilon) {
    return e_norm(s.u, epsilon) + e_norm(s.omega, epsilon);
}

double state_h1_norm(const State& s) {
    return sobolev_norm(s.u, 1.0) + sobolev_norm(s.omega, 1.0);
}

namespace {

using Vec = Eigen::VectorXcd;

// ---- packing ---------------------------------------------------------------

Vec pack(const State& s) {
    const std::int64_t m = s.u.grid.size();
    Vec out(6 * m);
    for (int c = 0; c < 3; ++c) {
        out.segment(c * m, m) = s.u.coeffs[c].matrix();
        out.segment((3 + c) * m, m) = s.omega.coeffs[c].matrix();
    }
    return out;
}

State unpack(const Grid& grid, const Vec& v) {
    const std::int64_t m = grid.size();
    State s(grid);
    for (int c = 0; c < 3; ++c) {
        s.u.coeffs[c] = v.segment(c * m, m).array();
        s.omega.coeffs[c] = v.segment((3 + c) * m, m).array();
    }
    return s;
}

void zero_mean(State& s) {
    for (int c = 0; c < 3; ++c) {
        s.u.coeffs[c][0] = Complex(0.0, 0.0);
        s.omega.coeffs[c][0] = Complex(0.0, 0.0);
    }
}

bool finite(const State& s) {
    for (int c = 0; c < 3; ++c)
        if (!s.u.coeffs[c].isFinite().all() || !s.omega.coeffs[c].isFinite().all()) return false;
    return true;
}

// ---- operator assembly -------------------------------------------------------

// The pieces of T(U) that are linear in U.
struct LinearPieces {
    VectorField chi2_curl_w;   // [chi^2 (curl w)]
    VectorField chi2_curl_u;   // [chi^2 (curl u)]
    VectorField chi2_w;        // [chi^2 w]
    VectorField grad_chi_div;  // grad [chi div w]

    explicit LinearPieces(const Grid& g)
        : chi2_curl_w(g), chi2_curl_u(g), chi2_w(g), grad_chi_div(g) {}
};

LinearPieces linear_pieces(const State& s, const CutoffWorkspace& chi) {
    LinearPieces p(s.u.grid);
    p.chi2_curl_w = cutoff_sq_multiply(chi, curl(s.omega));
    p.chi2_curl_u = cutoff_sq_multiply(chi, curl(s.u));
    p.chi2_w = cutoff_sq_multiply(chi, s.omega);
    p.grad_chi_div = gradient(cutoff_multiply(chi, divergence(s.omega)));
    return p;
}

// Stacked right-hand side rows of T before the resolvent.
struct Rows {
    VectorField row_u;
    VectorField row_w;
    VectorField adv_u;  // P[((chi u).grad)(chi u)], dealiased
    VectorField adv_w;  // ((chi u).grad)(chi w), dealiased
    LinearPieces lin;

    explicit Rows(const Grid& g) : row_u(g), row_w(g), adv_u(g), adv_w(g), lin(g) {}
};

Rows assemble_rows(const State& s, const SolverParams& params, const CutoffWorkspace& chi) {
    Rows r(s.u.grid);
    r.adv_u = leray_project(mollified_advection(s.u, s.u, chi));
    r.adv_w = mollified_advection(s.u, s.omega, chi);
    r.lin = linear_pieces(s, chi);
    r.row_u = (-1.0) * r.adv_u + 0.5 * r.lin.chi2_curl_w + params.f;
    r.row_w = r.lin.grad_chi_div - r.adv_w - params.kappa * r.lin.chi2_w +
              0.5 * r.lin.chi2_curl_u + params.g;
    return r;
}

State resolve_rows(const Rows& rows, const SolverParams& params) {
    State out(rows.row_u.grid);
    out.u = leray_project(resolvent(rows.row_u, params.epsilon));
    out.omega = resolvent(rows.row_w, params.epsilon);
    return out;
}

// Constant-coefficient symbol eps |xi|^4 + |xi|^2.
Eigen::ArrayXd symbol0(const Grid& g, double epsilon) {
    return epsilon * g.xi_squared().square() + g.xi_squared();
}

VectorField apply_symbol(const VectorField& v, const Eigen::ArrayXd& sym) {
    VectorField out(v.grid);
    for (int c = 0; c < 3; ++c) out.coeffs[c] = sym.cast<Complex>() * v.coeffs[c];
    return out;
}

// A_lambda U = symbol0 U - lambda (linear couplings); identity on the mean.
// Fused kernel: all cutoff products ride batched pair transforms.
Vec linear_apply(const Grid& grid, const SolverParams& params, const CutoffWorkspace& chi,
                 const Eigen::ArrayXd& sym, const Vec& x) {
    State s = unpack(grid, x);
    const double lam = params.lambda;
    const Grid& fine = chi.fine_grid();

    const VectorField curl_w = curl(s.omega);
    const VectorField curl_u = curl(s.u);
    const ScalarField divw = divergence(s.omega);

    SampleArray cw[3], cu[3], w[3], dw;
    padded_samples_pair(grid, curl_w.coeffs[0], curl_w.coeffs[1], fine, cw[0], cw[1]);
    padded_samples_pair(grid, curl_w.coeffs[2], s.omega.coeffs[0], fine, cw[2], w[0]);
    padded_samples_pair(grid, s.omega.coeffs[1], s.omega.coeffs[2], fine, w[1], w[2]);
    padded_samples_pair(grid, curl_u.coeffs[0], curl_u.coeffs[1], fine, cu[0], cu[1]);
    padded_samples_pair(grid, curl_u.coeffs[2], divw.coeffs, fine, cu[2], dw);

    const SampleArray& chi2 = chi.chi_sq_fine();
    SampleArray p0 = chi2 * cw[0];
    SampleArray p1 = chi2 * cw[1];
    SampleArray p2 = chi2 * cw[2];
    SampleArray q0 = chi2 * (params.kappa * w[0] - 0.5 * cu[0]);
    SampleArray q1 = chi2 * (params.kappa * w[1] - 0.5 * cu[1]);
    SampleArray q2 = chi2 * (params.kappa * w[2] - 0.5 * cu[2]);
    SampleArray s1 = chi.chi_fine() * dw;

    VectorField pf(grid), qf(grid);
    ScalarField s1f(grid);
    forward_truncate_pair(fine, p0, p1, grid, pf.coeffs[0], pf.coeffs[1]);
    forward_truncate_pair(fine, p2, q0, grid, pf.coeffs[2], qf.coeffs[0]);
    forward_truncate_pair(fine, q1, q2, grid, qf.coeffs[1], qf.coeffs[2]);
    s1f.coeffs = fine_forward_truncate(fine, s1, grid);

    State out(grid);
    out.u = apply_symbol(s.u, sym) - (0.5 * lam) * leray_project(pf);
    out.omega = apply_symbol(s.omega, sym) + lam * qf - lam * gradient(s1f);
    for (int c = 0; c < 3; ++c) {
        out.u.coeffs[c][0] = s.u.coeffs[c][0];
        out.omega.coeffs[c][0] = s.omega.coeffs[c][0];
    }
    return pack(out);
}

// ---- GMRES -------------------------------------------------------------------

struct GmresOutcome {
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

template <typename MatVec, typename Precond>
GmresOutcome gmres(const MatVec& matvec, const Precond& precond, const Vec& b, Vec& x,
                   double tol_abs, int restart, int max_total) {
    GmresOutcome out;
    Vec r = b - matvec(x);
    double beta = r.norm();
    out.residual = beta;
    if (beta <= tol_abs) {
        out.converged = true;
        return out;
    }

    while (out.iterations < max_total) {
        const int m = std::min(restart, max_total - out.iterations);
        std::vector<Vec> basis;
        basis.reserve(m + 1);
        basis.push_back(r / beta);
        Eigen::MatrixXcd hess = Eigen::MatrixXcd::Zero(m + 1, m);
        int k = 0;
        bool breakdown = false;

        for (int j = 0; j < m; ++j) {
            Vec w = matvec(precond(basis[j]));
            for (int i = 0; i <= j; ++i) {
                const Complex h = basis[i].dot(w);
                hess(i, j) = h;
                w -= h * basis[i];
            }
            const double hn = w.norm();
            hess(j + 1, j) = hn;
            k = j + 1;
            ++out.iterations;
            if (hn < 1e-300) {
                breakdown = true;
                break;
            }
            basis.push_back(w / hn);

            // Small least-squares residual check.
            Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(j + 2);
            rhs[0] = beta;
            Eigen::VectorXcd y = hess.topLeftCorner(j + 2, j + 1).householderQr().solve(rhs);
            const double res = (rhs - hess.topLeftCorner(j + 2, j + 1) * y).norm();
            if (res <= tol_abs || out.iterations >= max_total) {
                k = j + 1;
                break;
            }
        }

        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(k + 1);
        rhs[0] = beta;
        Eigen::VectorXcd y = hess.topLeftCorner(k + 1, k).householderQr().solve(rhs);
        Vec z = Vec::Zero(x.size());
        for (int i = 0; i < k; ++i) z += y[i] * basis[i];
        x += precond(z);

        r = b - matvec(x);
        beta = r.norm();
        out.residual = beta;
        if (beta <= tol_abs) {
            out.converged = true;
            return out;
        }
        if (breakdown) return out;
    }
    return out;
}

double max_norm(std::initializer_list<double> values) {
    double m = 1e-300;
    for (double v : values) m = std::max(m, v);
    return m;
}

}  // namespace

State apply_T(const State& state, const SolverParams& params, const CutoffWorkspace& cutoff) {
    return resolve_rows(assemble_rows(state, params, cutoff), params);
}

State apply_T(const State& state, const SolverParams& params) {
    CutoffWorkspace chi(CutoffSpec{params.r_cut, CutoffSpec::Family::Theta}, state.u.grid);
    return apply_T(state, params, chi);
}

double apriori_bound(const SolverParams& params) {
    const double fn = sobolev_norm(params.f, -1.0);
    const double gn = sobolev_norm(params.g, -1.0);
    return fn * fn + gn * gn;
}

SolveResult picard_solve(const SolverParams& params) {
    return picard_solve(params, State(params.f.grid));
}

SolveResult picard_solve(const SolverParams& params, const State& init) {
    validate(params);
    const Grid& grid = params.f.grid;
    if (!(init.u.grid == grid)) throw std::invalid_argument("picard_solve: init grid mismatch");

    const CutoffWorkspace chi(CutoffSpec{params.r_cut, CutoffSpec::Family::Theta}, grid);
    const Eigen::ArrayXd sym = symbol0(grid, params.epsilon);
    const double lam = params.lambda;

    // Two-region preconditioner. The u rows invert the plain symbol. For
    // the omega rows the kappa mass acts only under the cutoff plateau, so
    // the constant-coefficient solves with and without the kappa shift are
    // blended by the sampled plateau mask; this keeps both the interior
    // (kappa-dominated) and far-field (Stokes-like) modes well scaled.
    const std::int64_t m = grid.size();
    Eigen::ArrayXd pre_u(m), s0_inv(m), sk_inv(m);
    for (std::int64_t i = 0; i < m; ++i) {
        pre_u[i] = sym[i] == 0.0 ? 1.0 : 1.0 / sym[i];
        s0_inv[i] = pre_u[i];
        sk_inv[i] = sym[i] == 0.0 ? 1.0 : 1.0 / (sym[i] + lam * params.kappa);
    }
    SampleArray mask_in(m);
    {
        const int n = grid.n();
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2)
                for (int i3 = 0; i3 < n; ++i3) {
                    const double x1 = grid.coordinate(i1);
                    const double x2 = grid.coordinate(i2);
                    const double x3 = grid.coordinate(i3);
                    const double r = std::sqrt(x1 * x1 + x2 * x2 + x3 * x3);
                    const double th = cutoff_profile(r / params.r_cut);
                    mask_in[grid.flat(i1, i2, i3)] = th * th;
                }
    }
    const SampleArray mask_out = 1.0 - mask_in;
    auto precond = [&](const Vec& v) {
        Vec out(v.size());
        for (int c = 0; c < 3; ++c)
            out.segment(c * m, m) = v.segment(c * m, m).array() * pre_u.cast<Complex>();
        for (int c = 0; c < 3; ++c) {
            const auto vw = v.segment((3 + c) * m, m).array();
            // Both solves share one inverse transform: the Krylov vectors
            // stay Hermitian (real coefficients in the small problem), so
            // a + i b packing splits exactly.
            SpectralArray z =
                vw * s0_inv.cast<Complex>() + Complex(0.0, 1.0) * (vw * sk_inv.cast<Complex>());
            fft_inverse_raw(grid.n(), z);
            SampleArray blended = mask_out * z.real() + mask_in * z.imag();
            SpectralArray back = blended.cast<Complex>();
            fft_forward_raw(grid.n(), back);
            back /= double(m);
            zero_nyquist(grid, back);
            out.segment((3 + c) * m, m) = back;
        }
        return out;
    };
    auto matvec = [&](const Vec& v) { return linear_apply(grid, params, chi, sym, v); };

    SolveResult result{State(grid), {}, SolveStatus::MaxIterations, 0.0, {}};
    State U = init;
    U.u = leray_project(U.u);
    zero_mean(U);

    Vec g_prev;
    bool have_g_prev = false;
    double last_update = 0.0;

    for (int iter = 0;; ++iter) {
        const Rows rows = assemble_rows(U, params, chi);
        const State TU = resolve_rows(rows, params);
        State fp_diff(grid);
        fp_diff.u = U.u - lam * TU.u;
        fp_diff.omega = U.omega - lam * TU.omega;
        const double fp_res = state_e_norm(fp_diff, params.epsilon);

        // Mollified-system residuals relative to the largest constituent,
        // taken over the nonzero modes (mean-free gauge). The momentum row
        // is audited in its Leray-projected form, which is the equation the
        // fixed point actually satisfies (the u output is re-projected).
        {
            VectorField mf_u = apply_symbol(U.u, sym) - lam * leray_project(rows.row_u);
            VectorField mf_w = apply_symbol(U.omega, sym) - lam * rows.row_w;
            for (int c = 0; c < 3; ++c) {
                mf_u.coeffs[c][0] = Complex(0.0, 0.0);
                mf_w.coeffs[c][0] = Complex(0.0, 0.0);
            }
            const double scale_u = max_norm(
                {params.epsilon * sobolev_norm(U.u, 4.0), sobolev_norm(U.u, 2.0),
                 lam * sobolev_norm(rows.adv_u, 0.0),
                 0.5 * lam * sobolev_norm(rows.lin.chi2_curl_w, 0.0),
                 lam * sobolev_norm(params.f, 0.0)});
            const double scale_w = max_norm(
                {params.epsilon * sobolev_norm(U.omega, 4.0), sobolev_norm(U.omega, 2.0),
                 lam * sobolev_norm(rows.lin.grad_chi_div, 0.0),
                 lam * sobolev_norm(rows.adv_w, 0.0),
                 lam * params.kappa * sobolev_norm(rows.lin.chi2_w, 0.0),
                 0.5 * lam * sobolev_norm(rows.lin.chi2_curl_u, 0.0),
                 lam * sobolev_norm(params.g, 0.0)});
            result.trace.r_mom.push_back(sobolev_norm(mf_u, 0.0) / scale_u);
            result.trace.r_mic.push_back(sobolev_norm(mf_w, 0.0) / scale_w);
        }

        result.trace.h1_u.push_back(sobolev_norm(U.u, 1.0));
        result.trace.h1_w.push_back(sobolev_norm(U.omega, 1.0));
        result.trace.sqrt_eps_h2_u.push_back(std::sqrt(params.epsilon) * sobolev_norm(U.u, 2.0));
        result.trace.sqrt_eps_h2_w.push_back(std::sqrt(params.epsilon) *
                                             sobolev_norm(U.omega, 2.0));
        result.trace.update_norm.push_back(last_update);
        result.trace.energy_gap.push_back(energy_ledger(U, params, lam, chi).gap);

        if (fp_res < params.tol) {
            result.state = U;
            result.status = SolveStatus::Converged;
            result.fixed_point_residual = fp_res;
            return result;
        }
        if (iter >= params.max_iters) {
            result.state = U;
            result.status = SolveStatus::MaxIterations;
            result.fixed_point_residual = fp_res;
            result.diagnosis = "fixed-point residual above tol after max_iters";
            return result;
        }

        // Implicit update: solve A_lambda G = lambda (N(U) + F).
        State nb(grid);
        nb.u = lam * ((-1.0) * rows.adv_u + params.f);
        nb.omega = lam * ((-1.0) * rows.adv_w + params.g);
        zero_mean(nb);
        const Vec b = pack(nb);

        const Vec xu = pack(U);
        const double outer_res = (b - matvec(xu)).norm();
        const double tol_inner = std::max(1e-14 * std::max(b.norm(), 1e-300), 0.02 * outer_res);

        Vec G = have_g_prev ? g_prev : xu;
        const GmresOutcome gm = gmres(matvec, precond, b, G, tol_inner, 150, 900);
        if (!gm.converged && gm.residual > 0.5 * std::max(outer_res, 1e-300)) {
            result.state = U;
            result.status = SolveStatus::LinearSolveFailure;
            result.fixed_point_residual = fp_res;
            result.diagnosis = "inner linear solve stagnated";
            return result;
        }
        g_prev = G;
        have_g_prev = true;

        State Gs = unpack(grid, G);
        Gs.u = leray_project(Gs.u);
        zero_mean(Gs);

        State next(grid);
        const double a = params.damping;
        next.u = (1.0 - a) * U.u + a * Gs.u;
        next.omega = (1.0 - a) * U.omega + a * Gs.omega;

        last_update = state_e_norm(next - U, params.epsilon);
        U = next;

        if (!finite(U) || state_h1_norm(U) > 1e6) {
            result.state = U;
            result.status = SolveStatus::BlowUp;
            result.fixed_point_residual = std::numeric_limits<double>::infinity();
            result.diagnosis = "state norm exceeded blow-up threshold 1e6";
            return result;
        }
    }
}

std::vector<HomotopyRow> homotopy_scan(const SolverParams& params,
                                       const std::vector<double>& lambdas) {
    for (double l : lambdas)
        if (l < 0.0 || l > 1.0) throw std::invalid_argument("homotopy_scan: lambda outside [0,1]");

    std::vector<HomotopyRow> rows;
    rows.reserve(lambdas.size());
    for (double l : lambdas) {
        SolverParams p = params;
        p.lambda = l;
        const SolveResult sol = picard_solve(p);
        HomotopyRow row;
        row.lambda = l;
        row.h1_u = sobolev_norm(sol.state.u, 1.0);
        row.h1_w = sobolev_norm(sol.state.omega, 1.0);
        row.e_u = e_norm(sol.state.u, p.epsilon);
        row.e_w = e_norm(sol.state.omega, p.epsilon);
        const double h2u = sobolev_norm(sol.state.u, 2.0);
        const double h2w = sobolev_norm(sol.state.omega, 2.0);
        row.energy_left = p.epsilon * (h2u * h2u + h2w * h2w) + row.h1_u * row.h1_u +
                          row.h1_w * row.h1_w;
        row.converged = sol.status == SolveStatus::Converged;
        rows.push_back(row);
    }

    // Flag rows whose energy left side exceeds the lambda = 1 reference.
    const double* ref = nullptr;
    for (const auto& r : rows)
        if (r.lambda == 1.0) ref = &r.energy_left;
    if (ref) {
        for (auto& r : rows) r.flagged = r.energy_left > 1.05 * (*ref) + 1e-30;
    }
    return rows;
}

ContinuationResult continuation(const SolverParams& params, const std::vector<double>& epsilons,
                                const std::vector<double>& radii) {
    if (epsilons.empty() || radii.empty())
        throw std::invalid_argument("continuation: parameter lists must be nonempty");
    for (std::size_t i = 1; i < epsilons.size(); ++i)
        if (!(epsilons[i] < epsilons[i - 1]))
            throw std::invalid_argument("continuation: epsilon_list must be strictly descending");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] > radii[i - 1]))
            throw std::invalid_argument("continuation: R_list must be strictly ascending");
    const double box = std::numbers::pi * params.f.grid.half_period();
    for (double r : radii)
        if (2.0 * r > box)
            throw std::invalid_argument("continuation: cutoff support exceeds the box (2R > pi L)");

    ContinuationResult out;
    State warm(params.f.grid);
    bool have_prev = false;
    State prev(params.f.grid);

    for (double eps : epsilons) {
        for (double r : radii) {
            SolverParams p = params;
            p.epsilon = eps;
            p.r_cut = r;
            const SolveResult sol = picard_solve(p, warm);
            ContinuationCell cell;
            cell.epsilon = eps;
            cell.r_cut = r;
            cell.h1_u = sobolev_norm(sol.state.u, 1.0);
            cell.h1_w = sobolev_norm(sol.state.omega, 1.0);
            cell.converged = sol.status == SolveStatus::Converged;
            cell.diff_prev_h1 = have_prev ? state_h1_norm(sol.state - prev) : 0.0;
            out.cells.push_back(cell);
            out.states.push_back(sol.state);
            prev = sol.state;
            warm = sol.state;
            have_prev = true;
        }
    }
    return out;
}

}  // namespace mps
