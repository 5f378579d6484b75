#include "mps/verification.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mps/norms.hpp"
#include "mps/transform.hpp"

namespace mps {

double ledger_gap(double left, double right) {
    return std::abs(left - right) / std::max({std::abs(left), std::abs(right), 1e-300});
}

namespace {

double max_of(std::initializer_list<double> values) {
    double m = 1e-300;
    for (double v : values) m = std::max(m, v);
    return m;
}

void zero_mean(VectorField& v) {
    for (int c = 0; c < 3; ++c) v.coeffs[c][0] = Complex(0.0, 0.0);
}

Eigen::ArrayXd symbol0(const Grid& g, double epsilon) {
    return epsilon * g.xi_squared().square() + g.xi_squared();
}

VectorField apply_symbol(const VectorField& v, const Eigen::ArrayXd& sym) {
    VectorField out(v.grid);
    for (int c = 0; c < 3; ++c) out.coeffs[c] = sym.cast<Complex>() * v.coeffs[c];
    return out;
}

}  // namespace

ResidualReport residuals(const State& state, const ScalarField* p, const SolverParams& params,
                         SystemForm form) {
    const Grid& grid = state.u.grid;
    const double lam = params.lambda;
    ResidualReport report;

    if (form == SystemForm::Mollified) {
        const CutoffWorkspace chi(CutoffSpec{params.r_cut, CutoffSpec::Family::Theta}, grid);
        const VectorField adv_u = leray_project(mollified_advection(state.u, state.u, chi));
        const VectorField adv_w = mollified_advection(state.u, state.omega, chi);
        const VectorField c2cw = cutoff_sq_multiply(chi, curl(state.omega));
        const VectorField c2cu = cutoff_sq_multiply(chi, curl(state.u));
        const VectorField c2w = cutoff_sq_multiply(chi, state.omega);
        const VectorField gcd = gradient(cutoff_multiply(chi, divergence(state.omega)));

        const Eigen::ArrayXd sym = symbol0(grid, params.epsilon);
        // The momentum row is evaluated in its Leray-projected form: the
        // solver's u output is re-projected, so the fixed point satisfies
        // the projected equation (the unprojected row differs by the
        // gradient part of the chi^2 curl coupling).
        VectorField row_u = leray_project((-1.0) * adv_u + 0.5 * c2cw + params.f);
        VectorField row_w = gcd - adv_w - params.kappa * c2w + 0.5 * c2cu + params.g;
        VectorField res_u = apply_symbol(state.u, sym) - lam * row_u;
        VectorField res_w = apply_symbol(state.omega, sym) - lam * row_w;
        zero_mean(res_u);
        zero_mean(res_w);

        const double scale_u = max_of(
            {params.epsilon * sobolev_norm(state.u, 4.0), sobolev_norm(state.u, 2.0),
             lam * sobolev_norm(adv_u, 0.0), 0.5 * lam * sobolev_norm(c2cw, 0.0),
             lam * sobolev_norm(params.f, 0.0)});
        const double scale_w = max_of(
            {params.epsilon * sobolev_norm(state.omega, 4.0), sobolev_norm(state.omega, 2.0),
             lam * sobolev_norm(gcd, 0.0), lam * sobolev_norm(adv_w, 0.0),
             lam * params.kappa * sobolev_norm(c2w, 0.0), 0.5 * lam * sobolev_norm(c2cu, 0.0),
             lam * sobolev_norm(params.g, 0.0)});
        report.r_mom = sobolev_norm(res_u, 0.0) / scale_u;
        report.r_mic = sobolev_norm(res_w, 0.0) / scale_w;
        return report;
    }

    // Original system: lap u - (u.grad)u - grad p + curl(w)/2 + f = 0 and
    // lap w + grad div w - kappa w - (u.grad)w + curl(u)/2 + g = 0.
    ScalarField pressure = p ? *p : pressure_from_velocity(state.u);
    const VectorField adv_u = advection(state.u, state.u);
    const VectorField adv_w = advection(state.u, state.omega);
    const VectorField lap_u = laplacian(state.u);
    const VectorField lap_w = laplacian(state.omega);
    const VectorField grad_p = gradient(pressure);
    const VectorField curl_w = curl(state.omega);
    const VectorField curl_u = curl(state.u);
    const VectorField gdw = gradient(divergence(state.omega));

    VectorField res_u = lap_u - adv_u - grad_p + 0.5 * curl_w + params.f;
    VectorField res_w = lap_w + gdw - params.kappa * state.omega - adv_w + 0.5 * curl_u +
                        params.g;
    zero_mean(res_u);
    zero_mean(res_w);

    const double scale_u =
        max_of({sobolev_norm(lap_u, 0.0), sobolev_norm(adv_u, 0.0), sobolev_norm(grad_p, 0.0),
                0.5 * sobolev_norm(curl_w, 0.0), sobolev_norm(params.f, 0.0)});
    const double scale_w =
        max_of({sobolev_norm(lap_w, 0.0), sobolev_norm(gdw, 0.0),
                params.kappa * sobolev_norm(state.omega, 0.0), sobolev_norm(adv_w, 0.0),
                0.5 * sobolev_norm(curl_u, 0.0), sobolev_norm(params.g, 0.0)});
    report.r_mom = sobolev_norm(res_u, 0.0) / scale_u;
    report.r_mic = sobolev_norm(res_w, 0.0) / scale_w;
    return report;
}

LedgerReport energy_ledger(const State& state, const SolverParams& params, double lambda) {
    const CutoffWorkspace chi(CutoffSpec{params.r_cut, CutoffSpec::Family::Theta}, state.u.grid);
    return energy_ledger(state, params, lambda, chi);
}

LedgerReport energy_ledger(const State& state, const SolverParams& params, double lambda,
                           const CutoffWorkspace& chi) {
    const Grid& grid = state.u.grid;
    const Grid& fine = chi.fine_grid();

    SampleArray u_m[3], w_m[3], cu_m[3], cw_m[3];
    const VectorField curl_u = curl(state.u);
    const VectorField curl_w = curl(state.omega);
    for (int c = 0; c < 3; ++c) {
        u_m[c] = fine_samples(grid, state.u.coeffs[c], fine);
        w_m[c] = fine_samples(grid, state.omega.coeffs[c], fine);
        cu_m[c] = fine_samples(grid, curl_u.coeffs[c], fine);
        cw_m[c] = fine_samples(grid, curl_w.coeffs[c], fine);
    }
    const SampleArray divw_m = fine_samples(grid, divergence(state.omega).coeffs, fine);

    const double h1u = sobolev_norm(state.u, 1.0);
    const double h1w = sobolev_norm(state.omega, 1.0);
    const double h2u = sobolev_norm(state.u, 2.0);
    const double h2w = sobolev_norm(state.omega, 2.0);

    LedgerReport report;
    report.radius = params.r_cut;
    report.left_terms = {
        {"eps_h2_u", params.epsilon * h2u * h2u, 0.0, false},
        {"eps_h2_w", params.epsilon * h2w * h2w, 0.0, false},
        {"h1_u", h1u * h1u, 0.0, false},
        {"h1_w", h1w * h1w, 0.0, false},
        {"div_penalty", lambda * fine_integral(fine, chi.chi_fine() * divw_m.square()), 0.0,
         false},
        {"kappa_penalty",
         lambda * params.kappa *
             fine_integral(fine, chi.chi_sq_fine() *
                                     (w_m[0].square() + w_m[1].square() + w_m[2].square())),
         0.0, false},
    };

    const SampleArray curl_u_dot_w = cu_m[0] * w_m[0] + cu_m[1] * w_m[1] + cu_m[2] * w_m[2];
    const SampleArray curl_w_dot_u = cw_m[0] * u_m[0] + cw_m[1] * u_m[1] + cw_m[2] * u_m[2];
    // w x u components.
    const SampleArray wxu0 = w_m[1] * u_m[2] - w_m[2] * u_m[1];
    const SampleArray wxu1 = w_m[2] * u_m[0] - w_m[0] * u_m[2];
    const SampleArray wxu2 = w_m[0] * u_m[1] - w_m[1] * u_m[0];
    const SampleArray gchi_dot_wxu = chi.grad_chi_fine(0) * wxu0 + chi.grad_chi_fine(1) * wxu1 +
                                     chi.grad_chi_fine(2) * wxu2;

    report.right_terms = {
        {"curl_volume", lambda * fine_integral(fine, chi.chi_sq_fine() * curl_u_dot_w), 0.0,
         false},
        {"curl_boundary", -lambda * fine_integral(fine, chi.chi_fine() * gchi_dot_wxu), 0.0,
         false},
        {"force_u", lambda * inner_product(params.f, state.u), 0.0, false},
        {"force_w", lambda * inner_product(params.g, state.omega), 0.0, false},
    };

    report.curl_direct = 0.5 * lambda *
                         (fine_integral(fine, chi.chi_sq_fine() * curl_w_dot_u) +
                          fine_integral(fine, chi.chi_sq_fine() * curl_u_dot_w));

    for (const auto& t : report.left_terms) report.left_total += t.exact;
    for (const auto& t : report.right_terms) report.right_total += t.exact;
    report.gap = ledger_gap(report.left_total, report.right_total);
    return report;
}

std::pair<double, double> trilinear_nullity(const VectorField& u, const VectorField& omega,
                                            const CutoffSpec& spec) {
    if (relative_divergence(u) > 1e-10)
        throw std::invalid_argument("trilinear_nullity: u is not divergence-free");
    const CutoffWorkspace chi(spec, u.grid);
    const VectorField adv_u = leray_project(mollified_advection(u, u, chi));
    const VectorField adv_w = mollified_advection(u, omega, chi);
    const double nu = sobolev_norm(u, 0.0);
    const double nw = sobolev_norm(omega, 0.0);
    const double first = inner_product(adv_u, u) / std::max(nu * nu * nu, 1e-300);
    const double second = inner_product(adv_w, omega) / std::max(nu * nw * nw, 1e-300);
    return {first, second};
}

std::vector<LedgerReport> liouville_ledger(const VectorField& u, const VectorField& omega,
                                           const ScalarField& p, const std::vector<double>& r_list,
                                           double q, double kappa) {
    if (!(q >= 3.0 && q <= 4.5))
        throw std::invalid_argument("liouville_ledger: q must be in [3, 9/2]");
    if (r_list.empty()) throw std::invalid_argument("liouville_ledger: empty R list");
    const Grid& grid = u.grid;
    const Grid fine = make_grid(2 * grid.n(), grid.half_period());
    const double box = std::numbers::pi * grid.half_period();

    // Field samples and first derivatives on the padded grid.
    SampleArray u_m[3], w_m[3], du_m[3][3], dw_m[3][3];
    for (int c = 0; c < 3; ++c) {
        u_m[c] = fine_samples(grid, u.coeffs[c], fine);
        w_m[c] = fine_samples(grid, omega.coeffs[c], fine);
        for (int j = 0; j < 3; ++j) {
            const SpectralArray dj_u =
                Complex(0.0, 1.0) * grid.xi_component(j).cast<Complex>() * u.coeffs[c];
            const SpectralArray dj_w =
                Complex(0.0, 1.0) * grid.xi_component(j).cast<Complex>() * omega.coeffs[c];
            du_m[j][c] = fine_samples(grid, dj_u, fine);
            dw_m[j][c] = fine_samples(grid, dj_w, fine);
        }
    }
    const SampleArray p_m = fine_samples(grid, p.coeffs, fine);
    const SampleArray divw_m = dw_m[0][0] + dw_m[1][1] + dw_m[2][2];
    const SampleArray curlu0 = du_m[1][2] - du_m[2][1];
    const SampleArray curlu1 = du_m[2][0] - du_m[0][2];
    const SampleArray curlu2 = du_m[0][1] - du_m[1][0];

    SampleArray grad_sq_u = SampleArray::Zero(fine.size());
    SampleArray grad_sq_w = SampleArray::Zero(fine.size());
    for (int j = 0; j < 3; ++j)
        for (int c = 0; c < 3; ++c) {
            grad_sq_u += du_m[j][c].square();
            grad_sq_w += dw_m[j][c].square();
        }
    const SampleArray u_sq = u_m[0].square() + u_m[1].square() + u_m[2].square();
    const SampleArray w_sq = w_m[0].square() + w_m[1].square() + w_m[2].square();

    const double ell_inv = 1.0 - 3.0 / q;  // Holder partner of L^q, 1/l = 1 - 3/q
    const double ell = ell_inv <= 1e-12 ? std::numeric_limits<double>::infinity() : 1.0 / ell_inv;
    const double divw_l2 = sobolev_norm(divergence(omega), 0.0);

    std::vector<LedgerReport> reports;
    reports.reserve(r_list.size());
    for (double R : r_list) {
        if (!(R >= 1.0)) throw std::invalid_argument("liouville_ledger: R must be >= 1");
        if (2.0 * R > box)
            throw std::invalid_argument("liouville_ledger: cutoff support exceeds the box");
        const Region annulus = Region::annulus(R);
        if (region_point_count(fine, annulus) == 0)
            throw std::invalid_argument("liouville_ledger: annulus contains no grid points");

        // Analytic samples of phi_R and the derivatives of phi_R^2.
        const std::int64_t total = fine.size();
        SampleArray phi_sq(total), lap_phi_sq(total), gphi0(total), gphi1(total), gphi2(total);
        const int nf = fine.n();
        for (int i1 = 0; i1 < nf; ++i1) {
            const double x1 = fine.coordinate(i1);
            for (int i2 = 0; i2 < nf; ++i2) {
                const double x2 = fine.coordinate(i2);
                for (int i3 = 0; i3 < nf; ++i3) {
                    const double x3 = fine.coordinate(i3);
                    const std::int64_t idx = fine.flat(i1, i2, i3);
                    const double r = std::sqrt(x1 * x1 + x2 * x2 + x3 * x3);
                    const double s = r / R;
                    const double ph = cutoff_profile(s);
                    const double d1 = cutoff_profile_d1(s) / R;
                    const double d2 = cutoff_profile_d2(s) / (R * R);
                    phi_sq[idx] = ph * ph;
                    const double lap_phi = r < 1e-14 ? 0.0 : d2 + 2.0 * d1 / r;
                    lap_phi_sq[idx] = 2.0 * (d1 * d1 + ph * lap_phi);
                    const double gmag = 2.0 * ph * d1;  // d(phi^2)/dr
                    const double inv_r = r < 1e-14 ? 0.0 : 1.0 / r;
                    gphi0[idx] = gmag * x1 * inv_r;
                    gphi1[idx] = gmag * x2 * inv_r;
                    gphi2[idx] = gmag * x3 * inv_r;
                }
            }
        }

        LedgerReport rep;
        rep.radius = R;
        rep.left_terms = {
            {"grad_u", fine_integral(fine, phi_sq * grad_sq_u), 0.0, false},
            {"grad_w", fine_integral(fine, phi_sq * grad_sq_w), 0.0, false},
            {"div_w", fine_integral(fine, phi_sq * divw_m.square()), 0.0, false},
            {"kappa_w", kappa * fine_integral(fine, phi_sq * w_sq), 0.0, false},
        };

        const SampleArray gphi_dot_u = gphi0 * u_m[0] + gphi1 * u_m[1] + gphi2 * u_m[2];
        const SampleArray gphi_dot_w = gphi0 * w_m[0] + gphi1 * w_m[1] + gphi2 * w_m[2];
        const SampleArray wxu0 = w_m[1] * u_m[2] - w_m[2] * u_m[1];
        const SampleArray wxu1 = w_m[2] * u_m[0] - w_m[0] * u_m[2];
        const SampleArray wxu2 = w_m[0] * u_m[1] - w_m[1] * u_m[0];

        // Annulus norms for the majorants.
        VectorSamples u_s(fine), w_s(fine);
        for (int c = 0; c < 3; ++c) {
            u_s.values[c] = u_m[c];
            w_s.values[c] = w_m[c];
        }
        ScalarSamples p_s(fine, p_m);
        ScalarSamples gphi_mag(fine, (gphi0.square() + gphi1.square() + gphi2.square()).sqrt());
        ScalarSamples lap_phi_s(fine, lap_phi_sq);

        const double u6 = lebesgue_norm(u_s, 6.0, annulus);
        const double w6 = lebesgue_norm(w_s, 6.0, annulus);
        const double w2 = lebesgue_norm(w_s, 2.0, annulus);
        const double uq = lebesgue_norm(u_s, q, annulus);
        const double pq2 = lebesgue_norm(p_s, q / 2.0, annulus);
        const double gphi3 = lebesgue_norm(gphi_mag, 3.0, annulus);
        const double gphi6 = lebesgue_norm(gphi_mag, 6.0, annulus);
        const double gphil = lebesgue_norm(gphi_mag, ell, annulus);
        const double lap32 = lebesgue_norm(lap_phi_s, 1.5, annulus);

        rep.right_terms = {
            {"t1_cutoff_laplacian", 0.5 * fine_integral(fine, lap_phi_sq * (u_sq + w_sq)),
             lap32 * (u6 * u6 + w6 * w6), true},
            {"t2_div_coupling", -fine_integral(fine, gphi_dot_w * divw_m),
             gphi3 * w6 * divw_l2, true},
            {"t3_advection_u", 0.5 * fine_integral(fine, gphi_dot_u * u_sq),
             0.5 * gphil * uq * uq * uq, true},
            {"t4_advection_w", 0.5 * fine_integral(fine, gphi_dot_u * w_sq),
             0.5 * gphi6 * u6 * w6 * w6, true},
            {"t5_pressure", fine_integral(fine, gphi_dot_u * p_m), gphil * pq2 * uq, true},
            {"t6_curl_cross",
             0.5 * fine_integral(fine, w_m[0] * (gphi1 * u_m[2] - gphi2 * u_m[1]) +
                                           w_m[1] * (gphi2 * u_m[0] - gphi0 * u_m[2]) +
                                           w_m[2] * (gphi0 * u_m[1] - gphi1 * u_m[0])),
             0.5 * gphi3 * w2 * u6, true},
            {"curl_volume",
             fine_integral(fine, phi_sq * (curlu0 * w_m[0] + curlu1 * w_m[1] + curlu2 * w_m[2])),
             0.0, false},
        };

        rep.curl_direct =
            0.5 * fine_integral(
                      fine, phi_sq * ((dw_m[1][2] - dw_m[2][1]) * u_m[0] +
                                      (dw_m[2][0] - dw_m[0][2]) * u_m[1] +
                                      (dw_m[0][1] - dw_m[1][0]) * u_m[2])) +
            0.5 * fine_integral(fine,
                                phi_sq * (curlu0 * w_m[0] + curlu1 * w_m[1] + curlu2 * w_m[2]));

        for (const auto& t : rep.left_terms) rep.left_total += t.exact;
        for (const auto& t : rep.right_terms) rep.right_total += t.exact;
        rep.gap = ledger_gap(rep.left_total, rep.right_total);
        reports.push_back(std::move(rep));
    }
    return reports;
}

CounterexampleReport counterexample_residual(const std::vector<std::array<double, 3>>& points) {
    CounterexampleReport report;
    for (const auto& pt : points) {
        const double x1 = pt[0], x2 = pt[1], x3 = pt[2];
        // u = grad psi = (x1, x2, -2 x3), p = -|u|^2 / 2, w = 0.
        const double u[3] = {x1, x2, -2.0 * x3};
        // lap u = 0; (u.grad)u_i = sum_j u_j d_j u_i with constant Jacobian
        // diag(1, 1, -2).
        const double adv[3] = {u[0] * 1.0, u[1] * 1.0, u[2] * -2.0};
        // grad p = -(x1, x2, 4 x3).
        const double gp[3] = {-x1, -x2, -4.0 * x3};
        // curl w = 0, curl u = 0, div w = 0, so both equations reduce to
        // the polynomial balance below.
        double res = 0.0;
        for (int c = 0; c < 3; ++c) res = std::max(res, std::abs(0.0 - adv[c] - gp[c]));
        const double divu = 1.0 + 1.0 - 2.0;
        report.max_residual = std::max(report.max_residual, res);
        report.max_divergence = std::max(report.max_divergence, std::abs(divu));
    }
    return report;
}

namespace {

// Squared H^s norm of the dealiased outer product u (x) u.
double outer_product_norm(const VectorField& u, double s) {
    const Grid& g = u.grid;
    const Grid fine = make_grid(2 * g.n(), g.half_period());
    const VectorField ud = dealias(u);
    SampleArray comp[3];
    for (int c = 0; c < 3; ++c) comp[c] = fine_samples(g, ud.coeffs[c], fine);
    double sum = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            ScalarField tij(g, fine_forward_truncate(fine, SampleArray(comp[i] * comp[j]), g));
            const double nn = sobolev_norm(tij, s);
            sum += nn * nn;
        }
    return std::sqrt(sum);
}

}  // namespace

LadderReport regularity_ladder(const VectorField& u, const VectorField& omega, double kappa) {
    LadderReport report;
    const double w_l2 = sobolev_norm(omega, 0.0);
    const double w_h1 = sobolev_norm(omega, 1.0);
    const double w_h12 = sobolev_norm(omega, 0.5);
    report.interp_left = w_h12 * w_h12;
    report.interp_right = w_l2 * w_h1;
    report.interp_slack = report.interp_right - report.interp_left;

    report.h32_left = sobolev_norm(u, 1.5);
    report.h32_right = outer_product_norm(u, 0.5) + w_h12;
    report.h2_left = sobolev_norm(u, 2.0);
    report.h2_right = outer_product_norm(u, 1.0) + w_h1;

    const ScalarField divw = divergence(omega);
    const ScalarField divadv = divergence(advection(u, omega));
    ScalarField identity(u.grid);
    identity.coeffs = 2.0 * laplacian(divw).coeffs - kappa * divw.coeffs - divadv.coeffs;
    report.divw_residual = sobolev_norm(identity, 0.0);
    report.divw_scale =
        max_of({2.0 * sobolev_norm(laplacian(divw), 0.0), kappa * sobolev_norm(divw, 0.0),
                sobolev_norm(divadv, 0.0)});
    return report;
}

namespace {

template <typename Samples>
std::vector<DecayRow> decay_scan_impl(const Samples& samples, const Grid& fine,
                                      const std::vector<double>& r_list,
                                      const std::vector<NormRequest>& norms) {
    std::vector<DecayRow> rows;
    for (double R : r_list) {
        for (const auto& req : norms) {
            DecayRow row;
            row.radius = R;
            row.p = req.p;
            row.kind = req.kind;
            Region region{req.kind, R};
            row.empty_region = req.kind != Region::Kind::All &&
                               region_point_count(fine, region) == 0;
            row.value = row.empty_region ? 0.0 : lebesgue_norm(samples, req.p, region);
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace

std::vector<DecayRow> decay_scan(const VectorField& field, const std::vector<double>& r_list,
                                 const std::vector<NormRequest>& norms) {
    const Grid fine = make_grid(2 * field.grid.n(), field.grid.half_period());
    VectorSamples samples(fine);
    for (int c = 0; c < 3; ++c)
        samples.values[c] = fine_samples(field.grid, field.coeffs[c], fine);
    return decay_scan_impl(samples, fine, r_list, norms);
}

std::vector<DecayRow> decay_scan(const ScalarField& field, const std::vector<double>& r_list,
                                 const std::vector<NormRequest>& norms) {
    const Grid fine = make_grid(2 * field.grid.n(), field.grid.half_period());
    ScalarSamples samples(fine, fine_samples(field.grid, field.coeffs, fine));
    return decay_scan_impl(samples, fine, r_list, norms);
}

}  // namespace mps
