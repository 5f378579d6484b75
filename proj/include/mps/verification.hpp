#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "mps/field.hpp"
#include "mps/norms.hpp"
#include "mps/operators.hpp"
#include "mps/solver.hpp"

namespace mps {

/// One named ledger entry: the exact integral and, where the estimate
/// chain provides one, the unit-constant Holder majorant.
struct LedgerTerm {
    std::string name;
    double exact = 0.0;
    double majorant = 0.0;
    bool has_majorant = false;
};

/// Term-by-term account of an integrated-by-parts identity. `gap` is the
/// relative mismatch between the two sides; it vanishes (to roundoff) on
/// exact solutions and is reported as-is for synthetic fields.
struct LedgerReport {
    double radius = 0.0;
    std::vector<LedgerTerm> left_terms;
    std::vector<LedgerTerm> right_terms;
    double left_total = 0.0;
    double right_total = 0.0;
    double gap = 0.0;
    /// Direct evaluation of the symmetric curl coupling; equals the sum of
    /// the curl_volume and curl_boundary entries (a vector-calculus
    /// identity audited by the tests).
    double curl_direct = 0.0;
};

double ledger_gap(double left, double right);

/// Relative strong-form residuals of the two equations, each normalized
/// by the largest constituent term norm. Residuals are taken over the
/// nonzero modes (constants are quotiented out on the torus).
struct ResidualReport {
    double r_mom = 0.0;
    double r_mic = 0.0;
};

enum class SystemForm { Original, Mollified };

/// Evaluates the selected system's left side spectrally. For the original
/// form the pressure is taken from `p` or recomputed from u when null; the
/// mollified form is pressure-free. `lambda` scales the right-hand side
/// terms exactly as in U = lambda T(U).
ResidualReport residuals(const State& state, const ScalarField* p, const SolverParams& params,
                         SystemForm form);

/// Energy identity of the fixed point at parameter lambda:
///   eps(|lap u|^2 + |lap w|^2) + |grad u|^2 + |grad w|^2
///     + lambda int chi |div w|^2 + lambda kappa |chi w|^2
///   = lambda int chi^2 (curl u).w - lambda int chi grad-chi . (w x u)
///     + lambda <f, u> + lambda <g, w>.
/// All products use the discrete cutoff and alias-exact quadrature, so
/// the gap is roundoff-small at numerical fixed points.
LedgerReport energy_ledger(const State& state, const SolverParams& params, double lambda);
LedgerReport energy_ledger(const State& state, const SolverParams& params, double lambda,
                           const CutoffWorkspace& cutoff);

/// The two advection pairings that vanish for divergence-free u:
/// int P[((chi u).grad)(chi u)] . u and int ((chi u).grad)(chi w) . w,
/// normalized by |u|^3 and |u| |w|^2. Throws for non-solenoidal u.
std::pair<double, double> trilinear_nullity(const VectorField& u, const VectorField& omega,
                                            const CutoffSpec& spec);

/// Localized energy ledger with the phi_R cutoff for each R in r_list.
/// Right-side terms are the annulus-supported reductions (1)-(6) plus the
/// symmetric curl volume term; majorants use the Holder exponent window
/// 1/l + 3/q = 1 with q in [3, 9/2] (l = infinity at q = 3).
std::vector<LedgerReport> liouville_ledger(const VectorField& u, const VectorField& omega,
                                           const ScalarField& p, const std::vector<double>& r_list,
                                           double q, double kappa = 100.0);

struct CounterexampleReport {
    double max_residual = 0.0;
    double max_divergence = 0.0;
};

/// Closed-form audit of the polynomial solution u = grad psi,
/// psi = x1^2/2 + x2^2/2 - x3^2, p = -|u|^2/2, w = 0: evaluates both
/// equations of the unforced system at the given points by exact
/// differentiation of the polynomials (grid-free).
CounterexampleReport counterexample_residual(const std::vector<std::array<double, 3>>& points);

/// Regularity-chain report: each inequality's two sides with unit
/// constants (ratios are reported, never asserted against an abstract C),
/// the exact interpolation slack, and the div-omega identity residual.
struct LadderReport {
    double interp_left = 0.0;    // |w|^2_{H^1/2}
    double interp_right = 0.0;   // |w|_{L^2} |w|_{H^1}
    double interp_slack = 0.0;   // right - left

    double h32_left = 0.0;       // |u|_{H^3/2}
    double h32_right = 0.0;      // |u (x) u|_{H^1/2} + |w|_{H^1/2}
    double h2_left = 0.0;        // |u|_{H^2}
    double h2_right = 0.0;       // |u (x) u|_{H^1} + |w|_{H^1}

    double divw_residual = 0.0;  // |2 lap div w - kappa div w - div((u.grad) w)|_{L^2}
    double divw_scale = 0.0;     // largest constituent norm of that identity
};

LadderReport regularity_ladder(const VectorField& u, const VectorField& omega, double kappa);

struct NormRequest {
    double p = 2.0;
    Region::Kind kind = Region::Kind::Annulus;
};

struct DecayRow {
    double radius = 0.0;
    double p = 2.0;
    Region::Kind kind = Region::Kind::Annulus;
    double value = 0.0;
    bool empty_region = false;
};

/// Tabulates the requested region norms for each R (the annulus-decay
/// diagnostic); values are computed on the 2x padded grid.
std::vector<DecayRow> decay_scan(const VectorField& field, const std::vector<double>& r_list,
                                 const std::vector<NormRequest>& norms);
std::vector<DecayRow> decay_scan(const ScalarField& field, const std::vector<double>& r_list,
                                 const std::vector<NormRequest>& norms);

}  // namespace mps
