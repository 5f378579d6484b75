#pragma once

#include <optional>
#include <vector>

#include "mps/field.hpp"
#include "mps/grid.hpp"
#include "mps/operators.hpp"

namespace mps {

/// All scalar knobs of the regularized fixed-point problem plus the two
/// forcing fields. div(f) = 0 is required; g is unconstrained.
struct SolverParams {
    double epsilon = 0.5;   // biharmonic regularization, in (0, 1]
    double r_cut = 2.0;     // cutoff radius R, >= 1
    double kappa = 100.0;   // microrotation damping, >= 1
    double lambda = 1.0;    // homotopy parameter, in [0, 1]
    double damping = 0.5;   // iteration damping alpha, in (0, 1]
    int max_iters = 200;
    double tol = 1e-10;     // E-norm tolerance on |U - lambda T(U)|
    VectorField f;
    VectorField g;

    SolverParams(const Grid& grid) : f(grid), g(grid) {}
};

/// Throws std::invalid_argument when a knob is out of range or div(f) is
/// not numerically zero.
void validate(const SolverParams& params);

/// The stacked unknown (u, omega); u stays divergence-free.
struct State {
    VectorField u;
    VectorField omega;

    explicit State(const Grid& grid) : u(grid), omega(grid) {}
};

State operator-(const State& a, const State& b);

/// |u|_E + |omega|_E with the epsilon-weighted second-order part.
double state_e_norm(const State& s, double epsilon);
/// |u|_{H^1} + |omega|_{H^1}.
double state_h1_norm(const State& s);

/// Per-iteration diagnostics; all columns have equal length.
struct SolveTrace {
    std::vector<double> h1_u, h1_w;
    std::vector<double> sqrt_eps_h2_u, sqrt_eps_h2_w;
    std::vector<double> update_norm;
    std::vector<double> r_mom, r_mic;
    std::vector<double> energy_gap;

    std::size_t iterations() const { return h1_u.size(); }
};

enum class SolveStatus { Converged, MaxIterations, BlowUp, LinearSolveFailure };

struct SolveResult {
    State state;
    SolveTrace trace;
    SolveStatus status = SolveStatus::MaxIterations;
    double fixed_point_residual = 0.0;  // |U - lambda T(U)|_E at exit
    std::string diagnosis;
};

/// One application of the fixed-point operator: the regularized resolvent
/// of the stacked right-hand side, with the u row re-projected onto
/// divergence-free fields.
State apply_T(const State& state, const SolverParams& params, const CutoffWorkspace& cutoff);
State apply_T(const State& state, const SolverParams& params);

/// Damped iteration toward U = lambda T(U). The linear part of the
/// operator is solved implicitly each step (matrix-free GMRES with a
/// constant-coefficient preconditioner) and the damping is applied around
/// that implicit update; iterating the raw map is linearly unstable for
/// kappa >> 1 because the resolvent gain of the kappa theta^2 term exceeds
/// one at low wavenumbers. Fixed points coincide with the raw map's and
/// success still means |U - lambda T(U)|_E < tol.
SolveResult picard_solve(const SolverParams& params, const State& init);
SolveResult picard_solve(const SolverParams& params);

/// Squared dual-norm load |f|^2_{H^-1} + |g|^2_{H^-1}; the constant-free
/// right side of the a-priori estimate.
double apriori_bound(const SolverParams& params);

struct HomotopyRow {
    double lambda = 0.0;
    double h1_u = 0.0, h1_w = 0.0;
    double e_u = 0.0, e_w = 0.0;
    double energy_left = 0.0;  // eps |U|^2_{H^2} + |U|^2_{H^1}
    bool converged = false;
    bool flagged = false;  // energy_left exceeds the lambda = 1 reference
};

/// Solves U = lambda T(U) for each lambda and reports the E-norm data.
/// Rows are flagged when their energy left side exceeds the lambda = 1
/// row's by more than 5 percent.
std::vector<HomotopyRow> homotopy_scan(const SolverParams& params,
                                       const std::vector<double>& lambdas);

struct ContinuationCell {
    double epsilon = 0.0;
    double r_cut = 0.0;
    double h1_u = 0.0, h1_w = 0.0;
    double diff_prev_h1 = 0.0;  // |U - U_prev|_{H^1}, 0 for the first cell
    bool converged = false;
};

struct ContinuationResult {
    std::vector<ContinuationCell> cells;
    std::vector<State> states;
};

/// Warm-started solves over the (epsilon, R) grid: epsilon descending in
/// the outer loop, R ascending inside, each cell starting from the
/// previous cell's state. Reports the H^1 distance between consecutive
/// solutions (the Cauchy diagnostic for the double limit).
ContinuationResult continuation(const SolverParams& params,
                                const std::vector<double>& epsilons,
                                const std::vector<double>& radii);

}  // namespace mps
