#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mps/field.hpp"
#include "mps/solver.hpp"
#include "mps/verification.hpp"

namespace mps {

/// Fully-resolved run configuration. Defaults follow the solver: kappa
/// 100, damping 0.5, tol 1e-10, lambda 1, epsilon 0.5, R 2.
struct Config {
    int grid_n = 32;
    double grid_l = 8.0;

    double epsilon = 0.5;
    double r_cut = 2.0;
    double kappa = 100.0;
    double lambda = 1.0;
    double damping = 0.5;
    int max_iters = 200;
    double tol = 1e-10;

    struct Forcing {
        std::string kind = "zero";  // zero | single_mode | gaussian_bump | snapshot_file
        std::array<int, 3> mode = {0, 1, 0};
        double amplitude = 1e-2;    // target H^-1 norm for single_mode / L^2 for gaussian
        double width = 1.0;         // gaussian width
        std::string path;           // snapshot_file source
    };
    Forcing forcing_f;
    Forcing forcing_g;

    std::string command = "solve";  // solve | verify | liouville | sweep
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    double init_h1 = 0.0;           // > 0: seeded random initial state with this H^1 norm
    std::string input;              // snapshot path for verify / liouville

    std::vector<double> liouville_r_list = {1.0, 2.0, 4.0};
    double liouville_q = 3.0;

    std::vector<double> sweep_epsilons = {0.5, 0.25, 0.125};
    std::vector<double> sweep_radii = {2.0};
    std::vector<double> sweep_lambdas = {0.0, 0.25, 0.5, 0.75, 1.0};
};

/// Parses and validates a JSON config. Unknown keys are rejected and all
/// range violations are reported with their key path.
Config parse_config(const std::string& json_text);

/// Applies a `--set key=value` override (dotted key path into the JSON
/// document) before re-validation.
std::string apply_override(const std::string& json_text, const std::string& assignment);

/// Builds the forcing fields / initial state a config describes.
VectorField build_forcing(const Config::Forcing& forcing, const Grid& grid, bool solenoidal,
                          std::uint64_t seed);
SolverParams build_params(const Config& config, const Grid& grid);
State build_initial_state(const Config& config, const Grid& grid);

// ---- snapshot format ---------------------------------------------------------
//
// Binary layout, little endian:
//   magic "MPS1" | u32 version | u32 n | f64 L | u32 field_count
//   per field: u32 name_len | name bytes | u32 components
//   payloads in header order: components x n^3 complex coefficients as
//   (real, imag) f64 pairs, row-major with axes ordered (k1, k2, k3) and
//   index i mapped to frequency by the standard wrap.

struct Snapshot {
    int n = 0;
    double half_period = 0.0;
    std::vector<std::pair<std::string, std::vector<SpectralArray>>> fields;
};

void write_snapshot(const std::filesystem::path& path, const Snapshot& snapshot);
Snapshot read_snapshot(const std::filesystem::path& path);

Snapshot make_snapshot(const State& state, const ScalarField* pressure);
State state_from_snapshot(const Snapshot& snapshot);
std::optional<ScalarField> pressure_from_snapshot(const Snapshot& snapshot);

// ---- reports -------------------------------------------------------------------

/// Trace CSV columns: iter,H1_u,H1_w,sqrtEps_H2_u,sqrtEps_H2_w,
/// update_norm,r_mom,r_mic,energy_gap.
std::string trace_csv(const SolveTrace& trace);

/// Ledger CSV columns: R,term_name,exact_value,majorant_value (left and
/// right terms in report order; majorant empty when absent).
std::string ledger_csv(const std::vector<LedgerReport>& reports);

std::string decay_csv(const std::vector<DecayRow>& rows);
std::string continuation_csv(const std::vector<ContinuationCell>& cells);
std::string homotopy_csv(const std::vector<HomotopyRow>& rows);

std::string ledger_json(const LedgerReport& report);

void write_text(const std::filesystem::path& path, const std::string& content);

/// Serialized resolved config (the manifest written by every run).
std::string manifest_json(const Config& config);

/// Executes the configured command. Returns 0 on success, 2 on
/// non-convergence or blow-up, 1 on input errors; failures also emit a
/// JSON diagnostic on stderr.
int run(const Config& config);

}  // namespace mps
