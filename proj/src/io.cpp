#include "mps/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <Eigen/Geometry>
#include <json.hpp>

#include "mps/norms.hpp"
#include "mps/operators.hpp"
#include "mps/random.hpp"
#include "mps/transform.hpp"

namespace mps {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& message) {
    throw std::invalid_argument("config error at " + path + ": " + message);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    if (!obj.is_object()) config_error(path, "expected an object");
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) config_error(path, "unknown key '" + item.key() + "'");
    }
}

double get_number(const json& obj, const std::string& path, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) config_error(path + "." + key, "expected a number");
    return obj[key].get<double>();
}

Config::Forcing parse_forcing(const json& obj, const std::string& path) {
    check_keys(obj, path, {"kind", "mode", "amplitude", "width", "path"});
    Config::Forcing f;
    if (obj.contains("kind")) {
        if (!obj["kind"].is_string()) config_error(path + ".kind", "expected a string");
        f.kind = obj["kind"].get<std::string>();
    }
    static const std::set<std::string> kinds = {"zero", "single_mode", "gaussian_bump",
                                                "snapshot_file"};
    if (!kinds.count(f.kind))
        config_error(path + ".kind",
                     "must be one of zero|single_mode|gaussian_bump|snapshot_file");
    if (f.kind == "single_mode") {
        if (!obj.contains("mode"))
            config_error(path + ".mode", "missing key: single_mode forcing requires 'mode'");
        const auto& m = obj["mode"];
        if (!m.is_array() || m.size() != 3) config_error(path + ".mode", "expected [k1,k2,k3]");
        for (int i = 0; i < 3; ++i) {
            if (!m[i].is_number_integer()) config_error(path + ".mode", "expected integer indices");
            f.mode[i] = m[i].get<int>();
        }
        if (f.mode == std::array<int, 3>{0, 0, 0})
            config_error(path + ".mode", "mode must be nonzero");
    }
    if (f.kind == "snapshot_file") {
        if (!obj.contains("path"))
            config_error(path + ".path", "missing key: snapshot_file forcing requires 'path'");
        f.path = obj["path"].get<std::string>();
        if (!std::filesystem::exists(f.path))
            config_error(path + ".path", "file does not exist: " + f.path);
    }
    f.amplitude = get_number(obj, path, "amplitude", f.amplitude);
    if (!(f.amplitude >= 0.0)) config_error(path + ".amplitude", "must be >= 0");
    f.width = get_number(obj, path, "width", f.width);
    if (!(f.width > 0.0)) config_error(path + ".width", "must be > 0");
    return f;
}

std::vector<double> parse_list(const json& arr, const std::string& path) {
    if (!arr.is_array() || arr.empty()) config_error(path, "expected a nonempty array");
    std::vector<double> out;
    for (const auto& v : arr) {
        if (!v.is_number()) config_error(path, "expected numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

Config parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config error: invalid JSON: ") + e.what());
    }
    check_keys(root, "(root)", {"grid", "params", "forcing", "run", "liouville", "sweep"});

    Config cfg;
    if (root.contains("grid")) {
        const auto& g = root["grid"];
        check_keys(g, "grid", {"n", "L"});
        if (g.contains("n")) {
            if (!g["n"].is_number_integer()) config_error("grid.n", "expected an integer");
            cfg.grid_n = g["n"].get<int>();
        }
        cfg.grid_l = get_number(g, "grid", "L", cfg.grid_l);
    }
    if (cfg.grid_n < 8) config_error("grid.n", "n must be >= 8");
    if (cfg.grid_n % 2 != 0) config_error("grid.n", "n must be even");
    if (!(cfg.grid_l > 0.0)) config_error("grid.L", "L must be > 0");

    if (root.contains("params")) {
        const auto& p = root["params"];
        check_keys(p, "params",
                   {"epsilon", "R_cut", "kappa", "lambda", "damping", "max_iters", "tol"});
        cfg.epsilon = get_number(p, "params", "epsilon", cfg.epsilon);
        cfg.r_cut = get_number(p, "params", "R_cut", cfg.r_cut);
        cfg.kappa = get_number(p, "params", "kappa", cfg.kappa);
        cfg.lambda = get_number(p, "params", "lambda", cfg.lambda);
        cfg.damping = get_number(p, "params", "damping", cfg.damping);
        if (p.contains("max_iters")) {
            if (!p["max_iters"].is_number_integer())
                config_error("params.max_iters", "expected an integer");
            cfg.max_iters = p["max_iters"].get<int>();
        }
        cfg.tol = get_number(p, "params", "tol", cfg.tol);
    }
    if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0))
        config_error("params.epsilon", "epsilon must be in (0,1]");
    if (!(cfg.r_cut >= 1.0)) config_error("params.R_cut", "R_cut must be >= 1");
    if (!(cfg.kappa >= 1.0)) config_error("params.kappa", "kappa must be >= 1");
    if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0))
        config_error("params.lambda", "lambda must be in [0,1]");
    if (!(cfg.damping > 0.0 && cfg.damping <= 1.0))
        config_error("params.damping", "damping must be in (0,1]");
    if (cfg.max_iters < 1) config_error("params.max_iters", "max_iters must be >= 1");
    if (!(cfg.tol > 0.0)) config_error("params.tol", "tol must be > 0");

    if (root.contains("forcing")) {
        const auto& f = root["forcing"];
        check_keys(f, "forcing", {"f", "g"});
        if (f.contains("f")) cfg.forcing_f = parse_forcing(f["f"], "forcing.f");
        if (f.contains("g")) cfg.forcing_g = parse_forcing(f["g"], "forcing.g");
    }

    if (!root.contains("run")) config_error("run", "missing section");
    {
        const auto& r = root["run"];
        check_keys(r, "run", {"command", "output_dir", "seed", "init_h1", "input"});
        if (!r.contains("command")) config_error("run.command", "missing key");
        cfg.command = r["command"].get<std::string>();
        static const std::set<std::string> commands = {"solve", "verify", "liouville", "sweep"};
        if (!commands.count(cfg.command))
            config_error("run.command", "must be one of solve|verify|liouville|sweep");
        if (r.contains("output_dir")) cfg.output_dir = r["output_dir"].get<std::string>();
        if (r.contains("seed")) {
            if (!r["seed"].is_number_unsigned() && !r["seed"].is_number_integer())
                config_error("run.seed", "expected a 64-bit unsigned integer");
            cfg.seed = r["seed"].get<std::uint64_t>();
        }
        cfg.init_h1 = get_number(r, "run", "init_h1", cfg.init_h1);
        if (!(cfg.init_h1 >= 0.0)) config_error("run.init_h1", "must be >= 0");
        if (r.contains("input")) {
            cfg.input = r["input"].get<std::string>();
            if (!std::filesystem::exists(cfg.input))
                config_error("run.input", "file does not exist: " + cfg.input);
        }
    }

    if (root.contains("liouville")) {
        const auto& l = root["liouville"];
        check_keys(l, "liouville", {"R_list", "q"});
        if (l.contains("R_list")) cfg.liouville_r_list = parse_list(l["R_list"], "liouville.R_list");
        cfg.liouville_q = get_number(l, "liouville", "q", cfg.liouville_q);
        if (!(cfg.liouville_q >= 3.0 && cfg.liouville_q <= 4.5))
            config_error("liouville.q", "q must be in [3, 4.5]");
        for (double r : cfg.liouville_r_list)
            if (!(r >= 1.0)) config_error("liouville.R_list", "entries must be >= 1");
    }

    if (root.contains("sweep")) {
        const auto& s = root["sweep"];
        check_keys(s, "sweep", {"epsilon_list", "R_list", "lambda_list"});
        if (s.contains("epsilon_list"))
            cfg.sweep_epsilons = parse_list(s["epsilon_list"], "sweep.epsilon_list");
        if (s.contains("R_list")) cfg.sweep_radii = parse_list(s["R_list"], "sweep.R_list");
        if (s.contains("lambda_list"))
            cfg.sweep_lambdas = parse_list(s["lambda_list"], "sweep.lambda_list");
    }

    return cfg;
}

std::string apply_override(const std::string& json_text, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("--set expects key=value, got: " + assignment);
    const std::string key = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    json root = json::parse(json_text);
    json* node = &root;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
        if (part.empty()) throw std::invalid_argument("--set: empty key component in " + key);
        if (dot == std::string::npos) {
            json parsed;
            try {
                parsed = json::parse(value);
            } catch (const json::parse_error&) {
                parsed = value;  // plain string
            }
            (*node)[part] = parsed;
            break;
        }
        node = &((*node)[part]);
        start = dot + 1;
    }
    return root.dump();
}

VectorField build_forcing(const Config::Forcing& forcing, const Grid& grid, bool solenoidal,
                          std::uint64_t seed) {
    VectorField out(grid);
    if (forcing.kind == "zero" || forcing.amplitude == 0.0) return out;

    if (forcing.kind == "single_mode") {
        const int n = grid.n();
        std::array<int, 3> k = forcing.mode;
        for (int c = 0; c < 3; ++c) {
            if (std::abs(k[c]) >= n / 2)
                throw std::invalid_argument("forcing mode exceeds the grid band");
        }
        // Unit direction orthogonal to k so the mode is divergence-free.
        Eigen::Vector3d kv(k[0], k[1], k[2]);
        Eigen::Vector3d helper = std::abs(kv[0]) < std::abs(kv[1]) || std::abs(kv[0]) < std::abs(kv[2])
                                     ? Eigen::Vector3d(1, 0, 0)
                                     : Eigen::Vector3d(0, 1, 0);
        Eigen::Vector3d dir = kv.cross(helper).normalized();
        if (!solenoidal) dir = (dir + kv.normalized()).normalized();

        auto wrap = [&](int kk) { return kk >= 0 ? kk : kk + n; };
        const std::int64_t plus = grid.flat(wrap(k[0]), wrap(k[1]), wrap(k[2]));
        const std::int64_t minus = grid.flat(wrap(-k[0]), wrap(-k[1]), wrap(-k[2]));
        const double xi2 = kv.squaredNorm() / (grid.half_period() * grid.half_period());
        // |f|_{H^-1} = amplitude: real cosine mode with coefficient c at +-k
        // has |f|^2_{H^-1} = V |xi|^-2 2 c^2.
        const double c = forcing.amplitude * std::sqrt(xi2) / std::sqrt(2.0 * grid.volume());
        for (int comp = 0; comp < 3; ++comp) {
            out.coeffs[comp][plus] = Complex(c * dir[comp], 0.0);
            out.coeffs[comp][minus] = Complex(c * dir[comp], 0.0);
        }
        return out;
    }

    if (forcing.kind == "gaussian_bump") {
        // Solenoidal: curl of a Gaussian vector potential along e3;
        // otherwise the bump itself along a fixed diagonal direction.
        ScalarSamples bump(grid);
        const int n = grid.n();
        const double w2 = 2.0 * forcing.width * forcing.width;
        for (int i1 = 0; i1 < n; ++i1) {
            const double x1 = grid.coordinate(i1);
            for (int i2 = 0; i2 < n; ++i2) {
                const double x2 = grid.coordinate(i2);
                for (int i3 = 0; i3 < n; ++i3) {
                    const double x3 = grid.coordinate(i3);
                    bump.values[grid.flat(i1, i2, i3)] =
                        std::exp(-(x1 * x1 + x2 * x2 + x3 * x3) / w2);
                }
            }
        }
        ScalarField bump_hat = forward_transform(bump);
        bump_hat.coeffs[0] = Complex(0.0, 0.0);  // mean-free gauge
        if (solenoidal) {
            VectorField potential(grid);
            potential.coeffs[2] = bump_hat.coeffs;
            out = curl(potential);
        } else {
            const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
            for (int c = 0; c < 3; ++c) out.coeffs[c] = inv_sqrt3 * bump_hat.coeffs;
        }
        const double norm = sobolev_norm(out, -1.0);
        if (norm > 0.0) out = (forcing.amplitude / norm) * out;
        return out;
    }

    if (forcing.kind == "snapshot_file") {
        const Snapshot snap = read_snapshot(forcing.path);
        if (snap.n != grid.n() || snap.half_period != grid.half_period())
            throw std::invalid_argument("forcing snapshot grid does not match the run grid");
        for (const auto& [name, comps] : snap.fields) {
            if (comps.size() == 3) {
                for (int c = 0; c < 3; ++c) out.coeffs[c] = comps[c];
                return out;
            }
        }
        throw std::invalid_argument("forcing snapshot contains no 3-component field");
    }

    (void)seed;
    throw std::invalid_argument("unknown forcing kind: " + forcing.kind);
}

SolverParams build_params(const Config& config, const Grid& grid) {
    SolverParams params(grid);
    params.epsilon = config.epsilon;
    params.r_cut = config.r_cut;
    params.kappa = config.kappa;
    params.lambda = config.lambda;
    params.damping = config.damping;
    params.max_iters = config.max_iters;
    params.tol = config.tol;
    params.f = build_forcing(config.forcing_f, grid, true, config.seed);
    params.g = build_forcing(config.forcing_g, grid, false, config.seed + 1);
    return params;
}

State build_initial_state(const Config& config, const Grid& grid) {
    State init(grid);
    if (config.init_h1 <= 0.0) return init;
    init.u = leray_project(random_vector_field(grid, config.seed * 2 + 1, 4));
    init.omega = random_vector_field(grid, config.seed * 2 + 2, 4);
    for (int c = 0; c < 3; ++c) {
        init.u.coeffs[c][0] = Complex(0.0, 0.0);
        init.omega.coeffs[c][0] = Complex(0.0, 0.0);
    }
    const double h1 = state_h1_norm(init);
    if (h1 > 0.0) {
        init.u = (config.init_h1 / h1) * init.u;
        init.omega = (config.init_h1 / h1) * init.omega;
    }
    return init;
}

// ---- snapshot ------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'M', 'P', 'S', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::string& buf, const T& value) {
    const char* raw = reinterpret_cast<const char*>(&value);
    buf.append(raw, sizeof(T));
}

template <typename T>
T take(const std::string& buf, std::size_t& offset, const char* what) {
    if (offset + sizeof(T) > buf.size())
        throw std::runtime_error(std::string("snapshot: truncated ") + what);
    T value;
    std::memcpy(&value, buf.data() + offset, sizeof(T));
    offset += sizeof(T);
    return value;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const Snapshot& snapshot) {
    std::string buf;
    buf.append(kMagic, 4);
    put(buf, kVersion);
    put(buf, std::uint32_t(snapshot.n));
    put(buf, snapshot.half_period);
    put(buf, std::uint32_t(snapshot.fields.size()));
    for (const auto& [name, comps] : snapshot.fields) {
        put(buf, std::uint32_t(name.size()));
        buf.append(name);
        put(buf, std::uint32_t(comps.size()));
    }
    for (const auto& [name, comps] : snapshot.fields) {
        for (const auto& comp : comps) {
            for (std::int64_t i = 0; i < comp.size(); ++i) {
                put(buf, comp[i].real());
                put(buf, comp[i].imag());
            }
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("snapshot: cannot open for writing: " + path.string());
    out.write(buf.data(), std::streamsize(buf.size()));
    if (!out) throw std::runtime_error("snapshot: write failed: " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("snapshot: cannot open: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string buf = ss.str();

    std::size_t offset = 0;
    if (buf.size() < 4 || std::memcmp(buf.data(), kMagic, 4) != 0)
        throw std::runtime_error("snapshot: wrong magic");
    offset = 4;
    const auto version = take<std::uint32_t>(buf, offset, "header");
    if (version != kVersion)
        throw std::runtime_error("snapshot: unsupported version " + std::to_string(version));

    Snapshot snap;
    snap.n = int(take<std::uint32_t>(buf, offset, "header"));
    snap.half_period = take<double>(buf, offset, "header");
    const auto field_count = take<std::uint32_t>(buf, offset, "header");
    if (snap.n < 8 || snap.n % 2 != 0 || !(snap.half_period > 0.0))
        throw std::runtime_error("snapshot: corrupt header");

    std::vector<std::pair<std::string, std::uint32_t>> layout;
    for (std::uint32_t fidx = 0; fidx < field_count; ++fidx) {
        const auto name_len = take<std::uint32_t>(buf, offset, "header");
        if (offset + name_len > buf.size()) throw std::runtime_error("snapshot: truncated header");
        std::string name(buf.data() + offset, name_len);
        offset += name_len;
        const auto comps = take<std::uint32_t>(buf, offset, "header");
        layout.emplace_back(std::move(name), comps);
    }

    const std::int64_t cells = std::int64_t(snap.n) * snap.n * snap.n;
    std::int64_t total_comps = 0;
    for (const auto& [name, comps] : layout) total_comps += comps;
    const std::size_t expected = offset + std::size_t(total_comps) * cells * 16;
    if (buf.size() != expected)
        throw std::runtime_error("snapshot: truncated payload (expected " +
                                 std::to_string(expected) + " bytes, got " +
                                 std::to_string(buf.size()) + ")");

    const Grid grid = make_grid(snap.n, snap.half_period);
    for (const auto& [name, comps] : layout) {
        std::vector<SpectralArray> arrays;
        for (std::uint32_t c = 0; c < comps; ++c) {
            SpectralArray a(cells);
            for (std::int64_t i = 0; i < cells; ++i) {
                const double re = take<double>(buf, offset, "payload");
                const double im = take<double>(buf, offset, "payload");
                a[i] = Complex(re, im);
            }
            if (hermitian_defect(grid, a) > 1e-12)
                throw std::runtime_error("snapshot: Hermitian symmetry violation in field '" +
                                         name + "'");
            arrays.push_back(std::move(a));
        }
        snap.fields.emplace_back(name, std::move(arrays));
    }
    return snap;
}

Snapshot make_snapshot(const State& state, const ScalarField* pressure) {
    Snapshot snap;
    snap.n = state.u.grid.n();
    snap.half_period = state.u.grid.half_period();
    snap.fields.push_back({"u", {state.u.coeffs[0], state.u.coeffs[1], state.u.coeffs[2]}});
    snap.fields.push_back(
        {"omega", {state.omega.coeffs[0], state.omega.coeffs[1], state.omega.coeffs[2]}});
    if (pressure) snap.fields.push_back({"p", {pressure->coeffs}});
    return snap;
}

State state_from_snapshot(const Snapshot& snapshot) {
    const Grid grid = make_grid(snapshot.n, snapshot.half_period);
    State state(grid);
    bool have_u = false, have_w = false;
    for (const auto& [name, comps] : snapshot.fields) {
        if (name == "u" && comps.size() == 3) {
            for (int c = 0; c < 3; ++c) state.u.coeffs[c] = comps[c];
            have_u = true;
        } else if (name == "omega" && comps.size() == 3) {
            for (int c = 0; c < 3; ++c) state.omega.coeffs[c] = comps[c];
            have_w = true;
        }
    }
    if (!have_u || !have_w)
        throw std::runtime_error("snapshot: missing 'u' or 'omega' vector fields");
    for (int c = 0; c < 3; ++c) {
        zero_nyquist(grid, state.u.coeffs[c]);
        zero_nyquist(grid, state.omega.coeffs[c]);
    }
    return state;
}

std::optional<ScalarField> pressure_from_snapshot(const Snapshot& snapshot) {
    const Grid grid = make_grid(snapshot.n, snapshot.half_period);
    for (const auto& [name, comps] : snapshot.fields) {
        if (name == "p" && comps.size() == 1) return ScalarField(grid, comps[0]);
    }
    return std::nullopt;
}

// ---- reports -------------------------------------------------------------------

std::string trace_csv(const SolveTrace& trace) {
    std::string out = "iter,H1_u,H1_w,sqrtEps_H2_u,sqrtEps_H2_w,update_norm,r_mom,r_mic,energy_gap\n";
    for (std::size_t i = 0; i < trace.iterations(); ++i) {
        out += std::to_string(i) + "," + fmt(trace.h1_u[i]) + "," + fmt(trace.h1_w[i]) + "," +
               fmt(trace.sqrt_eps_h2_u[i]) + "," + fmt(trace.sqrt_eps_h2_w[i]) + "," +
               fmt(trace.update_norm[i]) + "," + fmt(trace.r_mom[i]) + "," + fmt(trace.r_mic[i]) +
               "," + fmt(trace.energy_gap[i]) + "\n";
    }
    return out;
}

std::string ledger_csv(const std::vector<LedgerReport>& reports) {
    std::string out = "R,term_name,exact_value,majorant_value\n";
    for (const auto& rep : reports) {
        for (const auto& t : rep.left_terms)
            out += fmt(rep.radius) + "," + t.name + "," + fmt(t.exact) + "," +
                   (t.has_majorant ? fmt(t.majorant) : "") + "\n";
        for (const auto& t : rep.right_terms)
            out += fmt(rep.radius) + "," + t.name + "," + fmt(t.exact) + "," +
                   (t.has_majorant ? fmt(t.majorant) : "") + "\n";
    }
    return out;
}

namespace {
std::string region_name(Region::Kind kind) {
    switch (kind) {
        case Region::Kind::All: return "all";
        case Region::Kind::Ball: return "ball";
        default: return "annulus";
    }
}
}  // namespace

std::string decay_csv(const std::vector<DecayRow>& rows) {
    std::string out = "R,p,region,value,empty_region\n";
    for (const auto& r : rows)
        out += fmt(r.radius) + "," + fmt(r.p) + "," + region_name(r.kind) + "," + fmt(r.value) +
               "," + (r.empty_region ? "1" : "0") + "\n";
    return out;
}

std::string continuation_csv(const std::vector<ContinuationCell>& cells) {
    std::string out = "epsilon,R,H1_u,H1_w,diff_prev_H1,converged\n";
    for (const auto& c : cells)
        out += fmt(c.epsilon) + "," + fmt(c.r_cut) + "," + fmt(c.h1_u) + "," + fmt(c.h1_w) + "," +
               fmt(c.diff_prev_h1) + "," + (c.converged ? "1" : "0") + "\n";
    return out;
}

std::string homotopy_csv(const std::vector<HomotopyRow>& rows) {
    std::string out = "lambda,H1_u,H1_w,E_u,E_w,energy_left,converged,flagged\n";
    for (const auto& r : rows)
        out += fmt(r.lambda) + "," + fmt(r.h1_u) + "," + fmt(r.h1_w) + "," + fmt(r.e_u) + "," +
               fmt(r.e_w) + "," + fmt(r.energy_left) + "," + (r.converged ? "1" : "0") + "," +
               (r.flagged ? "1" : "0") + "\n";
    return out;
}

namespace {

json ledger_to_json(const LedgerReport& report) {
    json terms_left = json::object();
    for (const auto& t : report.left_terms) terms_left[t.name] = t.exact;
    json terms_right = json::object();
    json majorants = json::object();
    for (const auto& t : report.right_terms) {
        terms_right[t.name] = t.exact;
        if (t.has_majorant) majorants[t.name] = t.majorant;
    }
    return json{{"R", report.radius},
                {"left", terms_left},
                {"right", terms_right},
                {"majorants", majorants},
                {"left_total", report.left_total},
                {"right_total", report.right_total},
                {"gap", report.gap},
                {"curl_direct", report.curl_direct}};
}

}  // namespace

std::string ledger_json(const LedgerReport& report) { return ledger_to_json(report).dump(2); }

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out.write(content.data(), std::streamsize(content.size()));
}

namespace {

json forcing_json(const Config::Forcing& f) {
    return json{{"kind", f.kind},
                {"mode", {f.mode[0], f.mode[1], f.mode[2]}},
                {"amplitude", f.amplitude},
                {"width", f.width},
                {"path", f.path}};
}

}  // namespace

std::string manifest_json(const Config& config) {
    json m{{"grid", {{"n", config.grid_n}, {"L", config.grid_l}}},
           {"params",
            {{"epsilon", config.epsilon},
             {"R_cut", config.r_cut},
             {"kappa", config.kappa},
             {"lambda", config.lambda},
             {"damping", config.damping},
             {"max_iters", config.max_iters},
             {"tol", config.tol}}},
           {"forcing", {{"f", forcing_json(config.forcing_f)}, {"g", forcing_json(config.forcing_g)}}},
           {"run",
            {{"command", config.command},
             {"output_dir", config.output_dir},
             {"seed", config.seed},
             {"init_h1", config.init_h1},
             {"input", config.input}}},
           {"liouville", {{"R_list", config.liouville_r_list}, {"q", config.liouville_q}}},
           {"sweep",
            {{"epsilon_list", config.sweep_epsilons},
             {"R_list", config.sweep_radii},
             {"lambda_list", config.sweep_lambdas}}}};
    return m.dump(2);
}

namespace {

void emit_diagnostic(const std::filesystem::path& dir, const std::string& status,
                     const std::string& message) {
    const json diag{{"status", status}, {"error", message}};
    std::fprintf(stderr, "%s\n", diag.dump().c_str());
    std::error_code ec;
    if (std::filesystem::exists(dir, ec)) write_text(dir / "diagnostic.json", diag.dump(2));
}

const char* status_name(SolveStatus status) {
    switch (status) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::MaxIterations: return "max_iterations";
        case SolveStatus::BlowUp: return "blow_up";
        default: return "linear_solve_failure";
    }
}

int run_solve(const Config& config, const std::filesystem::path& out_dir) {
    const Grid grid = make_grid(config.grid_n, config.grid_l);
    const SolverParams params = build_params(config, grid);
    const State init = build_initial_state(config, grid);
    const SolveResult result = picard_solve(params, init);

    const ScalarField p = pressure_from_velocity(result.state.u);
    const Snapshot snap = make_snapshot(result.state, &p);
    write_snapshot(out_dir / "snapshot.mps", snap);
    write_text(out_dir / "trace.csv", trace_csv(result.trace));

    if (result.status != SolveStatus::Converged) {
        emit_diagnostic(out_dir, status_name(result.status),
                        result.diagnosis.empty() ? "solver did not converge" : result.diagnosis);
        return 2;
    }
    return 0;
}

int run_verify(const Config& config, const std::filesystem::path& out_dir) {
    if (config.input.empty())
        throw std::invalid_argument("config error at run.input: verify requires a snapshot path");
    const Snapshot snap = read_snapshot(config.input);
    const State state = state_from_snapshot(snap);
    const Grid& grid = state.u.grid;
    const SolverParams params = build_params(config, grid);
    const auto p = pressure_from_snapshot(snap);

    const ResidualReport orig = residuals(state, p ? &*p : nullptr, params, SystemForm::Original);
    const ResidualReport moll = residuals(state, nullptr, params, SystemForm::Mollified);
    const LedgerReport energy = energy_ledger(state, params, config.lambda);

    json report{{"residuals_original", {{"r_mom", orig.r_mom}, {"r_mic", orig.r_mic}}},
                {"residuals_mollified", {{"r_mom", moll.r_mom}, {"r_mic", moll.r_mic}}},
                {"energy", ledger_to_json(energy)},
                {"divergence_u_rel", relative_divergence(state.u)}};

    if (relative_divergence(state.u) <= 1e-10) {
        const auto nullity = trilinear_nullity(state.u, state.omega,
                                               CutoffSpec{config.r_cut, CutoffSpec::Family::Theta});
        report["trilinear"] = {{"advection_u", nullity.first}, {"advection_w", nullity.second}};
    } else {
        report["trilinear"] = nullptr;
    }

    write_text(out_dir / "verify.json", report.dump(2));
    write_text(out_dir / "energy_ledger.csv", ledger_csv({energy}));
    return 0;
}

int run_liouville(const Config& config, const std::filesystem::path& out_dir) {
    if (config.input.empty())
        throw std::invalid_argument(
            "config error at run.input: liouville requires a snapshot path");
    const Snapshot snap = read_snapshot(config.input);
    const State state = state_from_snapshot(snap);
    const auto stored_p = pressure_from_snapshot(snap);
    const ScalarField p = stored_p ? *stored_p : pressure_from_velocity(state.u);

    const auto ledgers = liouville_ledger(state.u, state.omega, p, config.liouville_r_list,
                                          config.liouville_q, config.kappa);
    write_text(out_dir / "liouville.csv", ledger_csv(ledgers));

    const double q = config.liouville_q;
    std::vector<DecayRow> rows;
    for (auto& r : decay_scan(state.u, config.liouville_r_list,
                              {{6.0, Region::Kind::Annulus}, {q, Region::Kind::Annulus}}))
        rows.push_back(r);
    auto wrows = decay_scan(state.omega, config.liouville_r_list, {{6.0, Region::Kind::Annulus}});
    rows.insert(rows.end(), wrows.begin(), wrows.end());
    auto prows = decay_scan(p, config.liouville_r_list, {{q / 2.0, Region::Kind::Annulus}});
    rows.insert(rows.end(), prows.begin(), prows.end());
    write_text(out_dir / "decay.csv", decay_csv(rows));

    for (const auto& r : rows)
        if (r.empty_region)
            std::fprintf(stderr, "warning: empty annulus at R=%s\n", fmt(r.radius).c_str());
    return 0;
}

int run_sweep(const Config& config, const std::filesystem::path& out_dir) {
    const Grid grid = make_grid(config.grid_n, config.grid_l);
    const SolverParams params = build_params(config, grid);

    const ContinuationResult cont = continuation(params, config.sweep_epsilons, config.sweep_radii);
    write_text(out_dir / "continuation.csv", continuation_csv(cont.cells));

    const auto rows = homotopy_scan(params, config.sweep_lambdas);
    write_text(out_dir / "homotopy.csv", homotopy_csv(rows));

    bool all_ok = true;
    for (const auto& c : cont.cells) all_ok = all_ok && c.converged;
    for (const auto& r : rows) all_ok = all_ok && r.converged;
    if (!all_ok) {
        emit_diagnostic(out_dir, "max_iterations", "one or more sweep cells did not converge");
        return 2;
    }
    return 0;
}

}  // namespace

int run(const Config& config) {
    std::filesystem::path out_dir(config.output_dir);
    try {
        std::filesystem::create_directories(out_dir);
        write_text(out_dir / "manifest.json", manifest_json(config));

        if (config.command == "solve") return run_solve(config, out_dir);
        if (config.command == "verify") return run_verify(config, out_dir);
        if (config.command == "liouville") return run_liouville(config, out_dir);
        if (config.command == "sweep") return run_sweep(config, out_dir);
        throw std::invalid_argument("unknown command: " + config.command);
    } catch (const std::invalid_argument& e) {
        emit_diagnostic(out_dir, "input_error", e.what());
        return 1;
    } catch (const std::runtime_error& e) {
        emit_diagnostic(out_dir, "runtime_error", e.what());
        return 1;
    }
}

}  // namespace mps
