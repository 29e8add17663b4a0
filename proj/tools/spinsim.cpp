// spinsim: run the full pipeline (initial data -> Coulomb gauge -> field
// evolution -> spin-map reconstruction) and the companion diagnostics:
// gauge identity checks, the DS-II decoupling comparison, the direct
// spin-equation cross-check, and the perturbation stability sweep.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure
// (blow-up / degenerate geometry), 4 I/O failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "spinfield/dsii.hpp"
#include "spinfield/io.hpp"
#include "spinfield/metrics.hpp"
#include "spinfield/reconstruction.hpp"

namespace {

using namespace spinfield;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct RunSetup {
    Grid grid;
    Signature sig;
    std::string family;
    BumpParams bump;
    SolverConfig solver;
    Config cfg;
    std::string out_dir;
    unsigned seed = 0;
    int threads = 1;
};

RunSetup parse_setup(const std::string& config_path, const std::string& out_dir,
                     unsigned seed, int threads) {
    RunSetup s;
    s.cfg = config_path.empty() ? Config{} : load_config(config_path);
    s.out_dir = out_dir;
    s.seed = seed;
    s.threads = threads;

    const int n = config_get_int(s.cfg, "grid.n", 64);
    s.grid.n1 = config_get_int(s.cfg, "grid.n1", n);
    s.grid.n2 = config_get_int(s.cfg, "grid.n2", n);
    const double L = config_get_double(s.cfg, "grid.L", 16.0 * std::acos(-1.0));
    s.grid.L1 = config_get_double(s.cfg, "grid.L1", L);
    s.grid.L2 = config_get_double(s.cfg, "grid.L2", L);
    if (!s.grid.valid()) throw ConfigError("grid.n*/grid.L*: invalid grid");

    s.sig.mu = config_get_int(s.cfg, "signature.mu", 1);
    s.sig.epsilon = config_get_int(s.cfg, "signature.epsilon", 1);
    if (!s.sig.valid()) throw ConfigError("signature.mu/epsilon must be +-1");

    s.family = config_get(s.cfg, "data.family", "constant");
    s.bump.amplitude = config_get_double(s.cfg, "data.amplitude", 0.1);
    s.bump.radius = config_get_double(s.cfg, "data.radius", 0.0);
    s.bump.center1 = config_get_double(s.cfg, "data.center1", 0.5);
    s.bump.center2 = config_get_double(s.cfg, "data.center2", 0.5);
    s.bump.phase = config_get_double(s.cfg, "data.phase", 0.0);
    s.bump.wave1 = config_get_int(s.cfg, "data.wave1", 0);
    s.bump.wave2 = config_get_int(s.cfg, "data.wave2", 0);

    s.solver.dt = config_get_double(s.cfg, "solver.dt", 1e-3);
    s.solver.T = config_get_double(s.cfg, "solver.T", 0.25);
    s.solver.dealias = config_get_int(s.cfg, "solver.dealias", 1) != 0;
    s.solver.blowup_threshold = config_get_double(s.cfg, "solver.blowup_threshold", 1e6);
    s.solver.snapshot_stride = config_get_int(s.cfg, "solver.snapshot_stride", 10);
    if (!(s.solver.dt > 0.0) || !(s.solver.T > 0.0) || s.solver.snapshot_stride < 1)
        throw ConfigError("solver.dt/T/snapshot_stride out of range");
    return s;
}

void ensure_out_dir(const RunSetup& s) {
    std::error_code ec;
    std::filesystem::create_directories(s.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + s.out_dir + ": " + ec.message());
}

int check_completed(const BlowupReport& rep) {
    if (rep.nonfinite) {
        std::cerr << "numerical failure: non-finite field at t = " << rep.t_stop << "\n";
        return kExitNumerical;
    }
    if (rep.blowup) {
        std::cerr << "blow-up detected: L^4 accumulator " << rep.accumulator << " at t = "
                  << rep.t_stop << "\n";
        return kExitNumerical;
    }
    return 0;
}

void write_psi_snapshot(const RunSetup& s, const std::string& name, const PsiState& st,
                        std::vector<std::string>& artifacts) {
    Snapshot snap;
    snap.grid = s.grid;
    snap.sig = s.sig;
    snap.time = st.t;
    snap.arrays.push_back(record_from_scalar("psi1", st.psi.psi1));
    snap.arrays.push_back(record_from_scalar("psi2", st.psi.psi2));
    write_snapshot(s.out_dir + "/" + name, snap);
    artifacts.push_back(name);
}

int cmd_simulate(const RunSetup& s) {
    ensure_out_dir(s);
    SpectralWorkspace ws(s.grid);
    const SpinField f = initial_data(s.family, s.grid, s.sig, s.bump);
    const GaugeData gauge = coulomb_gauge(ws, f);
    const Trajectory traj = solve(ws, PsiState{gauge.phi, 0.0}, s.solver);

    std::vector<std::string> artifacts;
    const int snap_every = config_get_int(s.cfg, "output.snapshot_every", 0);
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        const bool last = (k + 1 == traj.snapshots.size());
        if (k == 0 || last || (snap_every > 0 && k % static_cast<std::size_t>(snap_every) == 0))
            write_psi_snapshot(s, "psi_" + std::to_string(k) + ".snap", traj.snapshots[k],
                               artifacts);
    }

    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        const PsiState& st = traj.snapshots[k];
        const Connection conn = connection_from_psi(ws, st, s.solver.dealias);
        const double m1 = l2_norm(st.psi.psi1), m2 = l2_norm(st.psi.psi2);
        rows.push_back({st.t, m1 * m1, m2 * m2, traj.accumulator_series[k],
                        compatibility_residual(ws, st, conn), curvature_residual(ws, conn)});
    }
    write_csv(s.out_dir + "/diagnostics.csv",
              {"time", "mass1", "mass2", "l4_accumulator", "compatibility_residual",
               "curvature_residual"},
              rows);
    artifacts.push_back("diagnostics.csv");

    // Reconstruct the spin map and persist the endpoint.
    GeometricState init{f, coulomb_frame(ws, f, gauge.A1, gauge.A2, default_base_vector(f)), 0.0};
    const auto states = reconstruct(ws, traj, init);
    Snapshot spin;
    spin.grid = s.grid;
    spin.sig = s.sig;
    spin.time = states.back().t;
    spin.arrays.push_back(record_from_spin("s", states.back().s));
    write_snapshot(s.out_dir + "/spin_final.snap", spin);
    artifacts.push_back("spin_final.snap");

    write_manifest(s.out_dir, s.cfg, artifacts);
    std::cout << "simulate: " << traj.snapshots.size() << " snapshots, final t = "
              << traj.snapshots.back().t << ", constraint residual "
              << geometric_constraint_residual(states.back()) << "\n";
    return check_completed(traj.report);
}

int cmd_gauge_check(const RunSetup& s) {
    ensure_out_dir(s);
    SpectralWorkspace ws(s.grid);
    const SpinField f = initial_data(s.family, s.grid, s.sig, s.bump);
    const GaugeData gauge = coulomb_gauge(ws, f);

    // Coulomb condition d1 A1 + d2 A2.
    const ScalarField div = ws.derivative(1, gauge.A1) + ws.derivative(2, gauge.A2);
    const PsiState st{gauge.phi, 0.0};
    const Connection conn{ScalarField(s.grid), gauge.A1, gauge.A2, gauge.q12};
    GeometricState g{f, gauge.frame, 0.0};

    const std::vector<std::string> names = {
        "coulomb_divergence", "frame_residual",     "constraint_residual",
        "curvature_residual", "compatibility_residual", "spatial_identity",
        "gradient_identity"};
    const std::vector<double> values = {
        l2_norm(div),
        frame_residual(f, gauge.frame),
        f.constraint_residual(),
        curvature_residual(ws, conn),
        compatibility_residual(ws, st, conn),
        spatial_identity_residual(ws, g, gauge.phi),
        gradient_identity_residual(ws, g, gauge.phi)};

    std::vector<std::vector<double>> rows;
    for (double v : values) {
        if (!std::isfinite(v)) {
            std::cerr << "gauge-check: non-finite residual\n";
            return kExitNumerical;
        }
    }
    rows.push_back({0.0});
    rows.back().insert(rows.back().end(), values.begin(), values.end());
    std::vector<std::string> header = {"time"};
    header.insert(header.end(), names.begin(), names.end());
    write_csv(s.out_dir + "/gauge_check.csv", header, rows);
    write_manifest(s.out_dir, s.cfg, {"gauge_check.csv"});
    for (std::size_t i = 0; i < names.size(); ++i)
        std::cout << names[i] << " = " << values[i] << "\n";
    return 0;
}

int cmd_dsii_compare(const RunSetup& s) {
    if (s.sig.epsilon != -1)
        throw ConfigError("dsii-compare requires signature.epsilon = -1");
    ensure_out_dir(s);
    SpectralWorkspace ws(s.grid);
    const SpinField f = initial_data(s.family, s.grid, s.sig, s.bump);
    const GaugeData gauge = coulomb_gauge(ws, f);
    const PsiState psi0{gauge.phi, 0.0};

    const Trajectory psi_traj = solve(ws, psi0, s.solver);
    DsiiTrajectory plus, minus;
    if (s.threads > 1) {
        std::thread tp([&] { plus = solve_dsii(ws, to_phi(psi0, +1), s.solver); });
        minus = solve_dsii(ws, to_phi(psi0, -1), s.solver);
        tp.join();
    } else {
        plus = solve_dsii(ws, to_phi(psi0, +1), s.solver);
        minus = solve_dsii(ws, to_phi(psi0, -1), s.solver);
    }
    const auto residuals = cross_validate(psi_traj, plus, minus);

    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < residuals.size(); ++k)
        rows.push_back({psi_traj.snapshots[k].t, residuals[k][0], residuals[k][1]});
    write_csv(s.out_dir + "/dsii_compare.csv", {"time", "residual_plus", "residual_minus"},
              rows);
    write_manifest(s.out_dir, s.cfg, {"dsii_compare.csv"});
    std::cout << "dsii-compare: final residuals " << residuals.back()[0] << " "
              << residuals.back()[1] << "\n";
    if (int rc = check_completed(psi_traj.report)) return rc;
    if (int rc = check_completed(plus.report)) return rc;
    return check_completed(minus.report);
}

int cmd_oracle_compare(const RunSetup& s) {
    ensure_out_dir(s);
    SpectralWorkspace ws(s.grid);
    const SpinField f = initial_data(s.family, s.grid, s.sig, s.bump);
    const GaugeData gauge = coulomb_gauge(ws, f);
    const Trajectory traj = solve(ws, PsiState{gauge.phi, 0.0}, s.solver);
    if (int rc = check_completed(traj.report)) return rc;

    GeometricState init{f, coulomb_frame(ws, f, gauge.A1, gauge.A2, default_base_vector(f)), 0.0};
    const auto states = reconstruct(ws, traj, init);

    // Independent route: evolve the spin equation directly at the solver dt.
    SpinField direct = f;
    std::vector<std::vector<double>> rows;
    rows.push_back({0.0, 0.0});
    std::size_t next = 1;
    const long nsteps = std::lround(s.solver.T / s.solver.dt);
    for (long n = 1; n <= nsteps; ++n) {
        direct = direct_spin_step(ws, direct, s.solver.dt);
        if (n % s.solver.snapshot_stride == 0 && next < states.size()) {
            rows.push_back({n * s.solver.dt, spin_distance_linf(states[next].s, direct)});
            ++next;
        }
    }
    write_csv(s.out_dir + "/oracle_compare.csv", {"time", "linf_distance"}, rows);
    write_manifest(s.out_dir, s.cfg, {"oracle_compare.csv"});
    std::cout << "oracle-compare: final L^inf distance " << rows.back()[1] << "\n";
    return 0;
}

int cmd_stability_sweep(const RunSetup& s) {
    ensure_out_dir(s);
    SpectralWorkspace ws(s.grid);
    const SpinField base = initial_data(s.family, s.grid, s.sig, s.bump);

    std::vector<double> deltas;
    {
        std::string list = config_get(s.cfg, "sweep.deltas", "1e-3,3e-3,1e-2");
        std::size_t pos = 0;
        while (pos < list.size()) {
            std::size_t comma = list.find(',', pos);
            if (comma == std::string::npos) comma = list.size();
            try {
                deltas.push_back(std::stod(list.substr(pos, comma - pos)));
            } catch (const std::exception&) {
                throw ConfigError("sweep.deltas: not a number near \"" +
                                  list.substr(pos, comma - pos) + "\"");
            }
            pos = comma + 1;
        }
    }

    auto family = [&](double delta) {
        BumpParams p = s.bump;
        p.amplitude += delta;
        return initial_data(s.family == "constant" ? "bump" : s.family, s.grid, s.sig, p);
    };
    const auto rows = stability_sweep(ws, base, family, deltas, s.solver);

    std::vector<std::vector<double>> csv;
    for (const SweepRow& r : rows) {
        csv.push_back({0.0, r.delta, r.delta_in, r.delta_out, r.ratio,
                       r.status == "ok" ? 0.0 : 1.0});
        std::cout << "delta = " << r.delta << ": in " << r.delta_in << ", out " << r.delta_out
                  << ", ratio " << r.ratio << " (" << r.status << ")\n";
    }
    write_csv(s.out_dir + "/stability_sweep.csv",
              {"time", "delta", "delta_in", "delta_out", "ratio", "failed"}, csv);
    write_manifest(s.out_dir, s.cfg, {"stability_sweep.csv"});
    for (const SweepRow& r : rows)
        if (r.status != "ok") return kExitNumerical;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spin-field evolution and verification toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    unsigned seed = 0;
    int threads = 0;
    app.add_option("--config", config_path, "path to a key = value config file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "seed for randomized components");
    app.add_option("--threads", threads, "internal parallelism cap (0 = auto)");

    auto* simulate = app.add_subcommand("simulate", "full pipeline run with artifacts");
    auto* gauge = app.add_subcommand("gauge-check", "gauge-construction identity report");
    auto* dsii = app.add_subcommand("dsii-compare", "coupled vs decoupled route comparison");
    auto* oracle = app.add_subcommand("oracle-compare", "reconstruction vs direct evolution");
    auto* sweep = app.add_subcommand("stability-sweep", "perturbation response table");

    CLI11_PARSE(app, argc, argv);

    try {
        if (const char* env = std::getenv("SPINSIM_THREADS")) threads = std::atoi(env);
        if (threads <= 0)
            threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
        const RunSetup setup = parse_setup(config_path, out_dir, seed, threads);
        if (simulate->parsed()) return cmd_simulate(setup);
        if (gauge->parsed()) return cmd_gauge_check(setup);
        if (dsii->parsed()) return cmd_dsii_compare(setup);
        if (oracle->parsed()) return cmd_oracle_compare(setup);
        if (sweep->parsed()) return cmd_stability_sweep(setup);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InvalidParams& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
